#include "chirplock/io.hpp"

#include <bit>
#include <cstring>

#include <fmt/format.h>

#include "chirplock/errors.hpp"

namespace chirplock::io {

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) {
        throw Error(fmt::format("cannot open {} for writing", path.string()));
    }
    for (const auto& h : header) *this << std::string_view(h);
    end_row();
}

void CsvWriter::separator() {
    if (row_started_) out_ << ',';
    row_started_ = true;
}

CsvWriter& CsvWriter::operator<<(double v) {
    separator();
    out_ << format_number(v);
    return *this;
}

CsvWriter& CsvWriter::operator<<(int v) {
    separator();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::operator<<(long v) {
    separator();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::operator<<(bool v) {
    separator();
    out_ << (v ? 1 : 0);
    return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view v) {
    separator();
    if (v.find_first_of(",\"\n") == std::string_view::npos) {
        out_ << v;
        return *this;
    }
    out_ << '"';
    for (char c : v) {
        if (c == '"') out_ << '"';
        out_ << (c == '\n' ? ' ' : c);
    }
    out_ << '"';
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    row_started_ = false;
}

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out(path);
    if (!out) {
        throw Error(fmt::format("cannot open {} for writing", path.string()));
    }
    out << text;
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json to_json(const DimensionlessParams& d) {
    return Json{{"p1", d.p1()},         {"p2", d.p2()},       {"thermal_ratio", d.thermal_ratio()},
                {"mu", d.mu()},         {"lambda", d.lambda()}, {"gamma", d.gamma()},
                {"sigma2", d.sigma2()}};
}

Json to_json(const LadderSettings& s) {
    return Json{{"rtol", s.rtol},
                {"atol", s.atol},
                {"basis_size", s.basis_size},
                {"guard_levels", s.guard_levels},
                {"guard_threshold", s.guard_threshold},
                {"min_step", s.min_step},
                {"max_steps", s.max_steps},
                {"interaction_picture", s.interaction_picture}};
}

Json to_json(const IntegratorDiagnostics& d) {
    return Json{{"accepted_steps", d.accepted_steps},
                {"rejected_steps", d.rejected_steps},
                {"max_norm_drift", d.max_norm_drift},
                {"max_guard_population", d.max_guard_population}};
}

Json to_json(const SimSettings& s) {
    Json j{{"tau0", s.tau0}, {"ladder", to_json(s.ladder)}};
    j["tau_measure"] = s.tau_measure ? Json(*s.tau_measure) : Json("default");
    j["separator"] = s.separator.mode == SeparatorPolicy::Mode::Valley
                         ? Json{{"mode", "valley"}}
                         : Json{{"mode", "fixed"}, {"level", s.separator.fixed_level}};
    return j;
}

Json to_json(const wigner::Axis& a) { return Json{{"min", a.min}, {"max", a.max}, {"points", a.points}}; }

Json to_json(const wigner::WignerDiagnostics& d) {
    return Json{{"steps", d.steps},
                {"step", d.step},
                {"step_bound", d.step_bound},
                {"absorbed_mass", d.absorbed_mass},
                {"max_norm_drift", d.max_norm_drift}};
}

void write_populations(const fs::path& path, const LadderRun& run) {
    CsvWriter csv(path, {"tau", "n", "re", "im", "population"});
    for (const auto& s : run.snapshots) {
        for (int n = 0; n < s.size(); ++n) {
            const Complex b = s.amplitudes[static_cast<std::size_t>(n)];
            csv << s.tau << n << b.real() << b.imag() << std::norm(b);
            csv.end_row();
        }
    }
}

void write_s_curve(const fs::path& path, const SCurve& curve) {
    CsvWriter csv(path, {"p1", "probability", "separator", "max_norm_drift", "ok", "error"});
    for (const auto& s : curve.samples) {
        csv << s.p1 << s.probability << s.separator << s.max_norm_drift << s.ok << std::string_view(s.error);
        csv.end_row();
    }
}

Json s_curve_summary(const SCurve& c) {
    Json j{{"p2", c.p2}, {"fitted", c.fitted}};
    if (c.fitted) {
        j["threshold"] = c.threshold;
        j["threshold_error"] = c.threshold_error;
        j["width"] = c.width;
        j["width_error"] = c.width_error;
        j["slope"] = c.slope;
    } else {
        j["fit_error"] = c.fit_error;
    }
    int failed = 0;
    for (const auto& s : c.samples) failed += s.ok ? 0 : 1;
    j["samples"] = c.samples.size();
    j["failed_samples"] = failed;
    return j;
}

void write_field(const fs::path& stem, const wigner::PhaseSpaceField& f, double beta_bar) {
    static_assert(std::endian::native == std::endian::little, "binary fields are little-endian");
    fs::path bin = stem;
    bin += ".bin";
    std::ofstream out(bin, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot open {} for writing", bin.string()));
    }
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    const bool fixed = f.frame == wigner::Frame::Fixed;
    Json h{{"frame", wigner::to_string(f.frame)},
           {"data", bin.filename().string()},
           {"dtype", "float64-le"},
           {"layout", "row-major, index = i * p.points + j"},
           {"x_name", fixed ? "x" : "Q"},
           {"p_name", fixed ? "u" : "P"},
           {"time_name", fixed ? "t" : "tau"},
           {"time", f.time},
           {"x", to_json(f.x)},
           {"p", to_json(f.p)},
           {"integral", f.integral()},
           {"negativity", f.negativity()}};
    if (fixed && beta_bar > 0.0) {
        h["beta_bar"] = beta_bar;
        h["rescale"] = std::sqrt(beta_bar);  // xi = rescale * x, upsilon = rescale * u
    }
    fs::path js = stem;
    js += ".json";
    write_json(js, h);
}

wigner::PhaseSpaceField read_field(const fs::path& stem) {
    fs::path js = stem;
    js += ".json";
    std::ifstream in(js);
    if (!in) {
        throw Error(fmt::format("cannot open {}", js.string()));
    }
    const auto h = Json::parse(in);
    auto axis = [](const Json& a) {
        return wigner::Axis{a.at("min").get<double>(), a.at("max").get<double>(), a.at("points").get<int>()};
    };
    const auto frame = h.at("frame").get<std::string>() == "fixed" ? wigner::Frame::Fixed : wigner::Frame::Rotating;
    wigner::PhaseSpaceField f(frame, axis(h.at("x")), axis(h.at("p")), h.at("time").get<double>());
    fs::path bin = stem;
    bin += ".bin";
    std::ifstream data(bin, std::ios::binary);
    data.read(reinterpret_cast<char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!data) {
        throw Error(fmt::format("{} is shorter than its header says", bin.string()));
    }
    return f;
}

void write_separatrix(const fs::path& path, const std::vector<wigner::Polyline>& branches) {
    CsvWriter csv(path, {"branch", "xi", "upsilon"});
    for (std::size_t b = 0; b < branches.size(); ++b) {
        for (const auto& pt : branches[b]) {
            csv << static_cast<int>(b) << pt.xi << pt.upsilon;
            csv.end_row();
        }
    }
}

void write_series(const fs::path& path, const wigner::WignerDiagnostics& d) {
    CsvWriter csv(path, {"time", "mass", "absorbed", "negativity"});
    for (const auto& r : d.series) {
        csv << r.time << r.mass << r.absorbed << r.negativity;
        csv.end_row();
    }
}

}  // namespace chirplock::io
