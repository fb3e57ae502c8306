#pragma once

// Plain-file exports. Numbers are written with 17 significant digits so that
// identical runs produce byte-identical files.

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chirplock/capture.hpp"
#include "chirplock/ladder.hpp"
#include "chirplock/wigner.hpp"

namespace chirplock::io {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string format_number(double v);

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header);

    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(int v);
    CsvWriter& operator<<(long v);
    CsvWriter& operator<<(bool v);
    CsvWriter& operator<<(std::string_view v);
    void end_row();

private:
    void separator();

    std::ofstream out_;
    bool row_started_ = false;
};

void write_text(const fs::path& path, std::string_view text);
void write_json(const fs::path& path, const Json& j);

Json to_json(const DimensionlessParams& d);
Json to_json(const LadderSettings& s);
Json to_json(const IntegratorDiagnostics& d);
Json to_json(const SimSettings& s);
Json to_json(const wigner::Axis& a);
Json to_json(const wigner::WignerDiagnostics& d);

// Long format: tau, n, re, im, population (= re^2 + im^2).
void write_populations(const fs::path& path, const LadderRun& run);

// p1, probability, separator, max_norm_drift, ok, error
void write_s_curve(const fs::path& path, const SCurve& curve);
Json s_curve_summary(const SCurve& curve);

// Raw little-endian float64 values (row-major, x outer) plus a JSON header at
// `<stem>.json` describing frame, axes, time and the xi/upsilon rescaling.
void write_field(const fs::path& stem, const wigner::PhaseSpaceField& f, double beta_bar);
wigner::PhaseSpaceField read_field(const fs::path& stem);

// branch, xi, upsilon
void write_separatrix(const fs::path& path, const std::vector<wigner::Polyline>& branches);

// time, mass, absorbed, negativity
void write_series(const fs::path& path, const wigner::WignerDiagnostics& d);

}  // namespace chirplock::io
