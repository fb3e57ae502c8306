#include "gnuplot.hpp"

#include <fmt/format.h>

#include "chirplock/io.hpp"

namespace chirplock::cli::gnuplot {

using io::format_number;

std::string populations(const std::string& csv, const std::vector<double>& taus) {
    std::string s = fmt::format(
        "set datafile separator ','\n"
        "set style fill solid 0.8\n"
        "set boxwidth 0.8\n"
        "set xlabel 'n'\n"
        "set ylabel '|B_n|^2'\n"
        "set multiplot layout 1,{}\n",
        taus.size());
    for (double t : taus) {
        s += fmt::format("set title 'tau = {}'\n", format_number(t));
        s += fmt::format("plot '{}' every ::1 using 2:(abs($1 - {}) < 1e-9 ? $5 : 1/0) with boxes notitle\n", csv,
                         format_number(t));
    }
    s += "unset multiplot\n";
    return s;
}

std::string s_curve(const std::string& csv, const SCurve& curve) {
    std::string s = fmt::format(
        "set datafile separator ','\n"
        "set xlabel 'P_1'\n"
        "set ylabel 'P'\n"
        "set yrange [0:1]\n"
        "set title 'P_2 = {}'\n",
        format_number(curve.p2));
    if (curve.fitted) {
        s += fmt::format("set arrow from {0},0 to {0},1 nohead dashtype 2\n", format_number(curve.threshold));
    }
    s += fmt::format("plot '{}' every ::1 using 1:($5 > 0 ? $2 : 1/0) with linespoints pt 7 notitle\n", csv);
    return s;
}

std::string threshold_map(const std::string& csv) {
    return fmt::format(
        "set datafile separator ','\n"
        "set logscale x\n"
        "set xlabel 'P_2'\n"
        "set ylabel 'P_1^{{cr}}'\n"
        "set key top right\n"
        "plot '{0}' every ::1 using 1:2:3 with yerrorbars pt 7 title 'simulation', \\\n"
        "     '{0}' every ::1 using 1:4 with lines dashtype 2 title 'ladder climbing', \\\n"
        "     '{0}' every ::1 using 1:5 with lines dashtype 4 title 'autoresonance'\n",
        csv);
}

std::string width_map(const std::string& csv) {
    return fmt::format(
        "set datafile separator ','\n"
        "set logscale x\n"
        "set xlabel 'P_2'\n"
        "set ylabel 'Delta P_1'\n"
        "plot '{0}' every ::1 using 1:2:3 with yerrorbars pt 7 title 'simulation', \\\n"
        "     '{0}' every ::1 using 1:4 with lines dashtype 2 title 'ladder climbing', \\\n"
        "     '{0}' every ::1 using 1:5 with lines dashtype 4 title 'autoresonance'\n",
        csv);
}

std::string wigner_panels(const std::vector<std::string>& stems, const std::vector<wigner::PhaseSpaceField>& fields,
                          double scale, const std::string& separatrix_csv) {
    std::string s = fmt::format(
        "set datafile separator ','\n"
        "set view map\n"
        "set size ratio -1\n"
        "set palette defined (-1 'blue', 0 'white', 1 'red')\n"
        "# fields are stored x-major, so the image shows u (or P) across and x (or Q) up\n"
        "set xlabel 'u'\n"
        "set ylabel 'x'\n"
        "set multiplot layout 1,{}\n",
        stems.size());
    for (std::size_t k = 0; k < stems.size(); ++k) {
        const auto& f = fields[k];
        s += fmt::format("set title 't = {}'\n", format_number(f.time));
        s += fmt::format(
            "plot '{}.bin' binary array=({},{}) format='%float64' dx={} dy={} origin=({},{}) with image notitle",
            stems[k], f.p.points, f.x.points, format_number(scale * f.p.spacing()),
            format_number(scale * f.x.spacing()), format_number(scale * f.p.min), format_number(scale * f.x.min));
        if (!separatrix_csv.empty()) {
            s += fmt::format(", \\\n     '{}' every ::1 using 3:2 with lines dashtype 2 lc 'black' notitle", separatrix_csv);
        }
        s += "\n";
    }
    s += "unset multiplot\n";
    return s;
}

}  // namespace chirplock::cli::gnuplot
