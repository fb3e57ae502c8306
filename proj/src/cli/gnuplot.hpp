#pragma once

// Companion gnuplot scripts. They only read the emitted data files.

#include <string>
#include <vector>

#include "chirplock/capture.hpp"
#include "chirplock/wigner.hpp"

namespace chirplock::cli::gnuplot {

std::string populations(const std::string& csv, const std::vector<double>& taus);
std::string s_curve(const std::string& csv, const SCurve& curve);
std::string threshold_map(const std::string& csv);
std::string width_map(const std::string& csv);
// One panel per snapshot stem; `scale` multiplies both axes (sqrt(beta) for xi, upsilon).
std::string wigner_panels(const std::vector<std::string>& stems, const std::vector<wigner::PhaseSpaceField>& fields,
                          double scale, const std::string& separatrix_csv);

}  // namespace chirplock::cli::gnuplot
