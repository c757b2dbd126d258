#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace abc {

// One parsed row of a results CSV, as relevant to plotting.
struct PlotRow {
  std::string detector;
  double snr_db = 0.0;
  double ber = 0.0;
};

// Parse a results CSV produced by write_csv. Throws config_error naming
// the offending line on malformed input.
std::vector<PlotRow> read_results_csv(std::istream& is);

// Render a BER-vs-SNR chart as a standalone SVG: logarithmic y axis
// clamped at 1e-6, one polyline per detector, legend. Zero-BER points
// are drawn on the floor with a distinct marker.
void write_svg(std::ostream& os, const std::vector<PlotRow>& rows,
               const std::string& title);

}  // namespace abc
