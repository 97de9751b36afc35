#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "causalflow/measures.hpp"

namespace causalflow {

// Curve CSV schema: columns
//   tau,i_lag,te,i_tot,i_xy,r_linear,r_wb,u_x,u_y,s,c[,effective_n]
// floats at 17 significant digits, footer comments `# tau_opt=...` and
// `# tau_res=...`. Infinite entries are written as `inf` and re-parsed.
void write_curve_csv(std::ostream& out, const DecompositionCurve& curve,
                     const std::vector<double>* effective_n = nullptr);

struct ParsedCurve {
    DecompositionCurve curve;
    std::vector<double> effective_n;  // empty unless the column is present
};

ParsedCurve read_curve_csv(std::istream& in);

// Minimal hand-emitted SVG line chart: one polyline per measure, legend
// matching the CSV column names, y axis labeled "nats". Coordinates at
// three decimals. Non-finite samples are dropped from their polyline.
void write_curve_svg(std::ostream& out, const DecompositionCurve& curve,
                     bool log_tau_axis);

// Write-to-temp-then-rename so failures never leave partial files behind.
void atomic_write_file(const std::string& path, const std::string& contents);

}  // namespace causalflow
