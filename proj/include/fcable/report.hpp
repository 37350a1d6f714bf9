#pragma once

#include "fcable/mesh.hpp"
#include "fcable/problems.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fcable {

/// CSV with the fixed header `H,h,error_l2,order,cpu_seconds`. Absent
/// values are empty fields; errors carry 6 significant digits, orders 4
/// decimals, timings 6 decimals.
std::string emit_csv(std::span<const ConvergenceRow> rows);
std::vector<ConvergenceRow> parse_csv(const std::string& text);

/// Plot-data dump of nodal values: one `x y value` line per node,
/// row-major, fixed point with 9 decimals.
void write_field(std::ostream& out, const Mesh2D& mesh, const std::vector<double>& nodal);
void write_field_file(const std::string& path, const Mesh2D& mesh,
                      const std::vector<double>& nodal);

}  // namespace fcable
