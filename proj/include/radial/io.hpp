#pragma once

#include <iosfwd>
#include <string>

#include "radial/measure.hpp"
#include "radial/transport.hpp"

namespace radial {

// Cloud files come in two shapes:
//   CSV:  header "x1,...,xn,weight", one atom per row
//   JSON: {"dim": n, "points": [[...], ...], "weights": [...]}
// Weights must sum to a positive value within 1% of one and are normalized
// exactly on load; anything else is rejected. Parse errors carry the file
// name and line number.

PointCloud load_cloud(const std::string& path);
PointCloud parse_cloud_csv(std::istream& in, const std::string& name);
PointCloud parse_cloud_json(const std::string& text, const std::string& name);

void save_cloud_csv(const std::string& path, const PointCloud& cloud);
void save_cloud_json(const std::string& path, const PointCloud& cloud);

Eigen::MatrixXd load_matrix_csv(const std::string& path);
void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

void save_plan_csv(const std::string& path, const TransportPlan& plan);

// Formats with 12 significant digits; the convention for all CLI tables and
// CSV output.
std::string format_g12(double x);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace radial
