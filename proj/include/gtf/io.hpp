#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gtf/errors.hpp"

namespace gtf {

/// Max-precision decimal formatting (%.17g) so numeric outputs round-trip
/// and re-runs are byte-identical.
std::string format_double(double v);

// Signal CSV: header "node,value", rows 0..n-1 in order.
void write_signal_csv(const std::string& path, const std::vector<double>& values);
std::vector<double> read_signal_csv(const std::string& path);

// Labels CSV: header "node,class".
void write_labels_csv(const std::string& path, const std::vector<int>& labels);
std::vector<std::pair<int, int>> read_labels_csv(const std::string& path);

/// Feature-matrix CSV: header row, one row of numeric features per node.
std::vector<std::vector<double>> read_features_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace gtf
