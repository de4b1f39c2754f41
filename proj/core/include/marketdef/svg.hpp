#pragma once
// Standalone SVG scatter of the 2-component projection: one circle per
// product, fill color by cluster from a fixed 10-color palette, axis captions
// carrying the variance-explained fractions. Same inputs, same bytes.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "marketdef/matrix.hpp"

namespace marketdef {

std::string render_cluster_svg(const Matrix& scores, const std::vector<int>& labels,
                               const std::array<double, 2>& variance_explained);

void emit_svg(const Matrix& scores, const std::vector<int>& labels,
              const std::array<double, 2>& variance_explained,
              const std::filesystem::path& out);

} // namespace marketdef
