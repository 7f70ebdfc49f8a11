#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairq/measures.hpp"
#include "fairq/transport.hpp"

namespace fairq {

// Shortest-round-trip-safe decimal with 17 significant digits.
std::string format_double(double v);

// Writes content to path via a sibling temporary file and a rename, so a
// reader never sees a partially written file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

// Renders equally long numeric columns as comma-separated text.
std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::span<const double>>& columns);

// Columns (x, value).
std::string density_to_csv(const DensityGrid1D& d);
// Columns (knot, value).
std::string cdf_to_csv(const Cdf& f);
// Columns (knot, value) with the level as the knot.
std::string quantile_to_csv(const QuantileFn& q);

// Parses an (x, value) CSV produced by density_to_csv. The x column must
// be a uniform grid.
DensityGrid1D density_from_csv(std::string_view text);

}  // namespace fairq
