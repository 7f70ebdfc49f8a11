#include "fairq/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "fairq/errors.hpp"

namespace fairq {

std::string format_double(double v) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::span<const double>>& columns) {
  if (header.size() != columns.size()) {
    throw ValidationError("csv header and column count differ");
  }
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw ValidationError("csv columns differ in length");
  }
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += header[j];
  }
  out += '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out += ',';
      out += format_double(columns[j][i]);
    }
    out += '\n';
  }
  return out;
}

std::string density_to_csv(const DensityGrid1D& d) {
  std::vector<double> xs(d.grid().n_nodes());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = d.grid().node(i);
  return render_csv({"x", "value"}, {xs, d.values()});
}

std::string cdf_to_csv(const Cdf& f) {
  return render_csv({"knot", "value"}, {f.knots(), f.values()});
}

std::string quantile_to_csv(const QuantileFn& q) {
  return render_csv({"knot", "value"}, {q.levels(), q.values()});
}

DensityGrid1D density_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "x,value") {
    throw ValidationError("density csv must start with header 'x,value'");
  }
  std::vector<double> xs;
  std::vector<double> vs;
  auto parse = [](std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ValidationError("bad number in density csv: " + std::string(s));
    }
    return v;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("malformed csv row");
    xs.push_back(parse(std::string_view(line).substr(0, comma)));
    vs.push_back(parse(std::string_view(line).substr(comma + 1)));
  }
  if (xs.size() < 3) throw ValidationError("density csv needs >= 3 rows");
  GridGeometry grid(xs.front(), xs.back(), xs.size() - 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - grid.node(i)) > 1e-9 * (1.0 + std::abs(xs[i]))) {
      throw GeometryError("density csv x column is not a uniform grid");
    }
  }
  return DensityGrid1D(grid, std::move(vs));
}

}  // namespace fairq
