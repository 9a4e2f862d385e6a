#include <algorithm>
#include <limits>
#include <vector>

#include "msi/error.hpp"
#include "msi/scanner.hpp"

namespace msi {

Labels label_components(const std::vector<std::uint8_t>& mask, int ny, int nx) {
  Labels out;
  out.label.assign(mask.size(), 0);
  std::vector<int> stack;
  for (int start = 0; start < ny * nx; ++start) {
    if (!mask[static_cast<std::size_t>(start)] || out.label[static_cast<std::size_t>(start)]) continue;
    const int id = ++out.count;
    out.label[static_cast<std::size_t>(start)] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const int k = stack.back();
      stack.pop_back();
      const int iy = k / nx, ix = k % nx;
      const int nbr[4][2] = {{iy - 1, ix}, {iy + 1, ix}, {iy, ix - 1}, {iy, ix + 1}};
      for (const auto& [y, x] : nbr) {
        if (y < 0 || y >= ny || x < 0 || x >= nx) continue;
        const auto j = static_cast<std::size_t>(y) * nx + x;
        if (mask[j] && !out.label[j]) {
          out.label[j] = id;
          stack.push_back(static_cast<int>(j));
        }
      }
    }
  }
  return out;
}

std::vector<Island> extract_islands(const ScanGrid& grid) {
  if (grid.kind == ScanKind::slice) {
    throw ValidationError("extract_islands expects an ADI or MSI grid");
  }
  const int ny = grid.ny(), nx = grid.nx();
  const bool msi = grid.kind == ScanKind::msi;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(ny) * nx);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      mask[static_cast<std::size_t>(iy) * nx + ix] =
          msi ? grid.values(iy, ix) > 0 : grid.values(iy, ix) < 0;
  const Labels labels = label_components(mask, ny, nx);

  const auto xs = grid.x.samples(), ys = grid.y.samples();
  const auto wx = grid.x.cell_widths(), wy = grid.y.cell_widths();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<Island> islands(static_cast<std::size_t>(labels.count));
  for (auto& is : islands) {
    is.x_min = is.y_min = inf;
    is.x_max = is.y_max = -inf;
  }
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int l = labels.label[static_cast<std::size_t>(iy) * nx + ix];
      if (l == 0) continue;
      Island& is = islands[static_cast<std::size_t>(l - 1)];
      is.cells.emplace_back(iy, ix);
      is.area += wx[static_cast<std::size_t>(ix)] * wy[static_cast<std::size_t>(iy)];
      is.x_min = std::min(is.x_min, xs[static_cast<std::size_t>(ix)]);
      is.x_max = std::max(is.x_max, xs[static_cast<std::size_t>(ix)]);
      is.y_min = std::min(is.y_min, ys[static_cast<std::size_t>(iy)]);
      is.y_max = std::max(is.y_max, ys[static_cast<std::size_t>(iy)]);
      if (msi) {
        const double alt = grid.values(iy, ix);
        is.altitude_max = std::max(is.altitude_max.value_or(0.0), alt);
        if (alt >= kFullAltitude) is.full_altitude_region = true;
      }
    }
  }
  for (auto& is : islands) {
    if (grid.x.param == Param::tau) is.min_tau = is.x_min;
    else if (grid.y.param == Param::tau) is.min_tau = is.y_min;
    else is.min_tau = grid.fixed_value;
  }
  // Labels follow row-major first cells, so stable_sort keeps a
  // deterministic order among equal min_tau.
  std::stable_sort(islands.begin(), islands.end(), [](const Island& a, const Island& b) {
    if (a.min_tau != b.min_tau) return a.min_tau < b.min_tau;
    return a.y_min < b.y_min;
  });
  for (std::size_t i = 0; i < islands.size(); ++i) islands[i].id = static_cast<int>(i) + 1;
  return islands;
}

std::vector<int> sigma_run_violations(const ScanGrid& grid) {
  const bool sigma_on_y = grid.y.param == Param::sigma;
  if (!sigma_on_y && grid.x.param != Param::sigma) {
    throw ValidationError("sigma_run_violations needs a sigma axis");
  }
  const int lines = sigma_on_y ? grid.nx() : grid.ny();
  const int len = sigma_on_y ? grid.ny() : grid.nx();
  std::vector<int> out;
  for (int line = 0; line < lines; ++line) {
    int runs = 0;
    bool prev = false;
    for (int k = 0; k < len; ++k) {
      const double v = sigma_on_y ? grid.values(k, line) : grid.values(line, k);
      const bool neg = v < 0;
      if (neg && !prev) ++runs;
      prev = neg;
    }
    if (runs > 1) out.push_back(line);
  }
  return out;
}

}  // namespace msi
