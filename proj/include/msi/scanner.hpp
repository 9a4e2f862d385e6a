#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msi/msf.hpp"

namespace msi {

enum class Param { tau, sigma, lambda };
enum class ScanKind { adi, msi, slice };

std::string_view to_string(Param p);
std::string_view to_string(ScanKind k);
Param parse_param(std::string_view name);

/// Sample axis. Samples are min + (max - min) * u^grading for u evenly
/// spaced on [0, 1]; grading 1 is a uniform grid, grading > 1 concentrates
/// samples near min. A degenerate axis has min == max and count == 1.
struct Axis {
  Param param = Param::tau;
  double min = 0.0;
  double max = 0.0;
  int count = 2;
  double grading = 1.0;

  double at(int i) const;
  std::vector<double> samples() const;
  /// Width of the dual cell around each sample (half-distance to neighbours).
  /// A degenerate axis has a single unit-width cell.
  std::vector<double> cell_widths() const;
  void validate() const;
};

/// Parses "min:max:count" or "min:max:count:grading".
Axis parse_axis(Param param, std::string_view text);

struct ScanDiagnostics {
  // MSI: cells whose stable lambda-set is not one interval ending at 1.
  std::vector<std::pair<int, int>> multi_interval_cells;   // (iy, ix)
  std::vector<std::pair<int, int>> excludes_one_cells;     // (iy, ix)
  std::vector<std::string> warnings;
};

struct ScanGrid {
  Axis x;
  Axis y;
  Param fixed_param = Param::lambda;
  double fixed_value = 1.0;
  ScanKind kind = ScanKind::adi;
  Eigen::MatrixXd values;              // count_y x count_x
  std::vector<std::uint8_t> active;    // slices only, row-major like values
  int active_regions = 0;              // slices only
  ScanDiagnostics diagnostics;

  int nx() const { return x.count; }
  int ny() const { return y.count; }
  bool is_active(int iy, int ix) const {
    return !active.empty() && active[static_cast<std::size_t>(iy) * nx() + ix] != 0;
  }
};

struct ScanOptions {
  int workers = 1;
};

/// Runs f(i) for i in [0, n) on `workers` threads. Every index is written
/// by exactly one call, so results never depend on the worker count. The
/// exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& f);

/// Omega(tau, sigma, 1) over tau (x) by sigma (y).
ScanGrid scan_adi(const MasterStability& msf, const Axis& tau_axis,
                  const Axis& sigma_axis, const ScanOptions& options = {});

struct LambdaInterval {
  std::vector<std::pair<double, double>> intervals;  // disjoint, ascending
  double total_measure = 0.0;
  bool is_single_interval_to_one = false;
  bool contains_one = false;
};

inline constexpr int kLambdaSamples = 401;
inline constexpr double kLambdaBisectionTol = 1e-6;

/// I_lambda(sigma, tau) = {lambda in [-1, 1] : Omega < 0}.
LambdaInterval lambda_interval(const MasterStability& msf, double tau,
                               double sigma);

/// Altitude = measure of I_lambda on cells where lambda = 1 is stable, 0
/// elsewhere.
ScanGrid scan_msi(const MasterStability& msf, const Axis& tau_axis,
                  const Axis& sigma_axis, const ScanOptions& options = {});

/// Omega over (x, lambda) with the other coupling parameter held at
/// `fixed_value`. A cell is active when every cell from it up to lambda = 1
/// in the same column is negative; active_regions counts the 4-connected
/// components of active cells.
ScanGrid scan_slice(const MasterStability& msf, Param fixed_param,
                    double fixed_value, const Axis& x_axis, int lambda_count,
                    const ScanOptions& options = {});

struct Island {
  int id = 0;  // 1-based, ascending min_tau
  std::vector<std::pair<int, int>> cells;  // (iy, ix)
  double area = 0.0;
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
  double min_tau = 0.0;
  std::optional<double> altitude_max;  // MSI grids only
  bool full_altitude_region = false;
};

/// 4-connected components of Omega < 0 (adi) or altitude > 0 (msi).
std::vector<Island> extract_islands(const ScanGrid& grid);

struct Labels {
  std::vector<int> label;  // row-major, 0 = background, components 1..count
  int count = 0;
};

/// 4-connected component labelling of a row-major ny x nx mask. Components
/// are numbered in order of their first cell in row-major order.
Labels label_components(const std::vector<std::uint8_t>& mask, int ny, int nx);

/// Column indices (along tau) whose negative-Omega cells along sigma form
/// more than one run.
std::vector<int> sigma_run_violations(const ScanGrid& adi_grid);

/// Altitude threshold for "I_lambda = [-1, 1]".
inline constexpr double kFullAltitude = 2.0 - 1e-9;

}  // namespace msi
