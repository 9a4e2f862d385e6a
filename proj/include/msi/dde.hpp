#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "msi/models.hpp"
#include "msi/network.hpp"

namespace msi {

enum class Verdict { decayed, persistent, diverged };
std::string_view to_string(Verdict v);

inline constexpr double kDecayThreshold = 1e-8;
inline constexpr double kDivergeThreshold = 1e6;

struct Perturbation {
  // Explicit per-node offsets x_i(t <= 0) - s. When empty, each component is
  // drawn uniformly from [-magnitude, magnitude] with the given seed.
  std::vector<Eigen::VectorXd> per_node;
  double magnitude = 1e-3;
  std::uint64_t seed = 1;
};

struct SimConfig {
  SystemModel model;
  FixedPoint fp;
  Eigen::MatrixXd g;  // row-normalized coupling matrix
  Eigen::MatrixXd h;
  double tau = 0.0;
  double sigma = 0.0;
  double step = 0.0;   // 0 selects default_step(tau)
  double t_max = 0.0;  // 0 selects default_t_max(tau)
  Perturbation perturbation;
};

/// tau / K with K = max(100, ceil(tau / 1e-3)); 1e-3 for tau = 0.
double default_step(double tau);
/// max(50 tau, 500).
double default_t_max(double tau);

struct SimResult {
  std::vector<double> times;
  std::vector<double> deviation;  // d(t) = max_i ||x_i(t) - s||_inf
  Verdict verdict = Verdict::persistent;
  double growth_rate = 0.0;  // variational mode only
  std::uint64_t seed = 0;
  double step = 0.0;
  double t_max = 0.0;
  long delay_steps = 0;  // K
};

/// Full nonlinear delay-coupled network, fixed-step RK4 with the delayed
/// state read K steps back. Stops once d exceeds kDivergeThreshold.
SimResult simulate_network(const SimConfig& cfg);

/// Linearized network around s. The growth rate is a least-squares slope of
/// log d over block maxima of the final half of the run.
SimResult simulate_variational(const SimConfig& cfg);

/// diverged if any value exceeds 1e6; decayed if the final 10% stays below
/// 1e-8; persistent otherwise.
Verdict classify(std::span<const double> d);

/// Envelope slope of log d over [t_end / 2, t_end].
double envelope_growth_rate(std::span<const double> t, std::span<const double> d);

}  // namespace msi
