#include "msi/dde.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "msi/error.hpp"

namespace msi {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::decayed: return "decayed";
    case Verdict::persistent: return "persistent";
    case Verdict::diverged: return "diverged";
  }
  return "unknown";
}

double default_step(double tau) {
  if (!(tau > 0)) return 1e-3;
  const double k = std::max(100.0, std::ceil(tau / 1e-3 - 1e-9));
  return tau / k;
}

double default_t_max(double tau) { return std::max(50.0 * tau, 500.0); }

Verdict classify(std::span<const double> d) {
  if (d.empty()) throw ValidationError("classify: empty series");
  if (std::any_of(d.begin(), d.end(), [](double v) { return !(v <= kDivergeThreshold); })) {
    return Verdict::diverged;
  }
  const std::size_t tail = std::max<std::size_t>(1, d.size() / 10);
  const double final_max = *std::max_element(d.end() - static_cast<std::ptrdiff_t>(tail), d.end());
  return final_max < kDecayThreshold ? Verdict::decayed : Verdict::persistent;
}

double envelope_growth_rate(std::span<const double> t, std::span<const double> d) {
  const std::size_t n = std::min(t.size(), d.size());
  if (n < 4) return std::nan("");
  const double t_end = t[n - 1];
  const std::size_t first = static_cast<std::size_t>(
      std::lower_bound(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(n), 0.5 * t_end) - t.begin());
  const std::size_t len = n - first;
  // Maxima over blocks smooth out oscillation of d within a period.
  const std::size_t blocks = len >= 64 ? 32 : len;
  const std::size_t block_len = len / blocks;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t used = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = first + b * block_len;
    const std::size_t hi = b + 1 == blocks ? n : lo + block_len;
    std::size_t arg = lo;
    for (std::size_t k = lo; k < hi; ++k)
      if (d[k] > d[arg]) arg = k;
    if (!(d[arg] > 0)) continue;
    const double x = t[arg], y = std::log(d[arg]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++used;
  }
  if (used < 2) return std::nan("");
  const double m = static_cast<double>(used);
  const double denom = m * sxx - sx * sx;
  return denom > 0 ? (m * sxy - sx * sy) / denom : std::nan("");
}

namespace {

enum class Mode { nonlinear, variational };

struct Prepared {
  int n = 0, m = 0;
  double step = 0, t_max = 0;
  long k = 0;  // delay in steps
  long steps = 0;
  Eigen::VectorXd initial;  // flat n*m
  std::uint64_t seed = 0;
};

Prepared prepare(const SimConfig& cfg) {
  Prepared p;
  p.m = cfg.model.dimension;
  p.n = static_cast<int>(cfg.g.rows());
  if (p.n < 1 || cfg.g.cols() != p.n) throw ValidationError("coupling matrix must be square");
  if (cfg.h.rows() != p.m || cfg.h.cols() != p.m) {
    throw ValidationError("H must be " + std::to_string(p.m) + "x" + std::to_string(p.m));
  }
  if (cfg.fp.state.size() != p.m) throw ValidationError("fixed point dimension mismatch");
  if (!std::isfinite(cfg.tau) || cfg.tau < 0) throw ValidationError("tau must be finite and >= 0");
  if (!std::isfinite(cfg.sigma) || cfg.sigma < 0) throw ValidationError("sigma must be finite and >= 0");

  p.step = cfg.step > 0 ? cfg.step : default_step(cfg.tau);
  p.t_max = cfg.t_max > 0 ? cfg.t_max : default_t_max(cfg.tau);
  if (cfg.tau > 0) {
    const double ratio = cfg.tau / p.step;
    p.k = std::lround(ratio);
    if (std::abs(ratio - static_cast<double>(p.k)) > 1e-9 * ratio) {
      throw ValidationError("step must divide tau exactly (tau = K h)");
    }
    if (p.k < 10) throw ValidationError("tau must span at least 10 steps");
    if (p.t_max < 20 * cfg.tau) throw ValidationError("t_max must be at least 20 tau");
  }
  p.steps = std::lround(std::ceil(p.t_max / p.step - 1e-9));

  p.initial.resize(p.n * p.m);
  const auto& pert = cfg.perturbation;
  p.seed = pert.seed;
  if (!pert.per_node.empty()) {
    if (static_cast<int>(pert.per_node.size()) != p.n) {
      throw ValidationError("perturbation needs one vector per node");
    }
    for (int i = 0; i < p.n; ++i) {
      if (pert.per_node[static_cast<std::size_t>(i)].size() != p.m) {
        throw ValidationError("perturbation vector dimension mismatch");
      }
      p.initial.segment(i * p.m, p.m) = pert.per_node[static_cast<std::size_t>(i)];
    }
  } else {
    std::mt19937_64 rng(pert.seed);
    std::uniform_real_distribution<double> dist(-pert.magnitude, pert.magnitude);
    for (Eigen::Index k = 0; k < p.initial.size(); ++k) p.initial(k) = dist(rng);
  }
  return p;
}

SimResult integrate(const SimConfig& cfg, Mode mode) {
  const Prepared p = prepare(cfg);
  const int n = p.n, m = p.m;
  const Eigen::Index size = static_cast<Eigen::Index>(n) * m;
  const double h = p.step;
  const Eigen::MatrixXd sh = cfg.sigma * cfg.h;
  const Eigen::VectorXd row_sums = cfg.g.rowwise().sum();
  const Eigen::MatrixXd& df = cfg.fp.jacobian_at_state;
  const Eigen::VectorXd& s = cfg.fp.state;

  Eigen::VectorXd origin(size);
  for (int i = 0; i < n; ++i) origin.segment(i * m, m) = mode == Mode::nonlinear ? s : Eigen::VectorXd::Zero(m);
  const Eigen::VectorXd x0 = origin + p.initial;

  // dx_i = F(x_i) + sigma H (sum_j g_ij xdel_j - rowsum_i x_i)
  Eigen::VectorXd mixed(size);
  auto rhs = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& xdel, Eigen::VectorXd& out) {
    for (int i = 0; i < n; ++i) {
      auto xi = x.segment(i * m, m);
      auto oi = out.segment(i * m, m);
      if (mode == Mode::nonlinear) {
        cfg.model.vector_field(std::span<const double>(xi.data(), static_cast<std::size_t>(m)),
                               std::span<double>(oi.data(), static_cast<std::size_t>(m)));
      } else {
        oi.noalias() = df * xi;
      }
      auto acc = mixed.segment(i * m, m);
      acc = -row_sums(i) * xi;
      for (int j = 0; j < n; ++j) {
        const double gij = cfg.g(i, j);
        if (gij != 0.0) acc += gij * xdel.segment(j * m, m);
      }
      oi.noalias() += sh * acc;
    }
  };

  auto deviation = [&](const Eigen::VectorXd& x) {
    return (x - origin).cwiseAbs().maxCoeff();
  };

  const long slots = p.k + 1;
  std::vector<Eigen::VectorXd> hist_x(static_cast<std::size_t>(slots), x0);
  std::vector<Eigen::VectorXd> hist_d(static_cast<std::size_t>(slots), Eigen::VectorXd::Zero(size));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(size);
  auto state_at = [&](long j) -> const Eigen::VectorXd& {
    return j < 0 ? x0 : hist_x[static_cast<std::size_t>(j % slots)];
  };
  auto deriv_at = [&](long j) -> const Eigen::VectorXd& {
    return j < 0 ? zero : hist_d[static_cast<std::size_t>(j % slots)];
  };

  SimResult res;
  res.seed = p.seed;
  res.step = h;
  res.t_max = p.t_max;
  res.delay_steps = p.k;
  res.times.reserve(static_cast<std::size_t>(p.steps) + 1);
  res.deviation.reserve(static_cast<std::size_t>(p.steps) + 1);

  Eigen::VectorXd x = x0, k1(size), k2(size), k3(size), k4(size), stage(size), mid(size);
  res.times.push_back(0.0);
  res.deviation.push_back(deviation(x));
  const double upper = mode == Mode::nonlinear ? kDivergeThreshold : 1e200;
  const double lower = mode == Mode::nonlinear ? 0.0 : 1e-200;

  for (long step = 0; step < p.steps; ++step) {
    if (p.k == 0) {
      rhs(x, x, k1);
      stage = x + 0.5 * h * k1;
      rhs(stage, stage, k2);
      stage = x + 0.5 * h * k2;
      rhs(stage, stage, k3);
      stage = x + h * k3;
      rhs(stage, stage, k4);
    } else {
      const long j0 = step - p.k, j1 = j0 + 1;
      rhs(x, state_at(j0), k1);
      hist_d[static_cast<std::size_t>(step % slots)] = k1;
      // Cubic Hermite midpoint between stored steps j0 and j1.
      mid = 0.5 * (state_at(j0) + state_at(j1)) + (h / 8.0) * (deriv_at(j0) - deriv_at(j1));
      stage = x + 0.5 * h * k1;
      rhs(stage, mid, k2);
      stage = x + 0.5 * h * k2;
      rhs(stage, mid, k3);
      stage = x + h * k3;
      rhs(stage, state_at(j1), k4);
    }
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) {
      throw NumericalError("non-finite state at step " + std::to_string(step + 1));
    }
    if (p.k > 0) hist_x[static_cast<std::size_t>((step + 1) % slots)] = x;

    const double d = deviation(x);
    res.times.push_back(static_cast<double>(step + 1) * h);
    res.deviation.push_back(d);
    if (d > upper || d < lower) break;
  }

  res.verdict = classify(res.deviation);
  if (mode == Mode::variational) res.growth_rate = envelope_growth_rate(res.times, res.deviation);
  return res;
}

}  // namespace

SimResult simulate_network(const SimConfig& cfg) { return integrate(cfg, Mode::nonlinear); }

SimResult simulate_variational(const SimConfig& cfg) { return integrate(cfg, Mode::variational); }

}  // namespace msi
