#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "msi/error.hpp"
#include "msi/msf.hpp"

namespace msi {

namespace {

// Chebyshev points x_j = cos(pi j / N) and the differentiation matrix on
// them (Trefethen, Spectral Methods in MATLAB, cheb.m).
Eigen::MatrixXd chebyshev_differentiation(int n) {
  const int size = n + 1;
  Eigen::VectorXd x(size), c(size);
  for (int j = 0; j <= n; ++j) {
    x(j) = std::cos(std::numbers::pi * j / n);
    c(j) = ((j == 0 || j == n) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(size, size);
  for (int i = 0; i <= n; ++i) {
    double row = 0.0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      d(i, j) = (c(i) / c(j)) / (x(i) - x(j));
      row += d(i, j);
    }
    d(i, i) = -row;
  }
  return d;
}

// Discretized infinitesimal generator of the solution semigroup of
// z'(t) = A0 z(t) + A1 z(t - tau) on nodes theta_j = tau/2 (x_j - 1).
Eigen::MatrixXd collocation_generator(const Eigen::MatrixXd& a0,
                                      const Eigen::MatrixXd& a1, double tau,
                                      int n) {
  const auto m = a0.rows();
  const Eigen::MatrixXd d = chebyshev_differentiation(n) * (2.0 / tau);
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero((n + 1) * m, (n + 1) * m);
  gen.block(0, 0, m, m) = a0;
  gen.block(0, n * m, m, m) += a1;
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double v = d(i, j);
      for (Eigen::Index k = 0; k < m; ++k) gen(i * m + k, j * m + k) = v;
    }
  }
  return gen;
}

struct Refined {
  Complex root;
  bool converged = false;
};

// Newton on f(mu) = det M(mu), M(mu) = mu I - A0 - A1 e^{-mu tau}. With
// f'/f = tr(M^-1 M') the step needs no determinant.
Refined newton_refine(const Eigen::MatrixXcd& a0, const Eigen::MatrixXcd& a1,
                      double tau, Complex mu) {
  const auto m = a0.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m, m);
  for (int it = 0; it < 50; ++it) {
    const Complex e = std::exp(-mu * tau);
    const Eigen::MatrixXcd mm = mu * id - a0 - a1 * e;
    const Eigen::MatrixXcd dm = id + tau * e * a1;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(mm);
    const Complex tr = lu.solve(dm).trace();
    if (!std::isfinite(tr.real()) || !std::isfinite(tr.imag()) || tr == 0.0) {
      // M(mu) is singular to working precision: mu is a root.
      return {mu, std::isfinite(mu.real()) && std::isfinite(mu.imag())};
    }
    const Complex step = 1.0 / tr;
    mu -= step;
    if (!std::isfinite(mu.real()) || !std::isfinite(mu.imag())) return {mu, false};
    if (std::abs(step) < 1e-12 * std::max(1.0, std::abs(mu))) return {mu, true};
  }
  return {mu, false};
}

}  // namespace

double determinant_residual(const Eigen::MatrixXd& df, const Eigen::MatrixXd& h,
                            double tau, double sigma, double lambda, Complex mu) {
  const auto m = df.rows();
  const Eigen::MatrixXcd a0 = (df - sigma * h).cast<Complex>();
  const Eigen::MatrixXcd a1 = (sigma * lambda * h).cast<Complex>() * std::exp(-mu * tau);
  const Eigen::MatrixXcd mm = mu * Eigen::MatrixXcd::Identity(m, m) - a0 - a1;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mm);
  const double smin = svd.singularValues()(m - 1);
  return smin / std::max(1.0, a0.norm() + a1.norm() + std::abs(mu));
}

MsfValue spectral_rightmost_root(const Eigen::MatrixXd& df, const Eigen::MatrixXd& h,
                                 double tau, double sigma, double lambda,
                                 const SpectralOptions& options) {
  if (!(tau > 0)) throw ValidationError("spectral_rightmost_root requires tau > 0");
  if (df.rows() != df.cols() || h.rows() != h.cols() || df.rows() != h.rows()) {
    throw ValidationError("DF and H must be square matrices of the same dimension");
  }
  const Eigen::MatrixXd a0 = df - sigma * h;
  const Eigen::MatrixXd a1 = sigma * lambda * h;
  const Eigen::MatrixXcd a0c = a0.cast<Complex>();
  const Eigen::MatrixXcd a1c = a1.cast<Complex>();

  std::optional<Complex> previous;
  std::optional<Complex> best_overall;
  ComplexList last_estimates;
  for (int n = options.initial_nodes;; n *= 2) {
    n = std::min(n, options.max_nodes);
    const Eigen::MatrixXd gen = collocation_generator(a0, a1, tau, n);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(gen, false);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("spectral discretization eigensolver failed at N=" + std::to_string(n));
    }
    ComplexList est(solver.eigenvalues().begin(), solver.eigenvalues().end());
    std::sort(est.begin(), est.end(),
              [](Complex x, Complex y) { return x.real() > y.real(); });
    est.resize(std::min<std::size_t>(est.size(), static_cast<std::size_t>(options.candidates)));
    last_estimates = est;

    std::optional<Complex> best;
    for (const Complex guess : est) {
      const Refined r = newton_refine(a0c, a1c, tau, guess);
      if (!r.converged) continue;
      if (determinant_residual(df, h, tau, sigma, lambda, r.root) > 1e-8) continue;
      if (!best || r.root.real() > best->real()) best = r.root;
    }
    if (best) best_overall = best;
    const bool settled = best && previous &&
                         std::abs(*best - *previous) < options.tolerance;
    if (settled || n >= options.max_nodes) break;
    if (best) previous = best;
  }

  if (!best_overall) {
    std::ostringstream os;
    os.precision(12);
    os << "Newton refinement diverged for all candidates; unrefined estimates:";
    for (const auto& e : last_estimates) os << ' ' << e;
    throw NumericalError(os.str());
  }
  // Report the conjugate with non-negative imaginary part.
  Complex root = *best_overall;
  if (root.imag() < 0) root = std::conj(root);
  MsfValue out;
  out.method = MsfMethod::spectral;
  out.dominant_root = root;
  out.omega = root.real();
  out.residual = determinant_residual(df, h, tau, sigma, lambda, root);
  return out;
}

}  // namespace msi
