#include "msi/msf.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "msi/error.hpp"
#include "msi/lambert_w.hpp"

namespace msi {

std::string_view to_string(MsfMethod method) {
  switch (method) {
    case MsfMethod::lambert: return "lambert";
    case MsfMethod::spectral: return "spectral";
    case MsfMethod::closed_form: return "closed_form";
  }
  return "unknown";
}

void validate(const MsfQuery& q) {
  if (!std::isfinite(q.tau) || q.tau < 0) {
    throw ValidationError("tau must be finite and >= 0, got " + std::to_string(q.tau));
  }
  if (!std::isfinite(q.sigma) || q.sigma < 0) {
    throw ValidationError("sigma must be finite and >= 0, got " + std::to_string(q.sigma));
  }
  if (!(q.lambda >= -1.0 && q.lambda <= 1.0)) {
    throw ValidationError("lambda must lie in [-1, 1], got " + std::to_string(q.lambda));
  }
}

namespace {

// b e^{-mu tau} without overflowing the exponential when b is tiny.
Complex delayed_term(Complex b, Complex mu, double tau) {
  if (b == 0.0) return 0.0;
  return std::exp(std::log(b) - mu * tau);
}

}  // namespace

double scalar_residual(Complex mu, Complex mu_df, Complex mu_h, double tau,
                       double sigma, double lambda) {
  return std::abs(mu - mu_df + sigma * mu_h -
                  delayed_term(sigma * lambda * mu_h, mu, tau));
}

Complex scalar_root(Complex mu_df, Complex mu_h, double tau, double sigma,
                    double lambda) {
  if (!(tau > 0)) throw ValidationError("scalar_root requires tau > 0");
  const Complex a = mu_df - sigma * mu_h;
  const Complex b = sigma * lambda * mu_h;
  if (b == 0.0) return a;

  // mu = a + W0(b tau e^{-a tau}) / tau, with the argument kept in log form.
  // lambda enters its own log so denormal values do not underflow b tau.
  const Complex log_arg = std::log(sigma * mu_h * tau) + std::log(Complex(lambda)) - a * tau;
  Complex mu = a + lambert_w0_from_log(log_arg).value / tau;

  // Polish on the characteristic equation itself; W is accurate relative to
  // |W| but mu suffers cancellation when |a| is large.
  auto f = [&](Complex x) { return x - a - delayed_term(b, x, tau); };
  double res = std::abs(f(mu));
  for (int it = 0; it < 4 && res > 0; ++it) {
    const Complex e = delayed_term(b, mu, tau);
    const Complex step = (mu - a - e) / (1.0 + tau * e);
    const Complex next = mu - step;
    const double next_res = std::abs(f(next));
    if (!(next_res < res)) break;
    mu = next;
    res = next_res;
  }
  return mu;
}

MasterStability::MasterStability(Eigen::MatrixXd df, Eigen::MatrixXd h,
                                 SpectralOptions spectral)
    : df_(std::move(df)), h_(std::move(h)), spectral_(spectral) {
  pair_ = try_commuting_pair(df_, h_);
  const auto spectrum = eigendecompose(df_).eigenvalues;
  uncoupled_growth_ = spectrum.empty() ? 0.0 : spectrum.front().real();
}

MsfValue MasterStability::eval(const MsfQuery& q) const {
  validate(q);
  if (q.tau == 0.0) return eval_delay_free(q);
  if (pair_) return eval_lambert(q);
  return eval_spectral(q);
}

MsfValue MasterStability::eval_delay_free(const MsfQuery& q) const {
  MsfValue out;
  out.method = MsfMethod::closed_form;
  if (pair_) {
    // tau = 0: mu = mu_df + sigma (lambda - 1) mu_h per mode.
    bool first = true;
    for (std::size_t l = 0; l < pair_->mu_df.size(); ++l) {
      const Complex mu = pair_->mu_df[l] + q.sigma * (q.lambda - 1.0) * pair_->mu_h[l];
      if (first || mu.real() > out.omega) {
        out.omega = mu.real();
        out.dominant_root = mu;
        out.mode_index = static_cast<int>(l);
        first = false;
      }
    }
    return out;
  }
  const Eigen::MatrixXd a = df_ + q.sigma * (q.lambda - 1.0) * h_;
  const auto spectrum = eigendecompose(a).eigenvalues;
  out.dominant_root = spectrum.front();
  out.omega = out.dominant_root.real();
  return out;
}

MsfValue MasterStability::eval_lambert(const MsfQuery& q) const {
  validate(q);
  if (!pair_) throw ValidationError("DF and H do not co-diagonalize; Lambert path unavailable");
  if (q.tau == 0.0) return eval_delay_free(q);
  MsfValue out;
  out.method = MsfMethod::lambert;
  bool first = true;
  for (std::size_t l = 0; l < pair_->mu_df.size(); ++l) {
    const Complex mu = scalar_root(pair_->mu_df[l], pair_->mu_h[l], q.tau, q.sigma, q.lambda);
    const double scale = std::max(1.0, std::abs(pair_->mu_df[l]) +
                                           q.sigma * std::abs(pair_->mu_h[l]) * (1.0 + std::abs(q.lambda)));
    const double res = scalar_residual(mu, pair_->mu_df[l], pair_->mu_h[l], q.tau, q.sigma, q.lambda);
    if (!(res <= kScalarResidualTolerance * scale)) {
      std::ostringstream os;
      os.precision(17);
      os << "characteristic root for mode " << l << " fails its residual check (" << res
         << ") at tau=" << q.tau << " sigma=" << q.sigma << " lambda=" << q.lambda;
      throw NumericalError(os.str());
    }
    // Smallest mode index wins ties, including conjugate pairs that differ
    // only by roundoff.
    const double tie = 1e-13 * (1.0 + std::abs(out.omega));
    if (first || mu.real() > out.omega + tie) {
      out.omega = mu.real();
      out.dominant_root = mu;
      out.mode_index = static_cast<int>(l);
      first = false;
    }
  }
  if (!std::isfinite(out.omega)) {
    throw NumericalError("non-finite MSF value at tau=" + std::to_string(q.tau) +
                         " sigma=" + std::to_string(q.sigma) +
                         " lambda=" + std::to_string(q.lambda));
  }
  const auto l = static_cast<std::size_t>(*out.mode_index);
  out.residual = scalar_residual(out.dominant_root, pair_->mu_df[l], pair_->mu_h[l],
                                 q.tau, q.sigma, q.lambda);
  return out;
}

MsfValue MasterStability::eval_spectral(const MsfQuery& q) const {
  validate(q);
  if (q.tau == 0.0) return eval_delay_free(q);
  return spectral_rightmost_root(df_, h_, q.tau, q.sigma, q.lambda, spectral_);
}

}  // namespace msi
