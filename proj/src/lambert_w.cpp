#include "msi/lambert_w.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace msi {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kInvE = 1.0 / std::numbers::e;
constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Above this real part of log z the argument itself is not formed.
constexpr double kLogArgumentLimit = 600.0;

std::string describe(Complex z, Complex w, double residual) {
  std::ostringstream os;
  os.precision(17);
  os << "lambert_w0 did not converge for z = " << z << " (last iterate " << w
     << ", residual " << residual << ")";
  return os.str();
}

Complex initial_guess(Complex z) {
  // Series around the branch point -1/e.
  if (std::abs(z + kInvE) < 0.3) {
    const Complex p = std::sqrt(2.0 * (kE * z + 1.0));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
  }
  // Pade approximant around 0.
  if (z.real() > -1.0 && z.real() < 1.5 && std::abs(z.imag()) < 1.0 &&
      z.real() > -2.5 * std::abs(z.imag()) - 0.2) {
    return z * (3.0 + z * (6.0 + z)) / (3.0 + z * (9.0 + 5.0 * z));
  }
  // Asymptotic log z - log log z.
  const Complex l1 = std::log(z);
  const Complex l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

LambertWError::LambertWError(Complex z, Complex last_iterate, double residual)
    : NumericalError(describe(z, last_iterate, residual)),
      z_(z),
      last_(last_iterate),
      residual_(residual) {}

WResult lambert_w0(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw LambertWError(z, Complex(std::nan(""), 0.0), std::nan(""));
  }
  // Points on the cut take the value from above.
  if (z.imag() == 0.0) z = Complex(z.real(), 0.0);
  if (z == 0.0) return {0.0, 0, 0.0};
  if (std::abs(z + kInvE) < 4 * kEps) return {-1.0, 0, std::abs(-kInvE - z)};

  const double scale = std::max(1.0, std::abs(z));
  Complex w = initial_guess(z);
  double residual = std::abs(w * std::exp(w) - z);
  for (int it = 1; it <= kLambertMaxIterations; ++it) {
    const Complex ew = std::exp(w);
    const Complex f = w * ew - z;
    const Complex wp1 = w + 1.0;
    const Complex denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0) break;
    const Complex delta = f / denom;
    w -= delta;
    residual = std::abs(w * std::exp(w) - z);
    // Near the branch point the step stagnates at roundoff while the
    // residual is already at machine precision.
    if (std::abs(delta) < 1e-14 * (1.0 + std::abs(w)) ||
        residual <= 2 * kEps * scale) {
      return {w, it, residual};
    }
  }
  throw LambertWError(z, w, residual);
}

WResult lambert_w0_from_log(Complex log_z) {
  // exp(L) is unchanged by shifts of 2 pi i; bring Im L into (-pi, pi].
  double im = std::remainder(log_z.imag(), 2 * kPi);
  if (im <= -kPi) im += 2 * kPi;
  const Complex L(log_z.real(), im);
  if (L.real() < kLogArgumentLimit) return lambert_w0(std::exp(L));

  // For large |z| the principal branch satisfies w + Log w = Log z.
  Complex w = L - std::log(L);
  double residual = std::abs(w + std::log(w) - L);
  for (int it = 1; it <= kLambertMaxIterations; ++it) {
    const Complex g = w + std::log(w) - L;
    const Complex delta = g / (1.0 + 1.0 / w);
    w -= delta;
    residual = std::abs(w + std::log(w) - L);
    if (std::abs(delta) < 1e-14 * (1.0 + std::abs(w)) ||
        residual <= 4 * kEps * std::abs(L)) {
      return {w, it, residual};
    }
  }
  throw LambertWError(std::exp(L), w, residual);
}

}  // namespace msi
