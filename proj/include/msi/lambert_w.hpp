#pragma once

#include "msi/error.hpp"
#include "msi/types.hpp"

namespace msi {

struct WResult {
  Complex value;
  int iterations = 0;
  // |W e^W - z| for lambert_w0; |W + log W - log z| for lambert_w0_from_log
  // when the argument is too large to form.
  double residual = 0.0;
};

class LambertWError : public NumericalError {
 public:
  LambertWError(Complex z, Complex last_iterate, double residual);

  Complex argument() const { return z_; }
  Complex last_iterate() const { return last_; }
  double residual() const { return residual_; }

 private:
  Complex z_;
  Complex last_;
  double residual_;
};

inline constexpr int kLambertMaxIterations = 100;

/// Principal branch W0(z) by Halley iteration. The branch cut is
/// (-inf, -1/e); points on it take the limit from Im z -> 0+.
WResult lambert_w0(Complex z);

/// W0(exp(log_z)). Avoids overflow when |z| exceeds the double range, which
/// happens for long delays in the characteristic root formula.
WResult lambert_w0_from_log(Complex log_z);

}  // namespace msi
