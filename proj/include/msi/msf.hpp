#pragma once

#include <optional>
#include <string_view>

#include "msi/linalg.hpp"
#include "msi/types.hpp"

namespace msi {

enum class MsfMethod { lambert, spectral, closed_form };

std::string_view to_string(MsfMethod method);

struct MsfQuery {
  double tau = 0.0;     // coupling delay
  double sigma = 0.0;   // coupling strength
  double lambda = 1.0;  // coupling-matrix eigenvalue, in [-1, 1]
};

/// Throws ValidationError unless tau, sigma >= 0 are finite and lambda is
/// in [-1, 1].
void validate(const MsfQuery& q);

struct MsfValue {
  double omega = 0.0;  // Re(dominant_root)
  Complex dominant_root;
  std::optional<int> mode_index;  // 0-based; absent for the spectral path
  MsfMethod method = MsfMethod::lambert;
  double residual = 0.0;
};

/// Lambert-path roots must satisfy their scalar equation to this tolerance,
/// relative to max(1, |mu_df| + sigma |mu_h| (1 + |lambda|)).
inline constexpr double kScalarResidualTolerance = 1e-10;

/// Principal-branch root of mu = mu_df - sigma mu_h + sigma lambda mu_h
/// exp(-mu tau). Requires tau > 0.
Complex scalar_root(Complex mu_df, Complex mu_h, double tau, double sigma,
                    double lambda);

/// |mu - mu_df + sigma mu_h - sigma lambda mu_h exp(-mu tau)|.
double scalar_residual(Complex mu, Complex mu_df, Complex mu_h, double tau,
                       double sigma, double lambda);

struct SpectralOptions {
  int initial_nodes = 20;
  int max_nodes = 160;
  double tolerance = 1e-8;  // movement of the refined root between levels
  int candidates = 32;      // rightmost discrete eigenvalues to refine; long delays
                            // pack many roots near the rightmost one
};

/// Rightmost root of det(mu I - (DF - sigma H) - sigma lambda H e^{-mu tau})
/// via Chebyshev collocation of the solution operator generator on
/// [-tau, 0] followed by Newton refinement on the determinant.
MsfValue spectral_rightmost_root(const Eigen::MatrixXd& df,
                                 const Eigen::MatrixXd& h, double tau,
                                 double sigma, double lambda,
                                 const SpectralOptions& options = {});

/// Normalized residual of the matrix characteristic function: smallest
/// singular value of M(mu) over max(1, ||A0|| + ||A1 e^{-mu tau}|| + |mu|).
double determinant_residual(const Eigen::MatrixXd& df,
                            const Eigen::MatrixXd& h, double tau, double sigma,
                            double lambda, Complex mu);

/// Master stability function Omega(tau, sigma, lambda) for a fixed
/// linearization DF(s) and inner coupling matrix H.
class MasterStability {
 public:
  MasterStability(Eigen::MatrixXd df, Eigen::MatrixXd h,
                  SpectralOptions spectral = {});

  MsfValue eval(const MsfQuery& q) const;
  double omega(double tau, double sigma, double lambda) const {
    return eval({tau, sigma, lambda}).omega;
  }

  /// Lambert path with the matrices treated as decoupled; throws
  /// ValidationError if they do not co-diagonalize.
  MsfValue eval_lambert(const MsfQuery& q) const;
  MsfValue eval_spectral(const MsfQuery& q) const;

  bool decoupled() const { return pair_.has_value(); }
  const std::optional<CommutingPair>& pair() const { return pair_; }
  const Eigen::MatrixXd& df() const { return df_; }
  const Eigen::MatrixXd& h() const { return h_; }

  /// max Re of the eigenvalues of DF(s).
  double uncoupled_growth() const { return uncoupled_growth_; }

 private:
  MsfValue eval_delay_free(const MsfQuery& q) const;

  Eigen::MatrixXd df_;
  Eigen::MatrixXd h_;
  SpectralOptions spectral_;
  std::optional<CommutingPair> pair_;
  double uncoupled_growth_ = 0.0;
};

}  // namespace msi
