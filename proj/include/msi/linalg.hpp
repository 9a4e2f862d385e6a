#pragma once

#include <optional>

#include "msi/types.hpp"

namespace msi {

struct EigenDecomposition {
  ComplexList eigenvalues;          // descending real part, then imaginary
  Eigen::MatrixXcd eigenvectors;    // columns aligned with eigenvalues
  double condition_number = 0.0;    // 2-norm condition of the eigenvector matrix

  bool diagonalizable() const;
};

/// Eigenvectors with a condition number at or above this are treated as
/// defective.
inline constexpr double kDiagonalizableCondition = 1e8;

/// Relative commutator tolerance: ||DF H - H DF|| < tol * ||DF|| ||H||.
inline constexpr double kCommutatorTolerance = 1e-9;

/// Full spectrum of a small dense real matrix (m <= 64). Throws
/// NumericalError if the decomposition fails its residual check.
EigenDecomposition eigendecompose(const Eigen::MatrixXd& a);

/// Orders eigenvalues by descending real part, ties by descending imaginary
/// part, and returns the applied permutation.
std::vector<int> spectral_order(const ComplexList& values);

/// Eigenvalues of DF and H aligned through a shared eigenvector basis Q.
struct CommutingPair {
  ComplexList mu_df;
  ComplexList mu_h;
  Eigen::MatrixXcd basis;  // Q
};

/// Returns the simultaneous diagonalization of DF and H, or nullopt if they
/// do not commute or either is not diagonalizable.
std::optional<CommutingPair> try_commuting_pair(const Eigen::MatrixXd& df,
                                                const Eigen::MatrixXd& h);

double inf_norm(const Eigen::MatrixXd& a);

}  // namespace msi
