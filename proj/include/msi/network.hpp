#pragma once

#include <vector>

#include "msi/msf.hpp"

namespace msi {

/// Row-normalized network coupling matrix with a real spectrum in [-1, 1].
struct CouplingMatrix {
  int n = 0;
  Eigen::MatrixXd g;             // rows sum to 1
  double row_sum = 1.0;          // constant row sum of the matrix as given
  std::vector<double> eigenvalues;  // descending, eigenvalues[0] == 1
  bool diagonalizable = true;
  int unit_multiplicity = 1;     // > 1 for disconnected graphs
};

/// G = D^-1 A for a symmetric non-negative adjacency with no zero rows.
CouplingMatrix build_coupling(const Eigen::MatrixXd& adjacency);

/// Direct entry of G: non-negative, constant row sum c > 0, diagonalizable
/// with real spectrum. G is normalized by c, which is absorbed into sigma.
CouplingMatrix coupling_from_matrix(const Eigen::MatrixXd& g);

struct EigenOmega {
  double lambda = 0.0;
  double omega = 0.0;
  int multiplicity = 1;
};

struct NetworkVerdict {
  bool stable = false;
  std::vector<EigenOmega> per_eigenvalue;  // distinct eigenvalues, descending
  EigenOmega worst;
  double sigma = 0.0;             // as requested
  double sigma_normalized = 0.0;  // sigma * row_sum
  double tau = 0.0;
};

inline constexpr double kEigenvalueDedupTol = 1e-12;

/// Stable iff max_i Omega(tau, sigma c, lambda_i) < 0.
NetworkVerdict check_amplitude_death(const CouplingMatrix& g,
                                     const MasterStability& msf, double tau,
                                     double sigma);

/// Common graphs used by tests and the CLI.
Eigen::MatrixXd ring_adjacency(int n);
Eigen::MatrixXd complete_adjacency(int n);

}  // namespace msi
