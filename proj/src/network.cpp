#include "msi/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "msi/error.hpp"

namespace msi {

namespace {

constexpr double kSpectrumSlack = 1e-9;

void check_square_nonnegative(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ValidationError(std::string(what) + " must be a non-empty square matrix");
  }
  if (!m.allFinite()) throw ValidationError(std::string(what) + " has non-finite entries");
  if ((m.array() < 0).any()) throw ValidationError(std::string(what) + " has negative entries");
}

// Eigenvalues within the Gershgorin bound are snapped into [-1, 1]; anything
// further out means the matrix violates the coupling assumptions.
std::vector<double> finish_spectrum(std::vector<double> values) {
  for (double& v : values) {
    if (v > 1 + kSpectrumSlack || v < -1 - kSpectrumSlack) {
      throw ValidationError("coupling eigenvalue " + std::to_string(v) + " outside [-1, 1]");
    }
    v = std::clamp(v, -1.0, 1.0);
  }
  std::sort(values.begin(), values.end(), std::greater<>());
  if (std::abs(values.front() - 1.0) > kSpectrumSlack) {
    throw ValidationError("largest coupling eigenvalue is not 1");
  }
  values.front() = 1.0;
  return values;
}

int count_unit(const std::vector<double>& values) {
  return static_cast<int>(std::count_if(values.begin(), values.end(),
                                        [](double v) { return std::abs(v - 1.0) < 1e-9; }));
}

void check_uniform_eigenvector(const Eigen::MatrixXd& g) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.rows());
  const double res = (g * ones - ones).cwiseAbs().maxCoeff();
  if (res >= 1e-10) {
    throw ValidationError("row sums are not constant (residual " + std::to_string(res) + ")");
  }
}

}  // namespace

CouplingMatrix build_coupling(const Eigen::MatrixXd& adjacency) {
  check_square_nonnegative(adjacency, "adjacency");
  const double scale = adjacency.cwiseAbs().maxCoeff();
  if ((adjacency - adjacency.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ValidationError("adjacency must be symmetric (directed graphs are not supported)");
  }
  const Eigen::VectorXd degree = adjacency.rowwise().sum();
  for (Eigen::Index i = 0; i < degree.size(); ++i) {
    if (!(degree(i) > 0)) {
      throw ValidationError("node " + std::to_string(i) + " has zero degree");
    }
  }
  CouplingMatrix out;
  out.n = static_cast<int>(adjacency.rows());
  out.g = degree.cwiseInverse().asDiagonal() * adjacency;
  out.row_sum = 1.0;
  check_uniform_eigenvector(out.g);

  // D^-1 A is similar to the symmetric D^-1/2 A D^-1/2.
  const Eigen::VectorXd dis = degree.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd sym = dis.asDiagonal() * adjacency * dis.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("coupling eigensolver failed");
  const auto& ev = solver.eigenvalues();
  out.eigenvalues = finish_spectrum(std::vector<double>(ev.begin(), ev.end()));
  out.diagonalizable = true;
  out.unit_multiplicity = count_unit(out.eigenvalues);
  return out;
}

CouplingMatrix coupling_from_matrix(const Eigen::MatrixXd& g) {
  check_square_nonnegative(g, "coupling matrix");
  const Eigen::VectorXd rows = g.rowwise().sum();
  const double c = rows(0);
  if (!(c > 0)) throw ValidationError("coupling matrix row sum must be positive");
  if ((rows.array() - c).abs().maxCoeff() > 1e-10 * c) {
    throw ValidationError("coupling matrix rows do not share a constant sum");
  }
  CouplingMatrix out;
  out.n = static_cast<int>(g.rows());
  out.row_sum = c;
  out.g = g / c;
  check_uniform_eigenvector(out.g);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(out.g, true);
  if (solver.info() != Eigen::Success) throw NumericalError("coupling eigensolver failed");
  std::vector<double> values;
  for (const auto& v : solver.eigenvalues()) {
    if (std::abs(v.imag()) >= 1e-9) {
      throw ValidationError("coupling matrix has a complex eigenvalue " +
                            std::to_string(v.real()) + "+" + std::to_string(v.imag()) + "i");
    }
    values.push_back(v.real());
  }
  Eigen::MatrixXcd vecs = solver.eigenvectors();
  for (Eigen::Index j = 0; j < vecs.cols(); ++j) vecs.col(j).normalize();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vecs);
  const auto& s = svd.singularValues();
  out.diagonalizable = s(s.size() - 1) > 0 && s(0) / s(s.size() - 1) < 1e8;
  if (!out.diagonalizable) throw ValidationError("coupling matrix is not diagonalizable");
  out.eigenvalues = finish_spectrum(std::move(values));
  out.unit_multiplicity = count_unit(out.eigenvalues);
  return out;
}

NetworkVerdict check_amplitude_death(const CouplingMatrix& g, const MasterStability& msf,
                                     double tau, double sigma) {
  NetworkVerdict v;
  v.tau = tau;
  v.sigma = sigma;
  v.sigma_normalized = sigma * g.row_sum;
  for (double lam : g.eigenvalues) {
    if (!v.per_eigenvalue.empty() &&
        std::abs(v.per_eigenvalue.back().lambda - lam) <= kEigenvalueDedupTol) {
      ++v.per_eigenvalue.back().multiplicity;
      continue;
    }
    EigenOmega e;
    e.lambda = lam;
    try {
      e.omega = msf.omega(tau, v.sigma_normalized, lam);
    } catch (const std::exception& ex) {
      throw NumericalError("MSF evaluation failed at lambda=" + std::to_string(lam) + ": " +
                           ex.what());
    }
    v.per_eigenvalue.push_back(e);
  }
  v.worst = *std::max_element(v.per_eigenvalue.begin(), v.per_eigenvalue.end(),
                              [](const EigenOmega& a, const EigenOmega& b) {
                                return a.omega < b.omega;
                              });
  v.stable = v.worst.omega < 0;
  return v;
}

Eigen::MatrixXd ring_adjacency(int n) {
  if (n < 3) throw ValidationError("ring needs at least 3 nodes");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, (i + 1) % n) = 1;
    a((i + 1) % n, i) = 1;
  }
  return a;
}

Eigen::MatrixXd complete_adjacency(int n) {
  if (n < 2) throw ValidationError("complete graph needs at least 2 nodes");
  return Eigen::MatrixXd::Ones(n, n) - Eigen::MatrixXd::Identity(n, n);
}

}  // namespace msi
