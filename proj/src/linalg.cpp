#include "msi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "msi/error.hpp"

namespace msi {

double inf_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

namespace {

double inf_norm(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

double condition_2(const Eigen::MatrixXcd& p) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 0)) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

void normalize_columns(Eigen::MatrixXcd& p) {
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    const double n = p.col(j).norm();
    if (n > 0) p.col(j) /= n;
  }
}

}  // namespace

bool EigenDecomposition::diagonalizable() const {
  return std::isfinite(condition_number) && condition_number < kDiagonalizableCondition;
}

std::vector<int> spectral_order(const ComplexList& values) {
  double scale = 1.0;
  for (const auto& v : values) scale = std::max(scale, std::abs(v));
  const double tie = 1e-12 * scale;
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) {
    const Complex a = values[static_cast<std::size_t>(i)];
    const Complex b = values[static_cast<std::size_t>(j)];
    if (std::abs(a.real() - b.real()) > tie) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return idx;
}

EigenDecomposition eigendecompose(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw ValidationError("eigendecompose: matrix is not square");
  if (a.rows() > 64) throw ValidationError("eigendecompose: dimension above 64");
  if (!a.allFinite()) throw NumericalError("eigendecompose: matrix is not finite");

  const auto m = a.rows();
  EigenDecomposition out;
  if (m == 0) return out;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, true);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigendecompose: QR iteration failed to converge");
  }
  ComplexList values(solver.eigenvalues().begin(), solver.eigenvalues().end());
  Eigen::MatrixXcd vectors = solver.eigenvectors();
  normalize_columns(vectors);

  const auto order = spectral_order(values);
  out.eigenvalues.reserve(values.size());
  out.eigenvectors.resize(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto src = static_cast<std::size_t>(order[static_cast<std::size_t>(k)]);
    out.eigenvalues.push_back(values[src]);
    out.eigenvectors.col(k) = vectors.col(static_cast<Eigen::Index>(src));
  }

  Eigen::VectorXcd lam(m);
  for (Eigen::Index k = 0; k < m; ++k) lam(k) = out.eigenvalues[static_cast<std::size_t>(k)];
  const Eigen::MatrixXcd residual =
      a.cast<Complex>() * out.eigenvectors - out.eigenvectors * lam.asDiagonal();
  const double scale = std::max(inf_norm(a), std::numeric_limits<double>::min());
  const double res = inf_norm(residual);
  if (!(res < 1e-8 * scale) && res > 0) {
    throw NumericalError("eigendecompose: residual " + std::to_string(res) +
                         " exceeds 1e-8 * ||A||");
  }
  out.condition_number = condition_2(out.eigenvectors);
  return out;
}

std::optional<CommutingPair> try_commuting_pair(const Eigen::MatrixXd& df,
                                                const Eigen::MatrixXd& h) {
  if (df.rows() != df.cols() || h.rows() != h.cols() || df.rows() != h.rows()) {
    throw ValidationError("DF and H must be square matrices of the same dimension");
  }
  const auto m = df.rows();
  const double ndf = inf_norm(df), nh = inf_norm(h);
  const double comm = inf_norm(Eigen::MatrixXd(df * h - h * df));
  if (comm > kCommutatorTolerance * ndf * nh) return std::nullopt;

  const EigenDecomposition edf = eigendecompose(df);
  const EigenDecomposition eh = eigendecompose(h);
  if (!edf.diagonalizable() || !eh.diagonalizable()) return std::nullopt;

  // Restrict H to each eigenspace of DF and diagonalize it there, so that
  // repeated eigenvalues of DF get a basis that also diagonalizes H.
  double scale = 1.0;
  for (const auto& v : edf.eigenvalues) scale = std::max(scale, std::abs(v));
  const double cluster_tol = 1e-8 * scale;
  Eigen::MatrixXcd q(m, m);
  const Eigen::MatrixXcd hc = h.cast<Complex>();
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  Eigen::Index col = 0;
  ComplexList mu_df;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    std::vector<Eigen::Index> members;
    for (Eigen::Index j = i; j < m; ++j) {
      if (!used[static_cast<std::size_t>(j)] &&
          std::abs(edf.eigenvalues[static_cast<std::size_t>(j)] -
                   edf.eigenvalues[static_cast<std::size_t>(i)]) < cluster_tol) {
        members.push_back(j);
        used[static_cast<std::size_t>(j)] = true;
      }
    }
    const auto k = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXcd basis(m, k);
    for (Eigen::Index c = 0; c < k; ++c) basis.col(c) = edf.eigenvectors.col(members[static_cast<std::size_t>(c)]);
    if (k == 1) {
      q.col(col++) = basis.col(0);
    } else {
      const Eigen::MatrixXcd restricted = basis.colPivHouseholderQr().solve(hc * basis);
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> sub(restricted, true);
      if (sub.info() != Eigen::Success) return std::nullopt;
      Eigen::MatrixXcd rotated = basis * sub.eigenvectors();
      normalize_columns(rotated);
      for (Eigen::Index c = 0; c < k; ++c) q.col(col++) = rotated.col(c);
    }
    for (Eigen::Index c = 0; c < k; ++c) mu_df.push_back(edf.eigenvalues[static_cast<std::size_t>(members[static_cast<std::size_t>(c)])]);
  }

  if (!(condition_2(q) < kDiagonalizableCondition)) return std::nullopt;
  const auto lu = q.partialPivLu();
  const Eigen::MatrixXcd ddf = lu.solve(df.cast<Complex>() * q);
  const Eigen::MatrixXcd dh = lu.solve(hc * q);
  auto off_diagonal = [](const Eigen::MatrixXcd& d) {
    Eigen::MatrixXcd o = d;
    o.diagonal().setZero();
    return inf_norm(o);
  };
  if (off_diagonal(ddf) > 1e-8 * std::max(1.0, ndf) ||
      off_diagonal(dh) > 1e-8 * std::max(1.0, nh)) {
    return std::nullopt;
  }

  CommutingPair pair;
  pair.basis = q;
  pair.mu_df = mu_df;
  for (Eigen::Index k = 0; k < m; ++k) pair.mu_h.push_back(dh(k, k));
  return pair;
}

}  // namespace msi
