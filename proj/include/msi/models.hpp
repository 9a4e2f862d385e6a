#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "msi/types.hpp"

namespace msi {

/// Ordered list of named real parameters. Order is the declaration order of
/// the model, which keeps config echoes stable.
class ParamSet {
 public:
  ParamSet() = default;
  ParamSet(std::initializer_list<std::pair<std::string, double>> init)
      : entries_(init) {}

  /// Throws ValidationError when the parameter is absent.
  double get(std::string_view name) const;
  bool contains(std::string_view name) const;
  void set(std::string_view name, double value);

  const std::vector<std::pair<std::string, double>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

using VectorField =
    std::function<void(std::span<const double> x, std::span<double> dx)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd& x)>;

/// An oscillator family: vector field F, its Jacobian DF and parameters.
struct SystemModel {
  std::string name;
  int dimension = 0;
  ParamSet params;
  VectorField vector_field;
  JacobianFn jacobian;

  // Only set for user-supplied linearizations.
  std::optional<Eigen::VectorXd> custom_point;

  Eigen::VectorXd eval(const Eigen::VectorXd& x) const;
};

struct FixedPoint {
  Eigen::VectorXd state;
  Eigen::MatrixXd jacobian_at_state;
  ComplexList eigenvalues;  // descending real part
};

struct FixedPointSet {
  std::vector<FixedPoint> points;
  std::string diagnostic;  // non-empty when some branch does not exist
};

/// User-supplied linearization for the "custom" system. The vector field of
/// such a model is the affine map F(x) = DF (x - s).
struct CustomLinearization {
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd point;  // defaults to the origin when empty
};

/// Built-in names: rossler, lorenz, chen, custom. `overrides` replaces
/// default parameters; unknown parameter names are rejected.
SystemModel build_system(std::string_view name, const ParamSet& overrides = {},
                         const std::optional<CustomLinearization>& custom = {});

ParamSet default_params(std::string_view name);

/// Closed-form fixed points, "+" branch first, origin last where it exists.
FixedPointSet find_fixed_points(const SystemModel& model);

/// Index of the fixed point analysed by default: the point nearest the
/// origin among the non-trivial pair for Rossler, the "+" branch otherwise.
int default_fixed_point_index(const SystemModel& model);

/// Selects a fixed point by index, throwing ValidationError when absent.
FixedPoint select_fixed_point(const SystemModel& model,
                              std::optional<int> index = {});

ComplexList jacobian_spectrum(const FixedPoint& fp);

}  // namespace msi
