#include "msi/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msi/error.hpp"
#include "msi/linalg.hpp"

namespace msi {

double ParamSet::get(std::string_view name) const {
  for (const auto& [key, value] : entries_) {
    if (key == name) return value;
  }
  throw ValidationError("missing parameter: " + std::string(name));
}

bool ParamSet::contains(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.first == name; });
}

void ParamSet::set(std::string_view name, double value) {
  for (auto& [key, v] : entries_) {
    if (key == name) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(std::string(name), value);
}

Eigen::VectorXd SystemModel::eval(const Eigen::VectorXd& x) const {
  Eigen::VectorXd dx(dimension);
  vector_field(std::span<const double>(x.data(), x.size()),
               std::span<double>(dx.data(), dx.size()));
  return dx;
}

ParamSet default_params(std::string_view name) {
  if (name == "rossler") return {{"a", 0.15}, {"b", 0.2}, {"c", 10.0}};
  // r = 28, b = 8/3: the values consistent with z* = 27 and the reported
  // Jacobian spectrum at the C+ point.
  if (name == "lorenz") return {{"a", 10.0}, {"r", 28.0}, {"b", 8.0 / 3.0}};
  if (name == "chen") return {{"a", 35.0}, {"c", 28.0}, {"beta", 8.0 / 3.0}};
  if (name == "custom") return {};
  throw ValidationError("unknown system: " + std::string(name));
}

namespace {

SystemModel make_rossler(const ParamSet& p) {
  const double a = p.get("a"), b = p.get("b"), c = p.get("c");
  SystemModel m;
  m.name = "rossler";
  m.dimension = 3;
  m.params = p;
  m.vector_field = [=](std::span<const double> x, std::span<double> dx) {
    dx[0] = -x[1] - x[2];
    dx[1] = x[0] + a * x[1];
    dx[2] = b + (x[0] - c) * x[2];
  };
  m.jacobian = [=](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(3, 3);
    j << 0, -1, -1,
         1, a, 0,
         x[2], 0, x[0] - c;
    return j;
  };
  return m;
}

SystemModel make_lorenz(const ParamSet& p) {
  const double a = p.get("a"), r = p.get("r"), b = p.get("b");
  SystemModel m;
  m.name = "lorenz";
  m.dimension = 3;
  m.params = p;
  m.vector_field = [=](std::span<const double> x, std::span<double> dx) {
    dx[0] = a * (x[1] - x[0]);
    dx[1] = x[0] * (r - x[2]) - x[1];
    dx[2] = x[0] * x[1] - b * x[2];
  };
  m.jacobian = [=](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(3, 3);
    j << -a, a, 0,
         r - x[2], -1, -x[0],
         x[1], x[0], -b;
    return j;
  };
  return m;
}

SystemModel make_chen(const ParamSet& p) {
  const double a = p.get("a"), c = p.get("c"), beta = p.get("beta");
  SystemModel m;
  m.name = "chen";
  m.dimension = 3;
  m.params = p;
  m.vector_field = [=](std::span<const double> x, std::span<double> dx) {
    dx[0] = a * (x[1] - x[0]);
    dx[1] = (c - a - x[2]) * x[0] + c * x[1];
    dx[2] = x[0] * x[1] - beta * x[2];
  };
  m.jacobian = [=](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(3, 3);
    j << -a, a, 0,
         c - a - x[2], c, -x[0],
         x[1], x[0], -beta;
    return j;
  };
  return m;
}

SystemModel make_custom(const CustomLinearization& lin) {
  const Eigen::MatrixXd& df = lin.jacobian;
  if (df.rows() == 0 || df.rows() != df.cols()) {
    throw ValidationError("custom jacobian must be a non-empty square matrix");
  }
  if (!df.allFinite()) throw ValidationError("custom jacobian is not finite");
  const auto dim = df.rows();
  Eigen::VectorXd s = lin.point.size() == 0 ? Eigen::VectorXd::Zero(dim) : lin.point;
  if (s.size() != dim) {
    throw ValidationError("custom fixed point has dimension " +
                          std::to_string(s.size()) + ", jacobian has " +
                          std::to_string(dim));
  }
  SystemModel m;
  m.name = "custom";
  m.dimension = static_cast<int>(dim);
  m.custom_point = s;
  m.vector_field = [df, s](std::span<const double> x, std::span<double> dx) {
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    Eigen::Map<Eigen::VectorXd> out(dx.data(), n);
    out.noalias() = df * (xv - s);
  };
  m.jacobian = [df](const Eigen::VectorXd&) { return df; };
  return m;
}

FixedPoint make_fixed_point(const SystemModel& model, Eigen::VectorXd s) {
  FixedPoint fp;
  fp.jacobian_at_state = model.jacobian(s);
  fp.state = std::move(s);
  fp.eigenvalues = eigendecompose(fp.jacobian_at_state).eigenvalues;
  return fp;
}

Eigen::VectorXd vec3(double x, double y, double z) {
  Eigen::VectorXd v(3);
  v << x, y, z;
  return v;
}

}  // namespace

SystemModel build_system(std::string_view name, const ParamSet& overrides,
                         const std::optional<CustomLinearization>& custom) {
  if (name == "custom") {
    if (!custom) throw ValidationError("missing parameter: jacobian (custom system)");
    if (!overrides.entries().empty()) {
      throw ValidationError("custom system takes no named parameters");
    }
    return make_custom(*custom);
  }
  ParamSet params = default_params(name);
  for (const auto& [key, value] : overrides.entries()) {
    if (!params.contains(key)) {
      throw ValidationError("unknown parameter '" + key + "' for system " +
                            std::string(name));
    }
    if (!std::isfinite(value)) {
      throw ValidationError("parameter '" + key + "' is not finite");
    }
    params.set(key, value);
  }
  if (name == "rossler") return make_rossler(params);
  if (name == "lorenz") return make_lorenz(params);
  return make_chen(params);
}

FixedPointSet find_fixed_points(const SystemModel& model) {
  FixedPointSet out;
  const ParamSet& p = model.params;
  if (model.name == "custom") {
    out.points.push_back(make_fixed_point(model, *model.custom_point));
  } else if (model.name == "rossler") {
    // z = -y, x = a z and a z^2 - c z + b = 0.
    const double a = p.get("a"), b = p.get("b"), c = p.get("c");
    const double disc = c * c - 4 * a * b;
    if (!(disc > 0) || a == 0) {
      out.diagnostic = "no real fixed points: requires c^2 > 4ab and a != 0";
      return out;
    }
    const double d = std::sqrt(disc);
    for (double sign : {1.0, -1.0}) {
      const double z = (c + sign * d) / (2 * a);
      out.points.push_back(make_fixed_point(model, vec3(a * z, -z, z)));
    }
  } else if (model.name == "lorenz") {
    const double r = p.get("r"), b = p.get("b");
    if (b * (r - 1) > 0) {
      const double q = std::sqrt(b * (r - 1));
      out.points.push_back(make_fixed_point(model, vec3(q, q, r - 1)));
      out.points.push_back(make_fixed_point(model, vec3(-q, -q, r - 1)));
    } else {
      out.diagnostic = "b(r - 1) <= 0: the origin is the only fixed point";
    }
    out.points.push_back(make_fixed_point(model, vec3(0, 0, 0)));
  } else if (model.name == "chen") {
    const double a = p.get("a"), c = p.get("c"), beta = p.get("beta");
    if (beta * (2 * c - a) > 0) {
      const double q = std::sqrt(beta * (2 * c - a));
      out.points.push_back(make_fixed_point(model, vec3(q, q, 2 * c - a)));
      out.points.push_back(make_fixed_point(model, vec3(-q, -q, 2 * c - a)));
    } else {
      out.diagnostic = "beta(2c - a) <= 0: the origin is the only fixed point";
    }
    out.points.push_back(make_fixed_point(model, vec3(0, 0, 0)));
  } else {
    throw ValidationError("no fixed-point formula for system " + model.name);
  }
  return out;
}

int default_fixed_point_index(const SystemModel& model) {
  return model.name == "rossler" ? 1 : 0;
}

FixedPoint select_fixed_point(const SystemModel& model, std::optional<int> index) {
  FixedPointSet set = find_fixed_points(model);
  const int i = index.value_or(default_fixed_point_index(model));
  if (i < 0 || i >= static_cast<int>(set.points.size())) {
    std::string msg = "fixed point index " + std::to_string(i) + " out of range (" +
                      std::to_string(set.points.size()) + " available)";
    if (!set.diagnostic.empty()) msg += ": " + set.diagnostic;
    throw ValidationError(msg);
  }
  return set.points[static_cast<std::size_t>(i)];
}

ComplexList jacobian_spectrum(const FixedPoint& fp) {
  ComplexList values = fp.eigenvalues;
  const auto order = spectral_order(values);
  ComplexList sorted;
  sorted.reserve(values.size());
  for (int i : order) sorted.push_back(values[static_cast<std::size_t>(i)]);
  return sorted;
}

}  // namespace msi
