#include "msi/scanner.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "msi/error.hpp"

namespace msi {

std::string_view to_string(Param p) {
  switch (p) {
    case Param::tau: return "tau";
    case Param::sigma: return "sigma";
    case Param::lambda: return "lambda";
  }
  return "unknown";
}

std::string_view to_string(ScanKind k) {
  switch (k) {
    case ScanKind::adi: return "adi";
    case ScanKind::msi: return "msi";
    case ScanKind::slice: return "slice";
  }
  return "unknown";
}

Param parse_param(std::string_view name) {
  if (name == "tau") return Param::tau;
  if (name == "sigma") return Param::sigma;
  if (name == "lambda") return Param::lambda;
  throw ValidationError("unknown parameter name '" + std::string(name) +
                        "' (expected tau, sigma or lambda)");
}

double Axis::at(int i) const {
  if (count == 1) return min;
  if (i == count - 1) return max;
  const double u = static_cast<double>(i) / (count - 1);
  const double s = grading == 1.0 ? u : std::pow(u, grading);
  return min + (max - min) * s;
}

std::vector<double> Axis::samples() const {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = at(i);
  return out;
}

std::vector<double> Axis::cell_widths() const {
  if (count == 1) return {1.0};
  const auto s = samples();
  std::vector<double> w(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lo = i == 0 ? s[i] : 0.5 * (s[i - 1] + s[i]);
    const double hi = i + 1 == s.size() ? s[i] : 0.5 * (s[i] + s[i + 1]);
    w[i] = hi - lo;
  }
  return w;
}

void Axis::validate() const {
  const std::string name(to_string(param));
  if (!std::isfinite(min) || !std::isfinite(max)) {
    throw ValidationError(name + " range must be finite");
  }
  if (!(grading > 0) || !std::isfinite(grading)) {
    throw ValidationError(name + " grading exponent must be positive");
  }
  const bool degenerate = count == 1 && min == max;
  if (!degenerate) {
    if (count < 2) throw ValidationError(name + " axis needs at least 2 samples");
    if (!(min < max)) throw ValidationError(name + " axis needs min < max");
  }
  if (param != Param::lambda && min < 0) {
    throw ValidationError(name + " range must be non-negative");
  }
  if (param == Param::lambda && (min < -1 || max > 1)) {
    throw ValidationError("lambda range must lie within [-1, 1]");
  }
}

namespace {

double parse_double(std::string_view field, std::string_view what) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("invalid number '" + std::string(field) + "' in " +
                          std::string(what));
  }
  return v;
}

}  // namespace

Axis parse_axis(Param param, std::string_view text) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(':', start);
    fields.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  const std::string what = "--" + std::string(to_string(param)) + " range '" +
                           std::string(text) + "'";
  if (fields.size() != 3 && fields.size() != 4) {
    throw ValidationError(what + ": expected min:max:count[:grading]");
  }
  Axis axis;
  axis.param = param;
  axis.min = parse_double(fields[0], what);
  axis.max = parse_double(fields[1], what);
  const double count = parse_double(fields[2], what);
  if (count != std::floor(count) || count < 1 || count > 1e6) {
    throw ValidationError(what + ": count must be a positive integer");
  }
  axis.count = static_cast<int>(count);
  if (fields.size() == 4) axis.grading = parse_double(fields[3], what);
  axis.validate();
  return axis;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& f) {
  const std::size_t threads =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = n;
  std::exception_ptr failure;

  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

[[noreturn]] void rethrow_with_cell(const std::exception& e, double x, double y,
                                    std::string_view xn, std::string_view yn) {
  std::ostringstream os;
  os.precision(17);
  os << "cell (" << xn << "=" << x << ", " << yn << "=" << y << "): " << e.what();
  throw NumericalError(os.str());
}

template <class Fn>
Eigen::MatrixXd evaluate_grid(const Axis& x, const Axis& y, int workers, Fn cell) {
  const auto xs = x.samples();
  const auto ys = y.samples();
  Eigen::MatrixXd values(y.count, x.count);
  const std::size_t total = static_cast<std::size_t>(x.count) * static_cast<std::size_t>(y.count);
  parallel_for(total, workers, [&](std::size_t k) {
    const auto iy = static_cast<Eigen::Index>(k / static_cast<std::size_t>(x.count));
    const auto ix = static_cast<Eigen::Index>(k % static_cast<std::size_t>(x.count));
    try {
      values(iy, ix) = cell(xs[static_cast<std::size_t>(ix)], ys[static_cast<std::size_t>(iy)],
                            static_cast<int>(iy), static_cast<int>(ix));
    } catch (const std::exception& e) {
      rethrow_with_cell(e, xs[static_cast<std::size_t>(ix)], ys[static_cast<std::size_t>(iy)],
                        to_string(x.param), to_string(y.param));
    }
  });
  return values;
}

void require_param(const Axis& axis, Param p) {
  if (axis.param != p) {
    throw ValidationError("expected a " + std::string(to_string(p)) + " axis, got " +
                          std::string(to_string(axis.param)));
  }
  axis.validate();
}

struct LambdaSweep {
  LambdaInterval interval;
  double omega_at_one = 0.0;
};

LambdaSweep sweep_lambda(const MasterStability& msf, double tau, double sigma) {
  constexpr int last = kLambdaSamples - 1;
  auto lambda_at = [](int k) { return -1.0 + 2.0 * k / last; };
  auto omega = [&](double lam) { return msf.omega(tau, sigma, lam); };

  std::vector<double> om(kLambdaSamples);
  for (int k = 0; k <= last; ++k) om[static_cast<std::size_t>(k)] = omega(lambda_at(k));

  // Boundary between a non-negative sample at `lo` and a negative one at `hi`.
  auto refine = [&](double lo, double hi) {
    while (std::abs(hi - lo) >= kLambdaBisectionTol) {
      const double mid = 0.5 * (lo + hi);
      (omega(mid) < 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };

  LambdaSweep out;
  out.omega_at_one = om[last];
  auto& iv = out.interval;
  int k = 0;
  while (k <= last) {
    if (!(om[static_cast<std::size_t>(k)] < 0)) {
      ++k;
      continue;
    }
    const int begin = k;
    while (k <= last && om[static_cast<std::size_t>(k)] < 0) ++k;
    const int end = k - 1;
    const double a = begin == 0 ? -1.0 : refine(lambda_at(begin - 1), lambda_at(begin));
    const double b = end == last ? 1.0 : refine(lambda_at(end + 1), lambda_at(end));
    iv.intervals.emplace_back(a, b);
    iv.total_measure += b - a;
  }
  iv.contains_one = om[last] < 0;
  iv.is_single_interval_to_one = iv.intervals.size() == 1 && iv.contains_one;
  return out;
}

}  // namespace

ScanGrid scan_adi(const MasterStability& msf, const Axis& tau_axis,
                  const Axis& sigma_axis, const ScanOptions& options) {
  require_param(tau_axis, Param::tau);
  require_param(sigma_axis, Param::sigma);
  ScanGrid grid;
  grid.kind = ScanKind::adi;
  grid.x = tau_axis;
  grid.y = sigma_axis;
  grid.fixed_param = Param::lambda;
  grid.fixed_value = 1.0;
  grid.values = evaluate_grid(tau_axis, sigma_axis, options.workers,
                              [&](double tau, double sigma, int, int) {
                                return msf.omega(tau, sigma, 1.0);
                              });
  return grid;
}

LambdaInterval lambda_interval(const MasterStability& msf, double tau, double sigma) {
  validate(MsfQuery{tau, sigma, 1.0});
  return sweep_lambda(msf, tau, sigma).interval;
}

ScanGrid scan_msi(const MasterStability& msf, const Axis& tau_axis,
                  const Axis& sigma_axis, const ScanOptions& options) {
  require_param(tau_axis, Param::tau);
  require_param(sigma_axis, Param::sigma);
  ScanGrid grid;
  grid.kind = ScanKind::msi;
  grid.x = tau_axis;
  grid.y = sigma_axis;
  grid.fixed_param = Param::lambda;
  grid.fixed_value = 1.0;

  const std::size_t total = static_cast<std::size_t>(tau_axis.count) *
                            static_cast<std::size_t>(sigma_axis.count);
  std::vector<std::uint8_t> multi(total, 0), excludes(total, 0);
  Eigen::MatrixXd omega_one(sigma_axis.count, tau_axis.count);
  grid.values = evaluate_grid(
      tau_axis, sigma_axis, options.workers, [&](double tau, double sigma, int iy, int ix) {
        const LambdaSweep sweep = sweep_lambda(msf, tau, sigma);
        const auto k = static_cast<std::size_t>(iy) * static_cast<std::size_t>(tau_axis.count) +
                       static_cast<std::size_t>(ix);
        omega_one(iy, ix) = sweep.omega_at_one;
        const auto& iv = sweep.interval;
        if (iv.intervals.size() > 1) multi[k] = 1;
        if (!iv.intervals.empty() && !iv.contains_one) excludes[k] = 1;
        return iv.contains_one ? iv.total_measure : 0.0;
      });

  for (int iy = 0; iy < grid.ny(); ++iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const auto k = static_cast<std::size_t>(iy) * static_cast<std::size_t>(grid.nx()) +
                     static_cast<std::size_t>(ix);
      if ((grid.values(iy, ix) > 0) != (omega_one(iy, ix) < 0)) {
        throw std::logic_error("MSI altitude disagrees with the ADI condition");
      }
      if (multi[k]) grid.diagnostics.multi_interval_cells.emplace_back(iy, ix);
      if (excludes[k]) grid.diagnostics.excludes_one_cells.emplace_back(iy, ix);
    }
  }
  auto note = [&](std::size_t count, const char* what) {
    if (count == 0) return;
    grid.diagnostics.warnings.push_back(std::to_string(count) + " cell(s) " + what);
  };
  note(grid.diagnostics.multi_interval_cells.size(),
       "with a stable lambda-set made of several intervals (altitude uses the total measure)");
  note(grid.diagnostics.excludes_one_cells.size(),
       "with stable lambda values that exclude lambda = 1 (altitude set to 0)");
  return grid;
}

ScanGrid scan_slice(const MasterStability& msf, Param fixed_param, double fixed_value,
                    const Axis& x_axis, int lambda_count, const ScanOptions& options) {
  if (fixed_param == Param::lambda) {
    throw ValidationError("slice must fix tau or sigma");
  }
  const Param x_param = fixed_param == Param::tau ? Param::sigma : Param::tau;
  require_param(x_axis, x_param);
  if (!std::isfinite(fixed_value) || fixed_value < 0) {
    throw ValidationError("fixed " + std::string(to_string(fixed_param)) +
                          " must be finite and >= 0");
  }
  Axis lambda_axis{Param::lambda, -1.0, 1.0, lambda_count, 1.0};
  lambda_axis.validate();

  ScanGrid grid;
  grid.kind = ScanKind::slice;
  grid.x = x_axis;
  grid.y = lambda_axis;
  grid.fixed_param = fixed_param;
  grid.fixed_value = fixed_value;
  grid.values = evaluate_grid(x_axis, lambda_axis, options.workers,
                              [&](double x, double lambda, int, int) {
                                return fixed_param == Param::tau
                                           ? msf.omega(fixed_value, x, lambda)
                                           : msf.omega(x, fixed_value, lambda);
                              });

  // A cell is active when the negative run through it extends up to
  // lambda = 1 at the same x; negative cells below an unstable lambda = 1
  // cannot host a network spectrum.
  grid.active.assign(static_cast<std::size_t>(grid.values.size()), 0);
  for (int ix = 0; ix < grid.nx(); ++ix) {
    for (int iy = grid.ny() - 1; iy >= 0 && grid.values(iy, ix) < 0; --iy)
      grid.active[static_cast<std::size_t>(iy) * grid.nx() + ix] = 1;
  }
  grid.active_regions = label_components(grid.active, grid.ny(), grid.nx()).count;
  return grid;
}

}  // namespace msi
