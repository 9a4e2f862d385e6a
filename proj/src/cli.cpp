#include "msi/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "msi/dde.hpp"
#include "msi/error.hpp"
#include "msi/io.hpp"
#include "msi/models.hpp"
#include "msi/msf.hpp"
#include "msi/network.hpp"
#include "msi/scanner.hpp"

namespace msi::cli {

namespace {

constexpr const char* kFormats = R"(Output formats
  Grid CSV (<out>.csv): header x,y,value,active. One row per cell, y-major.
    scan-adi: x=tau, y=sigma, value=Omega(tau,sigma,1).
    scan-msi: x=tau, y=sigma, value=altitude (measure of stable lambda set).
    slice:    x=tau or sigma, y=lambda, value=Omega, active=1 where the
              negative run in that column extends up to lambda=1 (0
              otherwise). active is empty for scan-adi and scan-msi.
  Summary JSON (<out>.json): {islands:[{id,area,cells,bbox:[x_min,x_max,
    y_min,y_max],min_tau,altitude_max,full_altitude_region}],resolution,
    ranges,fixed,system,params,diagnostics,config}.
  Series CSV (simulate): header t,d with d = max_i ||x_i - s||_inf.
  Every run writes <out>.config.ini; `msi --config <out>.config.ini`
  reproduces it.
Ranges are min:max:count[:grading]; samples are min + (max-min) u^grading.)";

struct SystemOptions {
  std::string system = "rossler";
  std::vector<std::string> params;
  int fp_index = -1;
  std::string jacobian;
  std::string point;
  std::string h = "identity";
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
};

struct Context {
  SystemModel model;
  FixedPoint fp;
  int fp_index = 0;
  Eigen::MatrixXd h;
};

Context build_context(const SystemOptions& o) {
  ParamSet params;
  for (const auto& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--param expects name=value, got '" + kv + "'");
    const std::string value = kv.substr(eq + 1);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) {
      throw ValidationError("--param " + kv + ": value is not a number");
    }
    params.set(kv.substr(0, eq), v);
  }
  std::optional<CustomLinearization> custom;
  if (o.system == "custom") {
    if (o.jacobian.empty()) throw ValidationError("--jacobian is required for --system custom");
    custom = CustomLinearization{parse_matrix(o.jacobian),
                                 o.point.empty() ? Eigen::VectorXd() : parse_vector(o.point)};
  }
  Context ctx;
  ctx.model = build_system(o.system, params, custom);
  ctx.fp_index = o.fp_index >= 0 ? o.fp_index : default_fixed_point_index(ctx.model);
  ctx.fp = select_fixed_point(ctx.model, ctx.fp_index);
  ctx.h = parse_matrix(o.h, ctx.model.dimension);
  if (ctx.h.rows() != ctx.model.dimension || ctx.h.cols() != ctx.model.dimension) {
    throw ValidationError("--H must be " + std::to_string(ctx.model.dimension) + "x" +
                          std::to_string(ctx.model.dimension));
  }
  return ctx;
}

nlohmann::json context_json(const Context& ctx) {
  nlohmann::json j;
  j["system"] = ctx.model.name;
  j["params"] = params_json(ctx.model.params);
  j["fixed_point_index"] = ctx.fp_index;
  j["fixed_point"] = std::vector<double>(ctx.fp.state.begin(), ctx.fp.state.end());
  nlohmann::json h = nlohmann::json::array();
  for (Eigen::Index i = 0; i < ctx.h.rows(); ++i) {
    std::vector<double> row(ctx.h.row(i).begin(), ctx.h.row(i).end());
    h.push_back(row);
  }
  j["H"] = h;
  return j;
}

CouplingMatrix network_from(const std::string& graph, int ring, int complete) {
  const int chosen = (!graph.empty()) + (ring > 0) + (complete > 0);
  if (chosen > 1) throw ValidationError("use only one of --graph, --ring, --complete");
  if (!graph.empty()) return to_coupling(load_graph(graph));
  if (ring > 0) return build_coupling(ring_adjacency(ring));
  if (complete > 0) return build_coupling(complete_adjacency(complete));
  return build_coupling(complete_adjacency(2));
}

std::string ini_quote(const std::string& v) {
  std::string q = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') q += '\\';
    q += c;
  }
  return q + "\"";
}

void echo_options(std::ostringstream& ini, const CLI::App& app) {
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::vector<std::string> values = opt->results();
    if (values.empty() && !opt->get_default_str().empty()) values.push_back(opt->get_default_str());
    if (values.empty()) continue;
    ini << name << "=";
    if (opt->get_expected_max() > 1) {
      ini << "[";
      for (std::size_t i = 0; i < values.size(); ++i) ini << (i ? "," : "") << ini_quote(values[i]);
      ini << "]";
    } else {
      ini << ini_quote(values.back());
    }
    ini << "\n";
  }
}

// Options as parsed, restricted to the selected subcommand.
std::string config_echo(const CLI::App& app) {
  std::ostringstream ini;
  echo_options(ini, app);
  for (const CLI::App* sub : app.get_subcommands()) {
    ini << "[" << sub->get_name() << "]\n";
    echo_options(ini, *sub);
  }
  return ini.str();
}

class Runner {
 public:
  Runner(std::ostream& out, std::string echo) : out_(out), echo_(std::move(echo)) {}

  void emit(const nlohmann::json& j, const std::string& prefix) {
    nlohmann::json with_echo = j;
    with_echo["config"] = echo_;
    if (!prefix.empty()) {
      write_text_file(prefix + ".json", with_echo.dump(2) + "\n");
      write_text_file(prefix + ".config.ini", echo_);
    }
    out_ << j.dump(2) << "\n";
  }

  std::ostream& out() { return out_; }

 private:
  std::ostream& out_;
  std::string echo_;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Master stability islands for amplitude death in delay-coupled networks", "msi"};
  app.footer(kFormats);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from an INI/TOML file (command line wins)");

  SystemOptions sys;
  app.add_option("--system", sys.system, "rossler | lorenz | chen | custom")
      ->check(CLI::IsMember({"rossler", "lorenz", "chen", "custom"}))
      ->capture_default_str();
  app.add_option("--param", sys.params, "Parameter override name=value (repeatable)");
  app.add_option("--fp-index", sys.fp_index, "Fixed point index (-1: system default)")
      ->capture_default_str();
  app.add_option("--jacobian", sys.jacobian, "Custom DF(s), rows ';' columns ','");
  app.add_option("--point", sys.point, "Custom fixed point, comma separated");
  app.add_option("--H", sys.h, "Inner coupling matrix or 'identity'")->capture_default_str();
  app.add_option("--workers", sys.workers, "Scan worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string out_prefix;
  app.add_option("--out", out_prefix, "Output path prefix (<out>.csv, <out>.json, <out>.config.ini)");

  // fixed-points
  auto* fixed = app.add_subcommand("fixed-points", "List fixed points and Jacobian spectra");

  // msf-eval
  double tau = 0, sigma = 0, lambda = 1;
  std::string method = "auto";
  auto* eval = app.add_subcommand("msf-eval", "Evaluate Omega(tau, sigma, lambda)");
  eval->add_option("--tau", tau, "Coupling delay")->required()->check(CLI::NonNegativeNumber);
  eval->add_option("--sigma", sigma, "Coupling strength")->required()->check(CLI::NonNegativeNumber);
  eval->add_option("--lambda", lambda, "Coupling eigenvalue")->required()->check(CLI::Range(-1.0, 1.0));
  eval->add_option("--method", method, "auto | lambert | spectral")
      ->check(CLI::IsMember({"auto", "lambert", "spectral"}))
      ->capture_default_str();

  // scan-adi / scan-msi
  std::string tau_range = "0:20:400", sigma_range = "0:20:400";
  auto* adi = app.add_subcommand("scan-adi", "Amplitude death islands over tau x sigma");
  adi->add_option("--tau", tau_range, "tau range min:max:count[:grading]")->capture_default_str();
  adi->add_option("--sigma", sigma_range, "sigma range min:max:count[:grading]")->capture_default_str();

  std::string msi_tau = "0:20:200", msi_sigma = "0:20:200";
  auto* msi_cmd = app.add_subcommand("scan-msi", "Master stability islands (altitude maps)");
  msi_cmd->add_option("--tau", msi_tau, "tau range")->capture_default_str();
  msi_cmd->add_option("--sigma", msi_sigma, "sigma range")->capture_default_str();

  // slice
  std::string fix, slice_range = "0:20:400";
  int lambda_count = 400;
  auto* slice = app.add_subcommand("slice", "Stability slice over (tau or sigma) x lambda");
  slice->add_option("--fix", fix, "Held parameter, tau=VALUE or sigma=VALUE")->required();
  slice->add_option("--range", slice_range, "Range of the free parameter")->capture_default_str();
  slice->add_option("--lambda-count", lambda_count, "Samples over lambda in [-1, 1]")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();

  // network-check
  std::string graph;
  int ring = 0, complete = 0;
  auto* net = app.add_subcommand("network-check", "AD stability verdict for a network");
  net->add_option("--graph", graph, "Graph file (JSON or whitespace matrix)");
  net->add_option("--ring", ring, "Undirected ring with N nodes");
  net->add_option("--complete", complete, "Complete graph with N nodes");
  net->add_option("--tau", tau, "Coupling delay")->required()->check(CLI::NonNegativeNumber);
  net->add_option("--sigma", sigma, "Coupling strength")->required()->check(CLI::NonNegativeNumber);

  // simulate
  std::string mode = "nonlinear";
  double step = 0, t_max = 0, magnitude = 1e-3;
  std::uint64_t seed = 1;
  int sample_every = 100;
  auto* sim = app.add_subcommand("simulate", "Integrate the delay-coupled network");
  sim->add_option("--graph", graph, "Graph file (default: 2-node mutual coupling)");
  sim->add_option("--ring", ring, "Undirected ring with N nodes");
  sim->add_option("--complete", complete, "Complete graph with N nodes");
  sim->add_option("--tau", tau, "Coupling delay")->required()->check(CLI::NonNegativeNumber);
  sim->add_option("--sigma", sigma, "Coupling strength")->required()->check(CLI::NonNegativeNumber);
  sim->add_option("--mode", mode, "nonlinear | variational")
      ->check(CLI::IsMember({"nonlinear", "variational"}))
      ->capture_default_str();
  sim->add_option("--step", step, "Step size (0: tau/K, K = max(100, ceil(tau/1e-3)))")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sim->add_option("--t-max", t_max, "Final time (0: max(50 tau, 500))")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sim->add_option("--perturbation", magnitude, "Random perturbation magnitude")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sim->add_option("--seed", seed, "Perturbation seed")->capture_default_str();
  sim->add_option("--sample-every", sample_every, "Write every k-th step to the CSV")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  for (auto* sub : app.get_subcommands({})) sub->configurable();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const std::string echo = config_echo(app);
    Runner runner(out, echo);
    const Context ctx = build_context(sys);
    ScanOptions scan_opts{sys.workers};

    if (*fixed) {
      const FixedPointSet set = find_fixed_points(ctx.model);
      nlohmann::json j = context_json(ctx);
      nlohmann::json points = nlohmann::json::array();
      std::ostringstream table;
      table << std::fixed << std::setprecision(4);
      for (std::size_t i = 0; i < set.points.size(); ++i) {
        const auto& p = set.points[i];
        nlohmann::json pj;
        pj["index"] = i;
        pj["state"] = std::vector<double>(p.state.begin(), p.state.end());
        nlohmann::json ev = nlohmann::json::array();
        table << (static_cast<int>(i) == ctx.fp_index ? "* " : "  ") << "[" << i << "] s = (";
        for (Eigen::Index k = 0; k < p.state.size(); ++k) table << (k ? ", " : "") << p.state(k);
        table << ")  eigenvalues:";
        for (const auto& mu : jacobian_spectrum(p)) {
          ev.push_back(complex_json(mu));
          table << "  " << mu.real() << (mu.imag() < 0 ? " - " : " + ") << std::abs(mu.imag()) << "i";
        }
        table << "\n";
        pj["eigenvalues"] = ev;
        points.push_back(pj);
      }
      j["fixed_points"] = points;
      if (!set.diagnostic.empty()) j["diagnostic"] = set.diagnostic;
      out << table.str();
      if (!set.diagnostic.empty()) out << "note: " << set.diagnostic << "\n";
      if (!out_prefix.empty()) {
        nlohmann::json with_echo = j;
        with_echo["config"] = echo;
        write_text_file(out_prefix + ".json", with_echo.dump(2) + "\n");
        write_text_file(out_prefix + ".config.ini", echo);
      }
      return kExitOk;
    }

    const MasterStability msf(ctx.fp.jacobian_at_state, ctx.h);

    if (*eval) {
      const MsfQuery q{tau, sigma, lambda};
      MsfValue v;
      if (method == "lambert") v = msf.eval_lambert(q);
      else if (method == "spectral") v = msf.eval_spectral(q);
      else v = msf.eval(q);
      nlohmann::json j = context_json(ctx);
      j["tau"] = tau;
      j["sigma"] = sigma;
      j["lambda"] = lambda;
      j["omega"] = v.omega;
      j["dominant_root"] = complex_json(v.dominant_root);
      j["mode_index"] = v.mode_index ? nlohmann::json(*v.mode_index) : nlohmann::json();
      j["method"] = to_string(v.method);
      j["residual"] = v.residual;
      runner.emit(j, out_prefix);
      return kExitOk;
    }

    if (*adi || *msi_cmd || *slice) {
      ScanGrid grid;
      if (*adi) {
        grid = scan_adi(msf, parse_axis(Param::tau, tau_range), parse_axis(Param::sigma, sigma_range),
                        scan_opts);
      } else if (*msi_cmd) {
        grid = scan_msi(msf, parse_axis(Param::tau, msi_tau), parse_axis(Param::sigma, msi_sigma),
                        scan_opts);
      } else {
        const auto eq = fix.find('=');
        if (eq == std::string::npos) throw ValidationError("--fix expects tau=VALUE or sigma=VALUE");
        const Param held = parse_param(fix.substr(0, eq));
        double value = 0;
        try {
          value = std::stod(fix.substr(eq + 1));
        } catch (const std::exception&) {
          throw ValidationError("--fix value is not a number");
        }
        const Param free = held == Param::tau ? Param::sigma : Param::tau;
        grid = scan_slice(msf, held, value, parse_axis(free, slice_range), lambda_count, scan_opts);
      }
      const std::vector<Island> islands =
          grid.kind == ScanKind::slice ? std::vector<Island>{} : extract_islands(grid);
      nlohmann::json j = grid_summary_json(grid, islands, ctx.model);
      j["fixed_point_index"] = ctx.fp_index;
      if (grid.kind == ScanKind::adi) j["sigma_run_violations"] = sigma_run_violations(grid);
      if (!out_prefix.empty()) {
        std::ostringstream csv;
        write_grid_csv(csv, grid);
        write_text_file(out_prefix + ".csv", csv.str());
      }
      for (const auto& w : grid.diagnostics.warnings) err << "warning: " << w << "\n";
      runner.emit(j, out_prefix);
      return kExitOk;
    }

    if (*net) {
      const CouplingMatrix g = network_from(graph, ring, complete);
      const NetworkVerdict v = check_amplitude_death(g, msf, tau, sigma);
      nlohmann::json j = verdict_json(v);
      j["nodes"] = g.n;
      j["row_sum"] = g.row_sum;
      j["unit_eigenvalue_multiplicity"] = g.unit_multiplicity;
      j["system"] = ctx.model.name;
      runner.emit(j, out_prefix);
      return kExitOk;
    }

    if (*sim) {
      const CouplingMatrix g = network_from(graph, ring, complete);
      SimConfig cfg{ctx.model, ctx.fp, g.g, ctx.h, tau, sigma * g.row_sum, step, t_max, {}};
      cfg.perturbation.magnitude = magnitude;
      cfg.perturbation.seed = seed;
      const SimResult r = mode == "variational" ? simulate_variational(cfg) : simulate_network(cfg);
      nlohmann::json j = context_json(ctx);
      j["mode"] = mode;
      j["verdict"] = to_string(r.verdict);
      j["growth_rate"] = mode == "variational" ? nlohmann::json(r.growth_rate) : nlohmann::json();
      j["seed"] = r.seed;
      j["step"] = r.step;
      j["t_max"] = r.t_max;
      j["t_end"] = r.times.back();
      j["delay_steps"] = r.delay_steps;
      j["final_deviation"] = r.deviation.back();
      if (!out_prefix.empty()) {
        std::ostringstream csv;
        write_series_csv(csv, r, sample_every);
        write_text_file(out_prefix + ".csv", csv.str());
      }
      runner.emit(j, out_prefix);
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitValidation;
}

}  // namespace msi::cli
