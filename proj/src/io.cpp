#include "msi/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "msi/error.hpp"

namespace msi {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("invalid number '" + std::string(s) + "'");
  }
  return v;
}

Eigen::MatrixXd matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ValidationError("empty matrix");
  const auto cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw ValidationError("ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

Eigen::MatrixXd json_matrix(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) throw ValidationError(std::string(key) + " must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw ValidationError(std::string(key) + " rows must be arrays");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw ValidationError(std::string(key) + " entries must be numbers");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return matrix_from_rows(rows);
}

}  // namespace

Eigen::MatrixXd parse_matrix(std::string_view text, int identity_dim) {
  text = trim(text);
  if (text == "identity" || text == "I") {
    if (identity_dim <= 0) throw ValidationError("identity needs a dimension");
    return Eigen::MatrixXd::Identity(identity_dim, identity_dim);
  }
  std::vector<std::vector<double>> rows;
  for (auto row : split(text, ';')) {
    std::vector<double> values;
    for (auto v : split(row, ',')) values.push_back(to_double(v));
    rows.push_back(std::move(values));
  }
  return matrix_from_rows(rows);
}

Eigen::VectorXd parse_vector(std::string_view text) {
  const auto fields = split(trim(text), ',');
  Eigen::VectorXd v(static_cast<Eigen::Index>(fields.size()));
  for (std::size_t i = 0; i < fields.size(); ++i) v(static_cast<Eigen::Index>(i)) = to_double(fields[i]);
  return v;
}

GraphInput parse_graph(std::string_view text) {
  const auto body = trim(text);
  if (body.empty()) throw ValidationError("empty graph description");
  GraphInput out;
  if (body.front() != '{') {
    std::vector<std::vector<double>> rows;
    std::istringstream in{std::string(body)};
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty() || trim(line).front() == '#') continue;
      std::istringstream ls(line);
      std::vector<double> row;
      std::string tok;
      while (ls >> tok) row.push_back(to_double(tok));
      rows.push_back(std::move(row));
    }
    out.matrix = matrix_from_rows(rows);
    return out;
  }

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("graph JSON: ") + e.what());
  }
  if (j.contains("coupling")) {
    out.matrix = json_matrix(j["coupling"], "coupling");
    out.direct_coupling = true;
  } else if (j.contains("adjacency")) {
    out.matrix = json_matrix(j["adjacency"], "adjacency");
  } else if (j.contains("edges")) {
    if (!j.contains("nodes") || !j["nodes"].is_number_integer()) {
      throw ValidationError("edge list needs an integer \"nodes\" count");
    }
    const int n = j["nodes"].get<int>();
    if (n < 1) throw ValidationError("\"nodes\" must be positive");
    out.matrix = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() < 2 || e.size() > 3) {
        throw ValidationError("edges must be [i, j] or [i, j, weight]");
      }
      const int a = e[0].get<int>(), b = e[1].get<int>();
      const double w = e.size() == 3 ? e[2].get<double>() : 1.0;
      if (a < 0 || b < 0 || a >= n || b >= n) {
        throw ValidationError("edge index out of range: [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]");
      }
      out.matrix(a, b) += w;
      if (a != b) out.matrix(b, a) += w;
    }
  } else {
    throw ValidationError("graph JSON needs \"adjacency\", \"coupling\" or \"edges\"");
  }
  return out;
}

GraphInput load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open graph file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_graph(ss.str());
}

CouplingMatrix to_coupling(const GraphInput& input) {
  return input.direct_coupling ? coupling_from_matrix(input.matrix)
                               : build_coupling(input.matrix);
}

void write_grid_csv(std::ostream& out, const ScanGrid& grid) {
  const auto xs = grid.x.samples(), ys = grid.y.samples();
  const bool slice = grid.kind == ScanKind::slice;
  out << "x,y,value,active\n";
  char buf[128];
  for (int iy = 0; iy < grid.ny(); ++iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const int len = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", xs[static_cast<std::size_t>(ix)],
                                    ys[static_cast<std::size_t>(iy)], grid.values(iy, ix));
      out.write(buf, len);
      if (slice) out << (grid.is_active(iy, ix) ? '1' : '0');
      out << '\n';
    }
  }
}

nlohmann::json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

nlohmann::json params_json(const ParamSet& params) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : params.entries()) j[k] = v;
  return j;
}

nlohmann::json axis_json(const Axis& axis) {
  return {{"name", to_string(axis.param)}, {"min", axis.min}, {"max", axis.max},
          {"count", axis.count},          {"grading", axis.grading}};
}

nlohmann::json islands_json(const std::vector<Island>& islands) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& is : islands) {
    nlohmann::json j;
    j["id"] = is.id;
    j["area"] = is.area;
    j["cells"] = is.cells.size();
    j["bbox"] = {is.x_min, is.x_max, is.y_min, is.y_max};
    j["min_tau"] = is.min_tau;
    j["altitude_max"] = is.altitude_max ? nlohmann::json(*is.altitude_max) : nlohmann::json();
    j["full_altitude_region"] = is.full_altitude_region;
    arr.push_back(std::move(j));
  }
  return arr;
}

nlohmann::json grid_summary_json(const ScanGrid& grid, const std::vector<Island>& islands,
                                 const SystemModel& model) {
  nlohmann::json j;
  j["kind"] = to_string(grid.kind);
  j["islands"] = islands_json(islands);
  j["resolution"] = {grid.nx(), grid.ny()};
  j["ranges"] = {{"x", axis_json(grid.x)}, {"y", axis_json(grid.y)}};
  j["fixed"] = {{"name", to_string(grid.fixed_param)}, {"value", grid.fixed_value}};
  j["system"] = model.name;
  j["params"] = params_json(model.params);
  if (grid.kind == ScanKind::slice) j["active_regions"] = grid.active_regions;
  nlohmann::json diag;
  auto cells = [](const std::vector<std::pair<int, int>>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& [iy, ix] : v) a.push_back({ix, iy});
    return a;
  };
  diag["multi_interval_cells"] = cells(grid.diagnostics.multi_interval_cells);
  diag["excludes_one_cells"] = cells(grid.diagnostics.excludes_one_cells);
  diag["warnings"] = grid.diagnostics.warnings;
  j["diagnostics"] = diag;
  return j;
}

nlohmann::json verdict_json(const NetworkVerdict& v) {
  nlohmann::json j;
  j["stable"] = v.stable;
  j["tau"] = v.tau;
  j["sigma"] = v.sigma;
  j["sigma_normalized"] = v.sigma_normalized;
  nlohmann::json table = nlohmann::json::array();
  for (const auto& e : v.per_eigenvalue) {
    table.push_back({{"lambda", e.lambda}, {"omega", e.omega}, {"multiplicity", e.multiplicity}});
  }
  j["per_eigenvalue"] = table;
  j["worst"] = {{"lambda", v.worst.lambda}, {"omega", v.worst.omega}};
  return j;
}

void write_series_csv(std::ostream& out, const SimResult& result, int sample_every) {
  sample_every = std::max(sample_every, 1);
  out << "t,d\n";
  char buf[96];
  const std::size_t n = result.times.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i % static_cast<std::size_t>(sample_every) != 0 && i + 1 != n) continue;
    const int len = std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", result.times[i], result.deviation[i]);
    out.write(buf, len);
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("failed writing " + path.string());
}

}  // namespace msi
