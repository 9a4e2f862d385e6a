#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "msi/dde.hpp"
#include "msi/models.hpp"
#include "msi/network.hpp"
#include "msi/scanner.hpp"

namespace msi {

/// "a,b;c,d" row-major, or "identity" / "I" with a dimension.
Eigen::MatrixXd parse_matrix(std::string_view text, int identity_dim = 0);
Eigen::VectorXd parse_vector(std::string_view text);

/// Network description: either a coupling matrix entered directly or a
/// symmetric adjacency normalized as D^-1 A.
struct GraphInput {
  Eigen::MatrixXd matrix;
  bool direct_coupling = false;
};

/// JSON with "adjacency", "coupling" or "nodes" + "edges" (0-based,
/// undirected), or a whitespace-separated matrix in plain text.
GraphInput parse_graph(std::string_view text);
GraphInput load_graph(const std::filesystem::path& path);
CouplingMatrix to_coupling(const GraphInput& input);

/// Header "x,y,value,active"; active is empty except for slices.
void write_grid_csv(std::ostream& out, const ScanGrid& grid);

nlohmann::json axis_json(const Axis& axis);
nlohmann::json islands_json(const std::vector<Island>& islands);
nlohmann::json grid_summary_json(const ScanGrid& grid,
                                 const std::vector<Island>& islands,
                                 const SystemModel& model);
nlohmann::json verdict_json(const NetworkVerdict& verdict);
nlohmann::json complex_json(Complex z);
nlohmann::json params_json(const ParamSet& params);

/// Header "t,d".
void write_series_csv(std::ostream& out, const SimResult& result,
                      int sample_every = 1);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace msi
