#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spatial_exit/design.hpp"
#include "spatial_exit/error.hpp"
#include "spatial_exit/gibbs.hpp"
#include "spatial_exit/spatial_probit.hpp"
#include "spatial_exit/weights.hpp"

namespace spatial_exit {

inline constexpr std::string_view kToolName = "spatial-exit";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Fields every artifact carries so that a run can be reproduced.
struct Provenance {
  std::string command;
  nlohmann::ordered_json config;  // effective settings after merging the config file
  std::string input_path;
  std::string input_sha256;
  std::uint64_t seed = 0;
};

/// Two-sided p-value of a z statistic under the standard normal.
double normal_p_value(double z);
/// "***" for p < 0.01, "**" for p < 0.05, "*" for p < 0.1, otherwise "".
std::string significance_stars(double p);

nlohmann::ordered_json provenance_json(const Provenance& prov);
nlohmann::ordered_json cell_json(const DesignMatrix& design, const SpatialWeights& w);
nlohmann::ordered_json error_json(Errc code, std::string_view message);

/// estimate, se, z, p and stars per coefficient.
nlohmann::ordered_json coefficient_table(const std::vector<std::string>& names,
                                         const Eigen::VectorXd& estimate,
                                         const Eigen::VectorXd& se);

nlohmann::ordered_json spatial_fit_json(const SpatialFit& fit,
                                        const std::vector<std::string>& names);
nlohmann::ordered_json gibbs_json(const GibbsDraws& draws, const GibbsConfig& config,
                                  const std::vector<std::string>& names);
nlohmann::ordered_json comparison_json(const ComparisonReport& report,
                                       const GibbsConfig& config,
                                       const std::vector<std::string>& names);

/// Pretty-printed with a trailing newline.
std::string dump(const nlohmann::ordered_json& doc);

/// Writes to a sibling temporary file and renames it over `path`.
/// Throws Error(Io).
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace spatial_exit
