#include "spatial_exit/report.hpp"

#include <cmath>
#include <fstream>
#include <system_error>

#include "spatial_exit/normal.hpp"

namespace spatial_exit {

using nlohmann::ordered_json;

double normal_p_value(double z) {
  if (!std::isfinite(z)) return std::isnan(z) ? z : 0.0;
  return 2.0 * normal::cdf(-std::abs(z));
}

std::string significance_stars(double p) {
  if (!(p < 0.1)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  return "*";
}

ordered_json provenance_json(const Provenance& prov) {
  ordered_json j;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["command"] = prov.command;
  j["config"] = prov.config;
  j["input"] = {{"path", prov.input_path}, {"sha256", prov.input_sha256}};
  j["seed"] = prov.seed;
  return j;
}

ordered_json cell_json(const DesignMatrix& design, const SpatialWeights& w) {
  ordered_json j;
  j["year"] = design.year;
  j["block_level"] = to_string(design.block_level);
  j["n"] = design.rows();
  j["k"] = design.cols();
  j["exits"] = static_cast<long long>(design.y.sum());
  j["design_hash"] = design_hash(design);
  std::size_t multi = 0;
  for (const auto& b : w.blocks()) multi += b.size() > 1;
  j["weights"] = {{"d_min_km", w.d_min_km()},
                  {"row_normalized", w.row_normalized()},
                  {"nonzeros", w.entries().size()},
                  {"blocks", multi},
                  {"isolated", w.isolated_rows().size()}};
  return j;
}

ordered_json error_json(Errc code, std::string_view message) {
  return {{"code", errc_name(code)}, {"message", message}};
}

ordered_json coefficient_table(const std::vector<std::string>& names,
                               const Eigen::VectorXd& estimate, const Eigen::VectorXd& se) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < estimate.size(); ++i) {
    const double z = estimate(i) / se(i);
    const double p = normal_p_value(z);
    ordered_json row;
    row["name"] = names.at(static_cast<std::size_t>(i));
    row["estimate"] = estimate(i);
    row["se"] = se(i);
    row["z"] = z;
    row["p"] = p;
    row["stars"] = significance_stars(p);
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json spatial_fit_json(const SpatialFit& fit, const std::vector<std::string>& names) {
  const Eigen::Index k = fit.beta.size();
  std::vector<std::string> all = names;
  all.push_back("rho");
  Eigen::VectorXd est(k + 1);
  est << fit.beta, fit.rho;

  ordered_json j;
  j["method"] = to_string(fit.method);
  const ordered_json table = coefficient_table(all, est, fit.se);
  j["rho"] = table.back();
  j["beta"] = ordered_json::array();
  for (Eigen::Index i = 0; i < k; ++i) j["beta"].push_back(table[static_cast<std::size_t>(i)]);
  j["probit_beta"] = std::vector<double>(fit.probit_beta.data(),
                                         fit.probit_beta.data() + fit.probit_beta.size());
  j["diagnostics"] = {{"iterations", fit.iterations},
                      {"converged", fit.converged},
                      {"rho_outside_unit", fit.rho_outside_unit},
                      {"projections", fit.projections},
                      {"objective", fit.objective},
                      {"residual", to_string(fit.residual)},
                      {"covariance", to_string(fit.covariance)},
                      {"instruments", fit.instruments},
                      {"instrument_condition", fit.instrument_condition}};
  return j;
}

namespace {

ordered_json gibbs_config_json(const GibbsConfig& config) {
  return {{"n_burn", config.n_burn},
          {"n_keep", config.n_keep},
          {"rho_grid", {{"points", config.rho_grid.size()},
                        {"min", config.rho_grid.front()},
                        {"max", config.rho_grid.back()}}},
          {"beta_prior_variance", config.beta_prior_variance},
          {"seed", config.seed}};
}

ordered_json posterior_row(const std::string& name, double mean, double sd, double ess) {
  return {{"name", name}, {"mean", mean}, {"sd", sd}, {"ess", ess}};
}

}  // namespace

ordered_json gibbs_json(const GibbsDraws& draws, const GibbsConfig& config,
                        const std::vector<std::string>& names) {
  ordered_json j;
  j["method"] = "gibbs";
  j["sampler"] = gibbs_config_json(config);
  j["rho"] = posterior_row("rho", draws.rho_mean(), draws.rho_sd(), draws.rho_ess);
  j["rho"]["identified"] = draws.rho_identified;
  const Eigen::VectorXd mean = draws.beta_mean();
  const Eigen::VectorXd sd = draws.beta_sd();
  j["beta"] = ordered_json::array();
  for (Eigen::Index i = 0; i < mean.size(); ++i)
    j["beta"].push_back(posterior_row(names.at(static_cast<std::size_t>(i)), mean(i), sd(i),
                                      draws.beta_ess(i)));
  j["diagnostics"] = {{"truncation_violations", draws.truncation_violations},
                      {"max_grid_normalization_error", draws.max_grid_normalization_error}};
  return j;
}

ordered_json comparison_json(const ComparisonReport& report, const GibbsConfig& config,
                             const std::vector<std::string>& names) {
  ordered_json j;
  j["threshold"] = report.threshold;
  if (report.rho_applicable) {
    j["rho"] = {{"status", report.rho_gap <= report.threshold ? "PASS" : "FAIL"},
                {"gmm", report.gmm_rho},
                {"posterior_mean", report.rho_posterior_mean},
                {"posterior_sd", report.rho_posterior_sd},
                {"gap", report.rho_gap}};
  } else {
    j["rho"] = {{"status", "NOT-APPLICABLE"},
                {"reason", "W has no neighbours; rho is not identified"},
                {"posterior_mean", report.rho_posterior_mean},
                {"posterior_sd", report.rho_posterior_sd}};
  }
  j["beta"] = ordered_json::array();
  for (Eigen::Index i = 0; i < report.beta_gap.size(); ++i)
    j["beta"].push_back({{"name", names.at(static_cast<std::size_t>(i))},
                         {"gmm", report.gmm_beta(i)},
                         {"posterior_mean", report.beta_posterior_mean(i)},
                         {"gap", report.beta_gap(i)}});
  j["result"] = report.pass ? "PASS" : "FAIL";
  if (report.gmm) j["gmm"] = spatial_fit_json(*report.gmm, names);
  j["gibbs"] = gibbs_json(report.draws, config, names);
  return j;
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(Errc::Io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::Io, "cannot rename " + tmp.string() + " to " + path.string());
  }
}

}  // namespace spatial_exit
