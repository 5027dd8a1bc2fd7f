#include "spatial_exit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "spatial_exit/design.hpp"
#include "spatial_exit/format.hpp"
#include "spatial_exit/gibbs.hpp"
#include "spatial_exit/hashing.hpp"
#include "spatial_exit/panel.hpp"
#include "spatial_exit/report.hpp"
#include "spatial_exit/rng.hpp"
#include "spatial_exit/spatial_probit.hpp"
#include "spatial_exit/synthetic.hpp"
#include "spatial_exit/tables.hpp"
#include "spatial_exit/weights.hpp"

namespace spatial_exit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr Eigen::Index kGibbsMaxFirms = 2000;

// Planted coefficients for `simulate` when --beta is not given, in design column order.
const std::vector<double> kDefaultBeta = {-1.0, -0.02, -0.2, 0.3, 0.1, 0.2, 0.2, 0.3, -0.3};

struct Settings {
  std::string input;
  std::vector<int> years;
  std::string level = "group";
  std::string estimator = "lgmm";
  double dmin_km = kDefaultMinDistanceKm;
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
  bool strict = false;

  std::vector<std::string> filters;
  std::optional<int> from;
  std::optional<int> to;

  double rho = 0.0;
  std::vector<double> beta;
  int firms = 0;

  std::string residual;  // empty: the estimator's default
  std::string covariance = "robust";
  int burn = 1000;
  int keep = 5000;
  double threshold = 0.05;
};

struct Parsed {
  std::unique_ptr<CLI::App> app;
  CLI::App* command = nullptr;
};

void add_common(CLI::App* sub, Settings& s) {
  sub->add_option("--config", s.config, "JSON file with the same keys as the flags; flags win");
  sub->add_flag("--strict", s.strict, "Fail on the first malformed row instead of rejecting it");
}

void add_cell_options(CLI::App* sub, Settings& s) {
  sub->add_option("--year", s.years, "Cross-section year; repeat for several cells")
      ->delimiter(',');
  sub->add_option("--level", s.level, "Industry level of the W blocks")
      ->check(CLI::IsMember({"group", "class"}));
  sub->add_option("--dmin-km", s.dmin_km, "Distance floor in km")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", s.seed, "Base random seed");
}

void add_gibbs_options(CLI::App* sub, Settings& s) {
  sub->add_option("--burn", s.burn, "Gibbs burn-in sweeps")->check(CLI::NonNegativeNumber);
  sub->add_option("--keep", s.keep, "Gibbs retained sweeps")->check(CLI::Range(500, 10000000));
}

Parsed build_app(Settings& s) {
  Parsed p;
  p.app = std::make_unique<CLI::App>("Spatial lagged probit models of firm exit", "spatial-exit");
  auto& app = *p.app;
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  auto* summarize = app.add_subcommand("summarize", "Exit-rate tables and descriptive statistics");
  summarize->add_option("--input", s.input, "Panel CSV");
  summarize->add_option("--filter", s.filters,
                        "Industry filter such as all, division:39 or group:391; repeatable")
      ->delimiter(',');
  summarize->add_option("--from", s.from, "First interval start year");
  summarize->add_option("--to", s.to, "Last interval end year");
  summarize->add_option("--out", s.out, "Output directory");
  add_common(summarize, s);

  auto* simulate = app.add_subcommand("simulate", "Synthetic panel from the structural model");
  simulate->add_option("--input", s.input, "Skeleton panel CSV (coordinates and industry codes)");
  simulate->add_option("--firms", s.firms, "Synthetic skeleton size when no --input is given")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--rho", s.rho, "Planted spatial lag parameter");
  simulate->add_option("--beta", s.beta, "Planted coefficients in design column order")
      ->delimiter(',');
  simulate->add_option("--out", s.out, "Output panel CSV");
  add_cell_options(simulate, s);
  add_common(simulate, s);

  auto* fit = app.add_subcommand("fit", "Estimate one cell per (year, level)");
  fit->add_option("--input", s.input, "Panel CSV");
  fit->add_option("--estimator", s.estimator, "lgmm, nl2sls or gibbs")
      ->check(CLI::IsMember({"lgmm", "nl2sls", "gibbs"}));
  fit->add_option("--residual", s.residual, "GMM residual: raw or generalized")
      ->check(CLI::IsMember({"raw", "generalized"}));
  fit->add_option("--covariance", s.covariance, "GMM covariance: robust or classic")
      ->check(CLI::IsMember({"robust", "classic"}));
  fit->add_option("--out", s.out, "Output directory");
  add_cell_options(fit, s);
  add_gibbs_options(fit, s);
  add_common(fit, s);

  auto* validate = app.add_subcommand("validate", "Compare linearized GMM with the Gibbs sampler");
  validate->add_option("--input", s.input, "Panel CSV");
  validate->add_option("--threshold", s.threshold, "Largest accepted |rho gap|")
      ->check(CLI::PositiveNumber);
  validate->add_option("--out", s.out, "Output directory");
  add_cell_options(validate, s);
  add_gibbs_options(validate, s);
  add_common(validate, s);
  return p;
}

CLI::App* selected(CLI::App& app) {
  for (auto* sub : app.get_subcommands({})) if (sub->parsed()) return sub;
  return nullptr;
}

std::string json_scalar(const ordered_json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return fmt_shortest(v.get<double>());
  throw Error(Errc::InvalidArgument, "config key '" + key + "' must be a string or number");
}

// Flags for every config key the command line did not set.
std::vector<std::string> config_args(const fs::path& path, CLI::App& command) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open config '" + path.string() + "'");
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, "config '" + path.string() + "': " + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::InvalidArgument, "config must be a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : doc.items()) {
    if (key == "config") throw Error(Errc::InvalidArgument, "config files cannot nest");
    const CLI::Option* opt = command.get_option_no_throw("--" + key);
    if (opt == nullptr)
      throw Error(Errc::InvalidArgument,
                  "config key '" + key + "' is not an option of " + command.get_name());
    if (opt->count() > 0) continue;
    if (value.is_boolean()) {
      if (opt->get_type_size() != 0)
        throw Error(Errc::InvalidArgument, "config key '" + key + "' must not be boolean");
      if (value.get<bool>()) args.push_back("--" + key);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) {
        if (!joined.empty()) joined += ',';
        joined += json_scalar(item, key);
      }
      if (!joined.empty()) args.insert(args.end(), {"--" + key, joined});
    } else {
      args.insert(args.end(), {"--" + key, json_scalar(value, key)});
    }
  }
  return args;
}

void parse_into(Parsed& p, std::vector<std::string> args) {
  std::reverse(args.begin(), args.end());
  p.app->parse(args);
  p.command = selected(*p.app);
}

BlockLevel parse_level(const std::string& text) {
  return text == "class" ? BlockLevel::Class : BlockLevel::Group;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(Errc::InvalidArgument, message);
}

struct Input {
  PanelDataset panel;
  std::string sha256;
  std::size_t rejects = 0;
};

Input load_input(const Settings& s, std::ostream& err) {
  require(!s.input.empty(), "--input is required");
  const fs::path path = s.input;
  if (!fs::is_regular_file(path)) throw Error(Errc::Io, "cannot open '" + s.input + "'");
  Input in;
  in.sha256 = sha256_file(path);
  LoadOptions opts;
  opts.strict = s.strict;
  LoadResult loaded = load_panel(path, opts);
  in.rejects = loaded.rejects.size();
  if (!loaded.rejects.empty()) {
    std::ostringstream buf;
    write_rejects_csv(buf, loaded.rejects);
    const fs::path rej = rejects_path_for(path);
    write_file_atomic(rej, buf.str());
    err << "warning: " << loaded.rejects.size() << " row(s) rejected; see " << rej.string()
        << "\n";
  }
  if (loaded.panel.records.empty())
    throw Error(Errc::BadValue, "'" + s.input + "' contains no valid rows");
  in.panel = std::move(loaded.panel);
  return in;
}

void check_years(const Settings& s, const PanelDataset& panel) {
  require(!s.years.empty(), "--year is required");
  for (int y : s.years)
    require(y >= panel.panel_start && y < panel.panel_end,
            "year " + std::to_string(y) + " is outside the estimable range " +
                std::to_string(panel.panel_start) + "-" + std::to_string(panel.panel_end - 1));
}

void ensure_directory(const std::string& out) {
  require(!out.empty(), "--out is required");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw Error(Errc::Io, "cannot create directory '" + out + "'");
}

Provenance provenance(const std::string& command, const Settings& s, ordered_json config,
                      const std::string& sha) {
  Provenance p;
  p.command = command;
  p.config = std::move(config);
  p.input_path = s.input;
  p.input_sha256 = sha;
  p.seed = s.seed;
  return p;
}

ordered_json echo_cell(const Settings& s) {
  return {{"input", s.input}, {"year", s.years}, {"level", s.level}, {"dmin-km", s.dmin_km},
          {"seed", s.seed},   {"out", s.out},     {"strict", s.strict}};
}

std::size_t thread_cap(std::size_t cells) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SPATIAL_EXIT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(n, cells));
}

struct CellOutput {
  std::vector<std::pair<fs::path, std::string>> files;
  int code = kOk;
  std::string message;
};

// Runs independent cells on up to SPATIAL_EXIT_THREADS workers. Results come
// back in cell order regardless of scheduling.
std::vector<CellOutput> run_cells(std::size_t count,
                                  const std::function<CellOutput(std::size_t)>& task) {
  std::vector<CellOutput> results(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) results[i] = task(i);
  };
  const std::size_t n = thread_cap(count);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

int finish_cells(const std::vector<CellOutput>& results, std::ostream& out, std::ostream& err) {
  int code = kOk;
  auto rank = [](int c) { return c == kInputError ? 3 : c == kEstimationFailure ? 2 : c; };
  for (const auto& r : results) {
    for (const auto& [path, content] : r.files) {
      write_file_atomic(path, content);
      out << "wrote " << path.string() << "\n";
    }
    if (!r.message.empty())
      (r.code == kOk || r.code == kThresholdFailure ? out : err) << r.message << "\n";
    if (rank(r.code) > rank(code)) code = r.code;
  }
  return code;
}

int error_code_for(Errc code) {
  return code == Errc::OracleScaleLimit ? kInputError : kEstimationFailure;
}

std::string cell_name(int year, const std::string& level) {
  return std::to_string(year) + "_" + level;
}

GibbsConfig gibbs_config(const Settings& s, int year) {
  GibbsConfig cfg;
  cfg.n_burn = s.burn;
  cfg.n_keep = s.keep;
  cfg.seed = derive_seed(s.seed, static_cast<std::uint64_t>(year));
  return cfg;
}

void check_gibbs_scale(const DesignMatrix& design) {
  if (design.rows() > kGibbsMaxFirms)
    throw Error(Errc::OracleScaleLimit,
                "the Gibbs sampler is limited to " + std::to_string(kGibbsMaxFirms) +
                    " firms; this cell has " + std::to_string(design.rows()));
}

// ---------------------------------------------------------------- summarize

int cmd_summarize(const Settings& s, std::ostream& out, std::ostream& err) {
  const Input in = load_input(s, err);
  ensure_directory(s.out);
  std::vector<std::string> labels = s.filters.empty() ? std::vector<std::string>{"all"} : s.filters;
  std::vector<ExitTable> tables;
  for (const auto& text : labels)
    tables.push_back(exit_table(in.panel, IndustryFilter::parse(text), s.from, s.to));
  const SummaryReport report = summarize(in.panel);

  std::vector<std::pair<std::string, std::string>> files;
  std::ostringstream buf;
  write_exit_tables_csv(buf, tables);
  files.emplace_back("exit_table.csv", buf.str());
  buf.str("");
  write_categorical_csv(buf, report);
  files.emplace_back("categorical.csv", buf.str());
  buf.str("");
  write_numeric_csv(buf, report);
  files.emplace_back("numeric.csv", buf.str());
  buf.str("");
  render_tables_text(buf, tables, report);
  files.emplace_back("tables.txt", buf.str());

  ordered_json config = {{"input", s.input}, {"filter", labels}, {"out", s.out},
                         {"strict", s.strict}};
  config["from"] = s.from ? ordered_json(*s.from) : ordered_json(nullptr);
  config["to"] = s.to ? ordered_json(*s.to) : ordered_json(nullptr);
  ordered_json manifest = provenance_json(provenance("summarize", s, config, in.sha256));
  manifest["seed"] = nullptr;
  manifest["panel"] = {{"firms", in.panel.records.size()},
                       {"panel_start", in.panel.panel_start},
                       {"panel_end", in.panel.panel_end},
                       {"rejected_rows", in.rejects}};
  manifest["files"] = ordered_json::array();
  for (const auto& [name, content] : files)
    manifest["files"].push_back({{"name", name}, {"sha256", sha256_hex(content)}});
  files.emplace_back("manifest.json", dump(manifest));

  for (const auto& [name, content] : files) {
    const fs::path path = fs::path(s.out) / name;
    write_file_atomic(path, content);
    out << "wrote " << path.string() << "\n";
  }
  return kOk;
}

// ----------------------------------------------------------------- simulate

int cmd_simulate(const Settings& s, std::ostream& out, std::ostream& err) {
  require(std::isfinite(s.rho) && std::abs(s.rho) < 1.0,
          "--rho must satisfy |rho| < 1, got " + fmt_shortest(s.rho));
  const std::vector<double> beta = s.beta.empty() ? kDefaultBeta : s.beta;
  require(beta.size() == design_columns().size(),
          "--beta needs " + std::to_string(design_columns().size()) + " values, got " +
              std::to_string(beta.size()));
  require(s.years.size() == 1, "simulate needs exactly one --year");
  require(!s.out.empty(), "--out is required");
  require(s.input.empty() != (s.firms == 0), "give either --input or --firms");
  const int year = s.years.front();

  PanelDataset skeleton;
  std::string sha;
  if (!s.input.empty()) {
    Input in = load_input(s, err);
    check_years(s, in.panel);
    skeleton = std::move(in.panel);
    sha = in.sha256;
  } else {
    skeleton.records = synthetic::skeleton(s.firms, year, derive_seed(s.seed, 0));
    skeleton.panel_start = year;
    skeleton.panel_end = year + 1;
  }
  for (auto& r : skeleton.records)
    if (r.active_in(year)) r.exit_year.reset();

  const BlockLevel level = parse_level(s.level);
  DesignCell cell = build_design(skeleton, year, level);
  const SpatialWeights w = build_weights(cell.active, level, s.dmin_km);
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(beta.data(),
                                                              static_cast<Eigen::Index>(beta.size()));
  const LatentSample sample = simulate_latent(w, s.rho, b, cell.design.x, 1.0,
                                              derive_seed(s.seed, 1));

  PanelDataset panel;
  panel.records = cell.active;
  for (std::size_t i = 0; i < panel.records.size(); ++i)
    if (sample.y(static_cast<Eigen::Index>(i)) > 0.5) panel.records[i].exit_year = year + 1;
  std::ostringstream csv;
  write_panel_csv(csv, panel);

  ordered_json config = echo_cell(s);
  config["year"] = year;
  config["firms"] = s.firms;
  config["rho"] = s.rho;
  config["beta"] = beta;
  ordered_json meta = provenance_json(provenance("simulate", s, config, sha));
  meta["planted"] = {{"rho", s.rho}, {"sigma_eps", 1.0}};
  meta["planted"]["beta"] = ordered_json::array();
  for (std::size_t j = 0; j < beta.size(); ++j)
    meta["planted"]["beta"].push_back({{"name", design_columns()[j]}, {"value", beta[j]}});
  meta["cell"] = cell_json(cell.design, w);
  meta["cell"].erase("exits");
  meta["cell"].erase("design_hash");  // y is planted below, so the skeleton hash would mislead
  meta["output"] = {{"path", s.out},
                    {"firms", panel.records.size()},
                    {"exits", static_cast<long long>(sample.y.sum())},
                    {"sha256", sha256_hex(csv.str())}};

  const fs::path path = s.out;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_atomic(path, csv.str());
  fs::path meta_path = path;
  meta_path += ".meta.json";
  write_file_atomic(meta_path, dump(meta));
  out << "wrote " << path.string() << "\nwrote " << meta_path.string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------- fit

ordered_json estimate_cell(const Settings& s, const DesignMatrix& design, const SpatialWeights& w,
                           std::vector<std::pair<fs::path, std::string>>& extra,
                           const fs::path& stem) {
  const auto& names = design.columns;
  const CovarianceKind cov =
      s.covariance == "classic" ? CovarianceKind::Classic : CovarianceKind::Robust;
  if (s.estimator == "lgmm") {
    LinearizedOptions opts;
    opts.covariance = cov;
    if (s.residual == "generalized") opts.residual = ResidualKind::Generalized;
    return spatial_fit_json(linearized_gmm_fit(design.x, design.y, w, opts), names);
  }
  if (s.estimator == "nl2sls") {
    Nl2slsOptions opts;
    opts.covariance = cov;
    if (s.residual == "raw") opts.residual = ResidualKind::Raw;
    return spatial_fit_json(nl2sls_fit(design.x, design.y, w, build_instruments(design.x, w), opts),
                            names);
  }
  check_gibbs_scale(design);
  const GibbsConfig cfg = gibbs_config(s, design.year);
  const GibbsDraws draws = gibbs_fit(design.x, design.y, w, cfg);
  std::ostringstream csv;
  write_draws_csv(csv, draws, names);
  fs::path draws_path = stem;
  draws_path += "_draws.csv";
  extra.emplace_back(draws_path, csv.str());
  ordered_json j = gibbs_json(draws, cfg, names);
  j["draws_file"] = draws_path.filename().string();
  return j;
}

int cmd_fit(const Settings& s, std::ostream& out, std::ostream& err) {
  const Input in = load_input(s, err);
  check_years(s, in.panel);
  ensure_directory(s.out);
  const BlockLevel level = parse_level(s.level);

  ordered_json config = echo_cell(s);
  config["estimator"] = s.estimator;
  config["residual"] = s.residual.empty() ? ordered_json(nullptr) : ordered_json(s.residual);
  config["covariance"] = s.covariance;
  if (s.estimator == "gibbs") {
    config["burn"] = s.burn;
    config["keep"] = s.keep;
  }
  const Provenance prov = provenance("fit", s, config, in.sha256);

  auto task = [&](std::size_t i) {
    const int year = s.years[i];
    const fs::path stem =
        fs::path(s.out) / ("fit_" + cell_name(year, s.level) + "_" + s.estimator);
    CellOutput result;
    ordered_json doc = provenance_json(prov);
    doc["cell"] = {{"year", year}, {"block_level", s.level}};
    try {
      const DesignCell cell = build_design(in.panel, year, level);
      const SpatialWeights w = build_weights(cell.active, level, s.dmin_km);
      doc["cell"] = cell_json(cell.design, w);
      ordered_json est = estimate_cell(s, cell.design, w, result.files, stem);
      doc["status"] = "ok";
      doc["estimate"] = std::move(est);
    } catch (const Error& e) {
      doc["status"] = "error";
      doc["error"] = error_json(e.code(), e.what());
      result.code = error_code_for(e.code());
      result.message = "error: " + cell_name(year, s.level) + ": " +
                       std::string(errc_name(e.code())) + ": " + e.what();
    }
    fs::path report = stem;
    report += ".json";
    result.files.insert(result.files.begin(), {report, dump(doc)});
    return result;
  };
  return finish_cells(run_cells(s.years.size(), task), out, err);
}

// ----------------------------------------------------------------- validate

int cmd_validate(const Settings& s, std::ostream& out, std::ostream& err) {
  const Input in = load_input(s, err);
  check_years(s, in.panel);
  ensure_directory(s.out);
  const BlockLevel level = parse_level(s.level);

  ordered_json config = echo_cell(s);
  config["threshold"] = s.threshold;
  config["burn"] = s.burn;
  config["keep"] = s.keep;
  const Provenance prov = provenance("validate", s, config, in.sha256);

  auto task = [&](std::size_t i) {
    const int year = s.years[i];
    const std::string name = cell_name(year, s.level);
    CellOutput result;
    ordered_json doc = provenance_json(prov);
    doc["cell"] = {{"year", year}, {"block_level", s.level}};
    try {
      const DesignCell cell = build_design(in.panel, year, level);
      const SpatialWeights w = build_weights(cell.active, level, s.dmin_km);
      doc["cell"] = cell_json(cell.design, w);
      check_gibbs_scale(cell.design);
      const GibbsConfig cfg = gibbs_config(s, year);
      const ComparisonReport rep =
          compare_estimators(cell.design.x, cell.design.y, w, cfg, s.threshold);
      doc["status"] = "ok";
      doc["comparison"] = comparison_json(rep, cfg, cell.design.columns);
      result.code = rep.pass ? kOk : kThresholdFailure;
      result.message = name + ": rho " +
                       (rep.rho_applicable ? (rep.pass ? "PASS" : "FAIL") : "NOT-APPLICABLE") +
                       (rep.rho_applicable ? " (gap " + fmt_fixed(rep.rho_gap, 4) + ")" : "");
    } catch (const Error& e) {
      doc["status"] = "error";
      doc["error"] = error_json(e.code(), e.what());
      result.code = error_code_for(e.code());
      result.message = "error: " + name + ": " + std::string(errc_name(e.code())) + ": " + e.what();
    }
    result.files.emplace_back(fs::path(s.out) / ("validate_" + name + ".json"), dump(doc));
    return result;
  };
  return finish_cells(run_cells(s.years.size(), task), out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings first;
  Parsed p = build_app(first);
  try {
    parse_into(p, args);
  } catch (const CLI::ParseError& e) {
    const int code = p.app->exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    Settings s = first;
    Parsed final_parse;
    if (!first.config.empty()) {
      std::vector<std::string> merged = args;
      const auto extra = config_args(first.config, *p.command);
      merged.insert(merged.end(), extra.begin(), extra.end());
      s = Settings{};
      final_parse = build_app(s);
      try {
        parse_into(final_parse, merged);
      } catch (const CLI::ParseError& e) {
        final_parse.app->exit(e, out, err);
        return kInputError;
      }
    }
    const std::string name = p.command->get_name();
    if (name == "summarize") return cmd_summarize(s, out, err);
    if (name == "simulate") return cmd_simulate(s, out, err);
    if (name == "fit") return cmd_fit(s, out, err);
    return cmd_validate(s, out, err);
  } catch (const Error& e) {
    err << "error: " << errc_name(e.code()) << ": " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace spatial_exit::cli
