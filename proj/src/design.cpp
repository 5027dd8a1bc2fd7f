#include "spatial_exit/design.hpp"

#include <cmath>
#include <cstring>

#include "spatial_exit/hashing.hpp"

namespace spatial_exit {

std::string_view to_string(BlockLevel level) noexcept {
  return level == BlockLevel::Group ? "group" : "class";
}

IndustryLevel industry_level(BlockLevel level) noexcept {
  return level == BlockLevel::Group ? IndustryLevel::Group : IndustryLevel::Class;
}

const std::vector<std::string>& design_columns() {
  static const std::vector<std::string> columns{
      "intercept",   "years_of_operation", "log_registered_capital",
      "foreign_pct", "region_taiwan",      "region_us",
      "joint_venture", "tariffed",         "importer_exporter"};
  return columns;
}

DesignCell build_design(const PanelDataset& panel, int year, BlockLevel level) {
  DesignCell cell;
  for (const auto& r : panel.records)
    if (r.active_in(year)) cell.active.push_back(r);

  const auto& columns = design_columns();
  const auto k = static_cast<Eigen::Index>(columns.size());
  const auto n = static_cast<Eigen::Index>(cell.active.size());
  if (n < k + 2)
    throw Error(Errc::TooFewRows, "year " + std::to_string(year) + ": " +
                                      std::to_string(n) + " active firms, need at least " +
                                      std::to_string(k + 2));

  DesignMatrix& d = cell.design;
  d.year = year;
  d.block_level = level;
  d.columns = columns;
  d.x.resize(n, k);
  d.y.resize(n);
  d.ids.reserve(cell.active.size());

  Eigen::VectorXd log_capital(n);
  for (Eigen::Index i = 0; i < n; ++i)
    log_capital(i) = std::log1p(cell.active[static_cast<std::size_t>(i)].registered_capital);
  d.log_capital_mean = log_capital.mean();
  d.log_capital_sd = std::sqrt((log_capital.array() - d.log_capital_mean).square().sum() /
                               static_cast<double>(n - 1));
  if (!(d.log_capital_sd > 0.0))
    throw Error(Errc::ConstantColumn, "constant column 'log_registered_capital'");

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = cell.active[static_cast<std::size_t>(i)];
    d.ids.push_back(r.id);
    d.y(i) = r.exits_after(year) ? 1.0 : 0.0;
    d.x(i, 0) = 1.0;
    d.x(i, 1) = r.years_of_operation(year);
    d.x(i, 2) = (log_capital(i) - d.log_capital_mean) / d.log_capital_sd;
    d.x(i, 3) = r.foreign_pct;
    d.x(i, 4) = r.region == Region::Taiwan ? 1.0 : 0.0;
    d.x(i, 5) = r.region == Region::US ? 1.0 : 0.0;
    d.x(i, 6) = r.legal_form == LegalForm::JointVenture ? 1.0 : 0.0;
    d.x(i, 7) = r.tariffed ? 1.0 : 0.0;
    d.x(i, 8) = r.importer_exporter ? 1.0 : 0.0;
  }

  for (Eigen::Index j = 1; j < k; ++j) {
    if (d.x.col(j).maxCoeff() == d.x.col(j).minCoeff())
      throw Error(Errc::ConstantColumn,
                  "constant column '" + columns[static_cast<std::size_t>(j)] + "'");
  }
  return cell;
}

std::string design_hash(const DesignMatrix& design) {
  std::string bytes;
  auto put = [&](const void* p, std::size_t len) {
    bytes.append(static_cast<const char*>(p), len);
  };
  const std::int64_t dims[2] = {design.x.rows(), design.x.cols()};
  put(dims, sizeof dims);
  for (Eigen::Index i = 0; i < design.x.rows(); ++i)
    for (Eigen::Index j = 0; j < design.x.cols(); ++j) {
      const double v = design.x(i, j);
      put(&v, sizeof v);
    }
  for (Eigen::Index i = 0; i < design.y.size(); ++i) {
    const double v = design.y(i);
    put(&v, sizeof v);
  }
  return sha256_hex(bytes);
}

}  // namespace spatial_exit
