#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

#include "spatial_exit/panel.hpp"

namespace spatial_exit {

/// Industry level at which spatial dependence is allowed.
enum class BlockLevel { Group, Class };

std::string_view to_string(BlockLevel level) noexcept;
IndustryLevel industry_level(BlockLevel level) noexcept;

/// One (year, block level) estimation cell.
///
/// Column order is fixed: intercept, years_of_operation,
/// log_registered_capital (log1p then z-scored), foreign_pct, region_taiwan,
/// region_us, joint_venture, tariffed, importer_exporter. Hong Kong and other
/// registration regions form the baseline.
struct DesignMatrix {
  int year = 0;
  BlockLevel block_level = BlockLevel::Group;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;  // 1 iff the firm exits in year + 1
  std::vector<std::string> columns;
  std::vector<std::string> ids;
  double log_capital_mean = 0.0;
  double log_capital_sd = 1.0;

  Eigen::Index rows() const noexcept { return x.rows(); }
  Eigen::Index cols() const noexcept { return x.cols(); }
};

const std::vector<std::string>& design_columns();

struct DesignCell {
  DesignMatrix design;
  std::vector<EnterpriseRecord> active;  // row-aligned with design.x
};

/// Throws TooFewRows (fewer than k + 2 active firms) or ConstantColumn.
DesignCell build_design(const PanelDataset& panel, int year, BlockLevel level);

/// SHA-256 over the dimensions, X, and y in row-major double bit patterns.
std::string design_hash(const DesignMatrix& design);

}  // namespace spatial_exit
