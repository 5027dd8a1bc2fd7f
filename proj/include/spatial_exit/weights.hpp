#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spatial_exit/design.hpp"
#include "spatial_exit/panel.hpp"

namespace spatial_exit {

inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kDefaultMinDistanceKm = 0.001;

/// Haversine great-circle distance in kilometres.
double great_circle_km(GeoPoint a, GeoPoint b) noexcept;

struct WeightEntry {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  double weight = 0.0;
};

/// Sparse spatial weight matrix with zero diagonal.
///
/// The sparsity pattern is symmetric, so its connected components ("blocks")
/// partition the firms and W is block diagonal after permutation. Isolated
/// firms form singleton blocks with an all-zero row.
class SpatialWeights {
 public:
  SpatialWeights() = default;

  /// Validates the invariants: indices in range, no diagonal, weights > 0,
  /// symmetric pattern, no duplicate entries. Throws InvalidArgument.
  static SpatialWeights from_entries(Eigen::Index n, std::vector<WeightEntry> entries,
                                     bool row_normalized = false);

  /// n x n all-zero matrix: every firm isolated.
  static SpatialWeights empty(Eigen::Index n);

  Eigen::Index size() const noexcept { return n_; }
  const std::vector<WeightEntry>& entries() const noexcept { return entries_; }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const noexcept {
    return matrix_;
  }
  const std::vector<std::vector<Eigen::Index>>& blocks() const noexcept { return blocks_; }
  const std::vector<Eigen::Index>& isolated_rows() const noexcept { return isolated_; }
  bool has_neighbors() const noexcept { return !entries_.empty(); }

  bool row_normalized() const noexcept { return row_normalized_; }
  std::optional<BlockLevel> block_level() const noexcept { return block_level_; }
  double d_min_km() const noexcept { return d_min_km_; }

  Eigen::MatrixXd dense() const;
  /// W restricted to blocks()[b], rows and columns in block order.
  Eigen::MatrixXd block_dense(std::size_t b) const;

  Eigen::VectorXd operator*(const Eigen::VectorXd& v) const { return matrix_ * v; }
  Eigen::MatrixXd operator*(const Eigen::MatrixXd& m) const { return matrix_ * m; }

  /// Same matrix with rows and columns relabelled: new index p[i] for old i.
  SpatialWeights permuted(std::span<const Eigen::Index> p) const;

 private:
  friend SpatialWeights row_normalize(const SpatialWeights&);
  friend SpatialWeights build_weights_from_distances(
      std::span<const std::string>, const std::function<double(Eigen::Index, Eigen::Index)>&,
      double, std::optional<BlockLevel>);

  Eigen::Index n_ = 0;
  std::vector<WeightEntry> entries_;  // sorted by (row, col)
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix_;
  std::vector<std::vector<Eigen::Index>> blocks_;
  std::vector<Eigen::Index> isolated_;
  bool row_normalized_ = false;
  std::optional<BlockLevel> block_level_;
  double d_min_km_ = kDefaultMinDistanceKm;
};

/// Divides each non-empty row by its sum.
SpatialWeights row_normalize(const SpatialWeights& w);

/// Inverse-distance weights between firms sharing a block key, then
/// row-normalized. Raw weight is 1 / max(d_ij, d_min_km).
SpatialWeights build_weights_from_distances(
    std::span<const std::string> block_keys,
    const std::function<double(Eigen::Index, Eigen::Index)>& distance_km,
    double d_min_km, std::optional<BlockLevel> level = std::nullopt);

SpatialWeights build_weights(std::span<const EnterpriseRecord> records, BlockLevel level,
                             double d_min_km = kDefaultMinDistanceKm);

/// Debug dump: i,j,weight (0-based indices).
void write_weights_csv(std::ostream& out, const SpatialWeights& w);

}  // namespace spatial_exit
