#include "spatial_exit/weights.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "spatial_exit/format.hpp"

namespace spatial_exit {

namespace {

constexpr double kDegToRad = 0.017453292519943295769;

void sort_entries(std::vector<WeightEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
}

Eigen::SparseMatrix<double, Eigen::RowMajor> to_sparse(Eigen::Index n,
                                                       const std::vector<WeightEntry>& entries) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(entries.size());
  for (const auto& e : entries) triplets.emplace_back(e.row, e.col, e.weight);
  Eigen::SparseMatrix<double, Eigen::RowMajor> m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

Eigen::Index find_root(std::vector<Eigen::Index>& parent, Eigen::Index i) {
  while (parent[static_cast<std::size_t>(i)] != i) {
    auto& p = parent[static_cast<std::size_t>(i)];
    p = parent[static_cast<std::size_t>(p)];
    i = p;
  }
  return i;
}

// Connected components of the sparsity pattern, ordered by smallest member.
std::vector<std::vector<Eigen::Index>> components(Eigen::Index n,
                                                  const std::vector<WeightEntry>& entries) {
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  for (const auto& e : entries) {
    const auto a = find_root(parent, e.row), b = find_root(parent, e.col);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
  std::map<Eigen::Index, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < n; ++i) groups[find_root(parent, i)].push_back(i);
  std::vector<std::vector<Eigen::Index>> out;
  out.reserve(groups.size());
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

}  // namespace

double great_circle_km(GeoPoint a, GeoPoint b) noexcept {
  const double phi1 = a.lat * kDegToRad, phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(0.5 * dphi), s2 = std::sin(0.5 * dlambda);
  const double h = std::min(1.0, s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

SpatialWeights SpatialWeights::from_entries(Eigen::Index n, std::vector<WeightEntry> entries,
                                            bool row_normalized) {
  sort_entries(entries);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n)
      throw Error(Errc::InvalidArgument, "weight entry index out of range");
    if (e.row == e.col) throw Error(Errc::InvalidArgument, "weight matrix diagonal must be zero");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw Error(Errc::InvalidArgument, "weights must be finite and strictly positive");
    if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col)
      throw Error(Errc::InvalidArgument, "duplicate weight entry");
  }
  for (const auto& e : entries) {
    const bool mirrored = std::binary_search(
        entries.begin(), entries.end(), WeightEntry{e.col, e.row, 0.0},
        [](const auto& a, const auto& b) {
          return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
    if (!mirrored)
      throw Error(Errc::InvalidArgument, "weight sparsity pattern must be symmetric");
  }

  SpatialWeights w;
  w.n_ = n;
  w.entries_ = std::move(entries);
  w.matrix_ = to_sparse(n, w.entries_);
  w.blocks_ = components(n, w.entries_);
  for (const auto& b : w.blocks_)
    if (b.size() == 1) w.isolated_.push_back(b.front());
  w.row_normalized_ = row_normalized;
  return w;
}

SpatialWeights SpatialWeights::empty(Eigen::Index n) { return from_entries(n, {}, true); }

Eigen::MatrixXd SpatialWeights::dense() const { return Eigen::MatrixXd(matrix_); }

Eigen::MatrixXd SpatialWeights::block_dense(std::size_t b) const {
  const auto& idx = blocks_.at(b);
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(matrix_, idx[a]); it;
         ++it) {
      const auto pos = std::lower_bound(idx.begin(), idx.end(), it.col()) - idx.begin();
      out(a, pos) = it.value();
    }
  }
  return out;
}

SpatialWeights SpatialWeights::permuted(std::span<const Eigen::Index> p) const {
  if (static_cast<Eigen::Index>(p.size()) != n_)
    throw Error(Errc::InvalidArgument, "permutation size mismatch");
  std::vector<WeightEntry> moved;
  moved.reserve(entries_.size());
  for (const auto& e : entries_)
    moved.push_back({p[static_cast<std::size_t>(e.row)], p[static_cast<std::size_t>(e.col)],
                     e.weight});
  auto w = from_entries(n_, std::move(moved), row_normalized_);
  w.block_level_ = block_level_;
  w.d_min_km_ = d_min_km_;
  return w;
}

SpatialWeights row_normalize(const SpatialWeights& w) {
  std::vector<double> sums(static_cast<std::size_t>(w.size()), 0.0);
  for (const auto& e : w.entries()) sums[static_cast<std::size_t>(e.row)] += e.weight;
  SpatialWeights out = w;
  for (auto& e : out.entries_) e.weight /= sums[static_cast<std::size_t>(e.row)];
  out.matrix_ = to_sparse(out.n_, out.entries_);
  out.row_normalized_ = true;
  return out;
}

SpatialWeights build_weights_from_distances(
    std::span<const std::string> block_keys,
    const std::function<double(Eigen::Index, Eigen::Index)>& distance_km, double d_min_km,
    std::optional<BlockLevel> level) {
  if (!(d_min_km > 0.0)) throw Error(Errc::InvalidArgument, "d_min_km must be positive");
  if (block_keys.empty()) throw Error(Errc::InvalidArgument, "no records for weight matrix");
  const auto n = static_cast<Eigen::Index>(block_keys.size());

  std::map<std::string_view, std::vector<Eigen::Index>> members;
  for (Eigen::Index i = 0; i < n; ++i) members[block_keys[static_cast<std::size_t>(i)]].push_back(i);

  // Distances are only evaluated inside a block.
  std::vector<WeightEntry> entries;
  for (const auto& [key, idx] : members) {
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        const double d = std::max(distance_km(idx[a], idx[b]), d_min_km);
        entries.push_back({idx[a], idx[b], 1.0 / d});
        entries.push_back({idx[b], idx[a], 1.0 / d});
      }
  }
  auto w = row_normalize(SpatialWeights::from_entries(n, std::move(entries)));
  w.block_level_ = level;
  w.d_min_km_ = d_min_km;
  return w;
}

SpatialWeights build_weights(std::span<const EnterpriseRecord> records, BlockLevel level,
                             double d_min_km) {
  std::vector<std::string> keys;
  keys.reserve(records.size());
  for (const auto& r : records) keys.push_back(r.industry.at(industry_level(level)));
  return build_weights_from_distances(
      keys,
      [&](Eigen::Index i, Eigen::Index j) {
        return great_circle_km(records[static_cast<std::size_t>(i)].location,
                               records[static_cast<std::size_t>(j)].location);
      },
      d_min_km, level);
}

void write_weights_csv(std::ostream& out, const SpatialWeights& w) {
  out << "i,j,weight\n";
  for (const auto& e : w.entries())
    out << e.row << ',' << e.col << ',' << fmt_shortest(e.weight) << '\n';
}

}  // namespace spatial_exit
