#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "spatial_exit/panel.hpp"
#include "spatial_exit/rng.hpp"
#include "spatial_exit/weights.hpp"

namespace spatial_exit::synthetic {

/// Firms of `blocks` industries in the Shenzhen area, `block_size` firms each,
/// one block key per industry.
///
/// Each industry occupies `parks` industrial parks scattered `spread_km`
/// around the industry centre; firms sit within `park_spread_km` of their
/// park. parks = 0 scatters firms directly around the centre instead.
struct BlockLayout {
  int blocks = 20;
  int block_size = 50;
  double spread_km = 3.0;
  int parks = 10;
  double park_spread_km = 0.1;
};

std::vector<GeoPoint> clustered_points(const BlockLayout& layout, Rng& rng);

/// Row-normalized inverse-distance W with one block per cluster.
SpatialWeights block_weights(const BlockLayout& layout, Rng& rng,
                             double d_min_km = kDefaultMinDistanceKm);

/// Intercept followed by k - 1 independent N(0, 1) columns.
Eigen::MatrixXd covariates(Eigen::Index n, Eigen::Index k, Rng& rng);

/// Panel skeleton of `firms` enterprises all active in `year`, with codes in
/// division 39 spread over several groups and classes, firms clustered in a
/// few industrial parks per group, and covariates varied
/// enough that every design column has variation. Exit years are left empty.
std::vector<EnterpriseRecord> skeleton(int firms, int year, std::uint64_t seed);

}  // namespace spatial_exit::synthetic
