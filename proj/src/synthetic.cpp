#include "spatial_exit/synthetic.hpp"

#include <array>
#include <cmath>
#include <string>

#include "spatial_exit/error.hpp"

namespace spatial_exit::synthetic {

namespace {

constexpr double kKmPerDegLat = 111.195;

GeoPoint offset_km(GeoPoint centre, double east_km, double north_km) {
  const double km_per_deg_lon = kKmPerDegLat * std::cos(centre.lat * 0.017453292519943295);
  return {centre.lon + east_km / km_per_deg_lon, centre.lat + north_km / kKmPerDegLat};
}

GeoPoint random_centre(Rng& rng) {
  return {113.80 + 0.55 * rng.uniform(), 22.50 + 0.30 * rng.uniform()};
}

}  // namespace

std::vector<GeoPoint> clustered_points(const BlockLayout& layout, Rng& rng) {
  if (layout.blocks < 1 || layout.block_size < 1)
    throw Error(Errc::InvalidArgument, "layout needs at least one block of one firm");
  std::vector<GeoPoint> points;
  points.reserve(static_cast<std::size_t>(layout.blocks * layout.block_size));
  for (int b = 0; b < layout.blocks; ++b) {
    const GeoPoint centre = random_centre(rng);
    if (layout.parks <= 0) {
      for (int i = 0; i < layout.block_size; ++i)
        points.push_back(offset_km(centre, layout.spread_km * rng.normal(),
                                   layout.spread_km * rng.normal()));
      continue;
    }
    std::vector<GeoPoint> parks;
    for (int p = 0; p < layout.parks; ++p)
      parks.push_back(offset_km(centre, layout.spread_km * rng.normal(),
                                layout.spread_km * rng.normal()));
    for (int i = 0; i < layout.block_size; ++i)
      points.push_back(offset_km(parks[static_cast<std::size_t>(i % layout.parks)],
                                 layout.park_spread_km * rng.normal(),
                                 layout.park_spread_km * rng.normal()));
  }
  return points;
}

SpatialWeights block_weights(const BlockLayout& layout, Rng& rng, double d_min_km) {
  const auto points = clustered_points(layout, rng);
  std::vector<std::string> keys;
  keys.reserve(points.size());
  for (int b = 0; b < layout.blocks; ++b)
    for (int i = 0; i < layout.block_size; ++i) keys.push_back("B" + std::to_string(b));
  return build_weights_from_distances(
      keys,
      [&](Eigen::Index i, Eigen::Index j) {
        return great_circle_km(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
      },
      d_min_km);
}

Eigen::MatrixXd covariates(Eigen::Index n, Eigen::Index k, Rng& rng) {
  Eigen::MatrixXd x(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < k; ++j) x(i, j) = rng.normal();
  }
  return x;
}

std::vector<EnterpriseRecord> skeleton(int firms, int year, std::uint64_t seed) {
  if (firms < 1) throw Error(Errc::InvalidArgument, "skeleton needs at least one firm");
  struct Cluster {
    const char* group;
    std::array<const char*, 2> classes;
    GeoPoint centre;
  };
  // Division 39 groups with two classes each; centres spread across the city.
  const std::array<Cluster, 6> clusters{{
      {"391", {"3911", "3912"}, {113.93, 22.55}},
      {"392", {"3921", "3922"}, {114.05, 22.63}},
      {"393", {"3931", "3932"}, {114.12, 22.70}},
      {"396", {"3961", "3962"}, {113.85, 22.72}},
      {"397", {"3971", "3972"}, {114.22, 22.60}},
      {"398", {"3981", "3982"}, {114.00, 22.52}},
  }};

  Rng rng(seed);
  // Five industrial parks per group, scattered around the group centre.
  constexpr int kParks = 5;
  std::array<std::array<GeoPoint, kParks>, clusters.size()> parks;
  for (std::size_t g = 0; g < clusters.size(); ++g)
    for (auto& park : parks[g])
      park = offset_km(clusters[g].centre, 3.0 * rng.normal(), 3.0 * rng.normal());

  std::vector<EnterpriseRecord> out;
  out.reserve(static_cast<std::size_t>(firms));
  for (int i = 0; i < firms; ++i) {
    const std::size_t g = rng.below(clusters.size());
    const auto& c = clusters[g];
    EnterpriseRecord r;
    char id[16];
    std::snprintf(id, sizeof id, "F%05d", i + 1);
    r.id = id;
    r.location = offset_km(parks[g][rng.below(kParks)], 0.1 * rng.normal(), 0.1 * rng.normal());
    r.industry = IndustryCode::make("C", "39", c.group, c.classes[rng.below(2)]);
    r.established_year = year - static_cast<int>(rng.below(25));
    r.registered_capital = std::round(std::exp(5.5 + 1.8 * rng.normal()) * 100.0) / 100.0;
    const double u = rng.uniform();
    r.legal_form = u < 0.80 ? LegalForm::ForeignOwned
                            : (u < 0.95 ? LegalForm::JointVenture : LegalForm::Other);
    r.foreign_pct = r.legal_form == LegalForm::JointVenture
                        ? std::round((0.2 + 0.6 * rng.uniform()) * 1000.0) / 1000.0
                        : 1.0;
    const double v = rng.uniform();
    r.region = v < 0.70 ? Region::HongKong
                        : (v < 0.80 ? Region::Taiwan : (v < 0.85 ? Region::US : Region::Other));
    r.tariffed = rng.uniform() < 0.9;
    r.importer_exporter = rng.uniform() < 0.5;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace spatial_exit::synthetic
