// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#include "aci/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aci::netsim {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kElementGainMaxDbi = 8.0;
constexpr double kElementFloorDb = 30.0;
constexpr double kDegToRad = M_PI / 180.0;

constexpr std::uint64_t kGnbTag = 0x474e42;
constexpr std::uint64_t kUePosTag = 0x5545504f;
constexpr std::uint64_t kSelectTag = 0x53454c;
constexpr std::uint64_t kChanTag = 0x4348414e;
constexpr std::uint64_t kDropTag = 0x44524f50;

double norm3(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

// Pattern on angles already expressed in the (possibly tilted) array frame.
double element_pattern_db(double az_deg, double el_deg, double hpbw_deg) {
  const double az = az_deg / hpbw_deg;
  const double el = el_deg / hpbw_deg;
  const double attenuation = std::min(12.0 * (az * az + el * el), kElementFloorDb);
  return kElementGainMaxDbi - attenuation;
}

double bf_gain_linear(const ArrayGeometry& array, const Direction& steer,
                      const Direction& target) {
  auto uv = [](const Direction& d) {
    const double az = d.az_deg * kDegToRad;
    const double el = d.el_deg * kDegToRad;
    return std::pair<double, double>{std::cos(el) * std::sin(az), std::sin(el)};
  };
  const auto [us, vs] = uv(steer);
  const auto [ut, vt] = uv(target);
  const double du = M_PI * (ut - us);
  const double dv = M_PI * (vt - vs);
  std::complex<double> col_sum{0.0, 0.0};
  for (int c = 0; c < array.cols; ++c) {
    col_sum += std::polar(1.0, du * c);
  }
  std::complex<double> row_sum{0.0, 0.0};
  for (int r = 0; r < array.rows; ++r) {
    row_sum += std::polar(1.0, dv * r);
  }
  return std::norm(col_sum) * std::norm(row_sum) / static_cast<double>(array.elements());
}

struct LinkGeometry {
  double d2d = 0.0;
  double d3d = 0.0;
  Vec3 delta;  // min-image displacement gNB -> UE, z = ue - gnb height
};

LinkGeometry link_geometry(const NetworkScenario& scn, const Gnb& gnb, const Vec2& ue_pos) {
  LinkGeometry g;
  const Vec2 d2 = torus_delta(gnb.pos, ue_pos, scn.area_m);
  g.delta = {d2.x, d2.y, scn.ue_height_m - gnb.height_m};
  g.d2d = std::hypot(d2.x, d2.y);
  g.d3d = norm3(g.delta);
  return g;
}

double path_gain_linear(const NetworkScenario& scn, const Gnb& gnb, const LinkGeometry& geo,
                        const LinkChannel& channel) {
  const double pl_db = pathloss_umi_db(geo.d2d, geo.d3d, gnb.height_m, scn.ue_height_m,
                                       scn.fc_ghz, channel.los) +
                       channel.shadow_db;
  return std::pow(10.0, -pl_db / 10.0);
}

}  // namespace

void validate(const NetworkScenario& scn) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(scn.area_m) || !positive(scn.isd_m) || !positive(scn.min_dist_m) ||
      !positive(scn.fc_ghz) || !positive(scn.bw_hz) || !positive(scn.hpbw_deg) ||
      !positive(scn.ue_height_m) || !positive(scn.ue_fill_cap_factor)) {
    throw std::invalid_argument("NetworkScenario: dimensional fields must be positive");
  }
  if (!std::isfinite(scn.tx_power_dbm) || !std::isfinite(scn.downtilt_deg)) {
    throw std::invalid_argument("NetworkScenario: power and downtilt must be finite");
  }
  if (!(scn.gnb_height_min_m > 0.0) || scn.gnb_height_max_m < scn.gnb_height_min_m) {
    throw std::invalid_argument("NetworkScenario: invalid gNB height range");
  }
  if (scn.n_sectors < 1) {
    throw std::invalid_argument("NetworkScenario: n_sectors must be >= 1");
  }
  if (scn.gnb_array.rows < 1 || scn.gnb_array.cols < 1 || scn.ue_array.rows < 1 ||
      scn.ue_array.cols < 1) {
    throw std::invalid_argument("NetworkScenario: array dimensions must be >= 1");
  }
  if (scn.min_dist_m >= scn.area_m / 2.0) {
    throw std::invalid_argument("NetworkScenario: min_dist_m too large for the area");
  }
}

SaturationModel builtin_model(Design d) {
  switch (d) {
    case Design::rx28_d1:
      return SaturationModel(1.3865, 0.0090, 0.0058);
    case Design::rx28_d2:
      return SaturationModel(1.2725, 0.0024, 0.0017);
    case Design::rx140_d1:
      return SaturationModel(0.3099, 0.0021, 0.0014);
    case Design::rx140_d2:
      return SaturationModel(0.1862, 0.0004, 0.0003);
  }
  throw std::invalid_argument("builtin_model: unknown design");
}

NetworkScenario default_scenario(Design d) {
  NetworkScenario scn;
  scn.model = builtin_model(d);
  if (d == Design::rx140_d1 || d == Design::rx140_d2) {
    scn.fc_ghz = 140.0;
    scn.bw_hz = 380.16e6;
    scn.gnb_array = {16, 16};
    scn.ue_array = {8, 8};
  }
  return scn;
}

Vec2 torus_delta(const Vec2& from, const Vec2& to, double side) {
  auto wrap = [side](double d) { return d - side * std::round(d / side); };
  return Vec2{wrap(to.x - from.x), wrap(to.y - from.y)};
}

double wraparound_distance(const Vec2& p, const Vec2& q, double side) {
  const Vec2 d = torus_delta(p, q, side);
  return std::hypot(d.x, d.y);
}

double los_probability(double d2d_m) {
  if (!(d2d_m >= 0.0)) {
    throw std::invalid_argument("los_probability: distance must be >= 0");
  }
  if (d2d_m <= 18.0) {
    return 1.0;
  }
  const double ratio = 18.0 / d2d_m;
  return ratio + std::exp(-d2d_m / 36.0) * (1.0 - ratio);
}

double pathloss_umi_db(double d2d_m, double d3d_m, double h_bs_m, double h_ut_m,
                       double fc_ghz, bool los) {
  if (!(d2d_m >= 10.0)) {
    throw std::invalid_argument("pathloss_umi_db: 2D distance below the 10 m validity floor");
  }
  if (!(fc_ghz > 0.0) || !(d3d_m >= d2d_m)) {
    throw std::invalid_argument("pathloss_umi_db: invalid frequency or 3D distance");
  }
  constexpr double h_env = 1.0;  // effective environment height
  const double bp =
      std::max(0.0, 4.0 * (h_bs_m - h_env) * (h_ut_m - h_env) * fc_ghz * 1e9 / kSpeedOfLight);
  double pl_los;
  if (d2d_m <= bp) {
    pl_los = 32.4 + 21.0 * std::log10(d3d_m) + 20.0 * std::log10(fc_ghz);
  } else {
    const double dh = h_bs_m - h_ut_m;
    pl_los = 32.4 + 40.0 * std::log10(d3d_m) + 20.0 * std::log10(fc_ghz) -
             9.5 * std::log10(bp * bp + dh * dh);
  }
  if (los) {
    return pl_los;
  }
  const double pl_nlos =
      22.4 + 35.3 * std::log10(d3d_m) + 21.3 * std::log10(fc_ghz) - 0.3 * (h_ut_m - 1.5);
  return std::max(pl_los, pl_nlos);
}

Direction local_direction(const Vec3& d, double boresight_az_deg, double boresight_el_deg) {
  const double n = norm3(d);
  if (!(n > 0.0)) {
    throw std::invalid_argument("local_direction: zero displacement");
  }
  const double x = d.x / n;
  const double y = d.y / n;
  const double z = d.z / n;
  const double a = boresight_az_deg * kDegToRad;
  const double t = boresight_el_deg * kDegToRad;
  // Undo the boresight azimuth, then the boresight elevation.
  const double x1 = std::cos(a) * x + std::sin(a) * y;
  const double y1 = -std::sin(a) * x + std::cos(a) * y;
  const double x2 = std::cos(t) * x1 + std::sin(t) * z;
  const double z2 = -std::sin(t) * x1 + std::cos(t) * z;
  return Direction{std::atan2(y1, x2) / kDegToRad,
                   std::asin(std::clamp(z2, -1.0, 1.0)) / kDegToRad};
}

double element_gain_db(double az_deg, double el_deg, double hpbw_deg, double downtilt_deg) {
  if (!std::isfinite(az_deg) || !std::isfinite(el_deg)) {
    throw std::invalid_argument("element_gain_db: angles must be finite");
  }
  const double az = az_deg * kDegToRad;
  const double el = el_deg * kDegToRad;
  const Vec3 v{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
  const Direction local = local_direction(v, 0.0, downtilt_deg);
  return element_pattern_db(local.az_deg, local.el_deg, hpbw_deg);
}

double beamforming_gain_db(const ArrayGeometry& array, const Direction& steer,
                           const Direction& target) {
  if (array.rows < 1 || array.cols < 1) {
    throw std::invalid_argument("beamforming_gain_db: array dimensions must be >= 1");
  }
  const double gain = bf_gain_linear(array, steer, target);
  if (gain <= 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(gain);
}

LinkChannel link_channel(Seed seed, std::uint32_t gnb_index, std::uint32_t candidate_id,
                         double d2d_m) {
  const std::uint64_t h = derive_state(seed, {kChanTag, gnb_index, candidate_id});
  const double u_los = u64_to_unit_double(mix64(h ^ 1));
  const double u1 = u64_to_unit_double(mix64(h ^ 2));
  const double u2 = u64_to_unit_double(mix64(h ^ 3));
  const double z = std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * M_PI * u2);
  LinkChannel ch;
  ch.los = u_los < los_probability(d2d_m);
  ch.shadow_db = (ch.los ? kShadowSigmaLosDb : kShadowSigmaNlosDb) * z;
  return ch;
}

double serving_link_energy(const NetworkScenario& scn, const Gnb& gnb, int sector,
                           const Vec2& ue_pos, const LinkChannel& channel) {
  const LinkGeometry geo = link_geometry(scn, gnb, ue_pos);
  const Direction tx_local =
      local_direction(geo.delta, gnb.sector_azimuth_deg[sector], scn.downtilt_deg);
  const double el_tx =
      std::pow(10.0, element_pattern_db(tx_local.az_deg, tx_local.el_deg, scn.hpbw_deg) / 10.0);
  // Beams dead on target at both ends; UE boresight on the serving sector.
  const double bf_tx = static_cast<double>(scn.gnb_array.elements());
  const double bf_rx = static_cast<double>(scn.ue_array.elements());
  const double el_rx = std::pow(10.0, kElementGainMaxDbi / 10.0);
  return dbm_to_watts(scn.tx_power_dbm) * el_tx * bf_tx *
         path_gain_linear(scn, gnb, geo, channel) * el_rx * bf_rx;
}

std::vector<Gnb> drop_gnbs(const NetworkScenario& scn, Seed seed) {
  validate(scn);
  Rng rng = derive_rng(seed, {kGnbTag});
  const double density = 4.0 / (M_PI * scn.isd_m * scn.isd_m);
  const double mean_count = density * scn.area_m * scn.area_m;
  const std::uint64_t count = rng.poisson(mean_count);
  std::vector<Gnb> gnbs;
  gnbs.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Gnb g;
    g.pos = {rng.uniform(0.0, scn.area_m), rng.uniform(0.0, scn.area_m)};
    g.height_m = rng.uniform(scn.gnb_height_min_m, scn.gnb_height_max_m);
    const double base_az = rng.uniform(0.0, 360.0);
    g.carrier = rng.uniform() < 0.5 ? Carrier::A : Carrier::B;
    g.sector_azimuth_deg.resize(scn.n_sectors);
    for (int s = 0; s < scn.n_sectors; ++s) {
      g.sector_azimuth_deg[s] = std::fmod(base_az + 360.0 * s / scn.n_sectors, 360.0);
    }
    gnbs.push_back(std::move(g));
  }
  return gnbs;
}

Drop drop_ues(const NetworkScenario& scn, std::vector<Gnb> gnbs, Seed seed) {
  validate(scn);
  if (gnbs.empty()) {
    throw std::invalid_argument("drop_ues: need at least one gNB");
  }
  const std::size_t total_sectors = gnbs.size() * static_cast<std::size_t>(scn.n_sectors);
  const std::size_t cap =
      static_cast<std::size_t>(std::ceil(scn.ue_fill_cap_factor * total_sectors));

  struct Candidate {
    Vec2 pos;
    std::uint32_t id;
  };
  std::vector<std::vector<Candidate>> associates(total_sectors);
  std::size_t filled = 0;
  std::uint32_t orphans = 0;

  Rng pos_rng = derive_rng(seed, {kUePosTag});
  for (std::uint32_t cand = 0; cand < cap && filled < total_sectors; ++cand) {
    Vec2 pos;
    bool accepted = false;
    for (int attempt = 0; attempt < 100000 && !accepted; ++attempt) {
      pos = {pos_rng.uniform(0.0, scn.area_m), pos_rng.uniform(0.0, scn.area_m)};
      accepted = true;
      for (const auto& g : gnbs) {
        if (wraparound_distance(pos, g.pos, scn.area_m) < scn.min_dist_m) {
          accepted = false;
          break;
        }
      }
    }
    if (!accepted) {
      throw std::runtime_error("drop_ues: cannot place a UE outside the exclusion discs");
    }
    const Carrier carrier = pos_rng.uniform() < 0.5 ? Carrier::A : Carrier::B;

    int best_gnb = -1;
    int best_sector = -1;
    double best_energy = -1.0;
    for (std::size_t g = 0; g < gnbs.size(); ++g) {
      if (gnbs[g].carrier != carrier) {
        continue;
      }
      const double d2d = wraparound_distance(pos, gnbs[g].pos, scn.area_m);
      const LinkChannel ch = link_channel(seed, static_cast<std::uint32_t>(g), cand, d2d);
      for (int s = 0; s < scn.n_sectors; ++s) {
        const double e = serving_link_energy(scn, gnbs[g], s, pos, ch);
        if (e > best_energy) {
          best_energy = e;
          best_gnb = static_cast<int>(g);
          best_sector = s;
        }
      }
    }
    if (best_gnb < 0) {
      ++orphans;
      continue;
    }
    auto& bucket = associates[static_cast<std::size_t>(best_gnb) * scn.n_sectors + best_sector];
    if (bucket.empty()) {
      ++filled;
    }
    bucket.push_back(Candidate{pos, cand});
  }

  Drop drop;
  drop.orphan_candidates = orphans;
  Rng sel_rng = derive_rng(seed, {kSelectTag});
  for (std::size_t key = 0; key < total_sectors; ++key) {
    auto& bucket = associates[key];
    if (bucket.empty()) {
      ++drop.unfilled_sectors;
      continue;
    }
    const Candidate& pick = bucket[sel_rng.uniform_index(bucket.size())];
    Ue ue;
    ue.pos = pick.pos;
    ue.height_m = scn.ue_height_m;
    const std::size_t g = key / scn.n_sectors;
    ue.carrier = gnbs[g].carrier;
    ue.serving_gnb = static_cast<int>(g);
    ue.serving_sector = static_cast<int>(key % scn.n_sectors);
    ue.candidate_id = pick.id;
    drop.ues.push_back(ue);
  }
  drop.gnbs = std::move(gnbs);
  return drop;
}

std::vector<LinkBudget> build_link_budgets(const Drop& drop, const NetworkScenario& scn,
                                           Seed seed) {
  validate(scn);
  const double tx_w = dbm_to_watts(scn.tx_power_dbm);
  const double noise = kThermalNoiseDensity * scn.bw_hz;

  // Beam of every transmitting sector, pointed at its own served UE.
  std::vector<std::vector<const Ue*>> served(drop.gnbs.size(),
                                             std::vector<const Ue*>(scn.n_sectors, nullptr));
  for (const Ue& ue : drop.ues) {
    served[ue.serving_gnb][ue.serving_sector] = &ue;
  }
  std::vector<std::vector<Direction>> steer(drop.gnbs.size(),
                                            std::vector<Direction>(scn.n_sectors));
  for (std::size_t g = 0; g < drop.gnbs.size(); ++g) {
    for (int s = 0; s < scn.n_sectors; ++s) {
      if (served[g][s] == nullptr) {
        continue;
      }
      const LinkGeometry geo = link_geometry(scn, drop.gnbs[g], served[g][s]->pos);
      steer[g][s] =
          local_direction(geo.delta, drop.gnbs[g].sector_azimuth_deg[s], scn.downtilt_deg);
    }
  }

  std::vector<LinkBudget> budgets;
  budgets.reserve(drop.ues.size());
  for (const Ue& ue : drop.ues) {
    const Gnb& serving = drop.gnbs[ue.serving_gnb];
    const LinkGeometry serving_geo = link_geometry(scn, serving, ue.pos);
    const LinkChannel serving_ch = link_channel(
        seed, static_cast<std::uint32_t>(ue.serving_gnb), ue.candidate_id, serving_geo.d2d);

    LinkBudget budget;
    budget.noise_energy = noise;
    budget.rx_sig_energy = serving_link_energy(scn, serving, ue.serving_sector, ue.pos, serving_ch);
    budget.rx_tot_same_carrier = budget.rx_sig_energy;

    // UE boresight: at the serving gNB.
    const Vec3 to_serving{-serving_geo.delta.x, -serving_geo.delta.y, -serving_geo.delta.z};
    const double ue_az = std::atan2(to_serving.y, to_serving.x) / kDegToRad;
    const double ue_el =
        std::asin(std::clamp(to_serving.z / norm3(to_serving), -1.0, 1.0)) / kDegToRad;

    for (std::size_t g = 0; g < drop.gnbs.size(); ++g) {
      const LinkGeometry geo = link_geometry(scn, drop.gnbs[g], ue.pos);
      const LinkChannel ch =
          link_channel(seed, static_cast<std::uint32_t>(g), ue.candidate_id, geo.d2d);
      const double gain = path_gain_linear(scn, drop.gnbs[g], geo, ch);
      for (int s = 0; s < scn.n_sectors; ++s) {
        if (served[g][s] == nullptr) {
          continue;  // silent sector
        }
        if (static_cast<int>(g) == ue.serving_gnb && s == ue.serving_sector) {
          continue;  // serving term already included with its RX BF gain
        }
        const Direction tgt =
            local_direction(geo.delta, drop.gnbs[g].sector_azimuth_deg[s], scn.downtilt_deg);
        const double el_tx =
            std::pow(10.0, element_pattern_db(tgt.az_deg, tgt.el_deg, scn.hpbw_deg) / 10.0);
        const double bf_tx = bf_gain_linear(scn.gnb_array, steer[g][s], tgt);
        const Vec3 arrival{-geo.delta.x, -geo.delta.y, -geo.delta.z};
        const Direction rx_local = local_direction(arrival, ue_az, ue_el);
        const double el_rx = std::pow(
            10.0, element_pattern_db(rx_local.az_deg, rx_local.el_deg, scn.hpbw_deg) / 10.0);
        // Distortion totals are spatially white: no RX beamforming gain here.
        const double energy = tx_w * el_tx * bf_tx * gain * el_rx;
        if (drop.gnbs[g].carrier == ue.carrier) {
          budget.rx_tot_same_carrier += energy;
        } else {
          budget.rx_tot_adjacent += energy;
        }
      }
    }
    budgets.push_back(budget);
  }
  return budgets;
}

double compute_sinr(const LinkBudget& budget, const SaturationModel& model, SinrMode mode,
                    bool add_linear_cochannel) {
  const double a1 = mode == SinrMode::no_distortion ? 0.0 : model.alpha1;
  const double a2 = mode == SinrMode::full ? model.alpha2 : 0.0;
  double denom = budget.noise_energy + a1 * budget.rx_tot_same_carrier +
                 a2 * budget.rx_tot_adjacent;
  if (add_linear_cochannel) {
    denom += std::max(budget.rx_tot_same_carrier - budget.rx_sig_energy, 0.0);
  }
  return model.beta * budget.rx_sig_energy / denom;
}

DropsResult run_drops(const NetworkScenario& scn, std::size_t n_drops, Seed seed,
                      unsigned n_threads) {
  validate(scn);
  if (n_drops < 1) {
    throw std::invalid_argument("run_drops: n_drops must be >= 1");
  }
  std::vector<std::vector<UeReport>> per_drop(n_drops);
  std::vector<int> unfilled(n_drops, 0);
  parallel_for(n_drops, n_threads, [&](std::size_t d) {
    const Seed gnb_seed{derive_state(seed, {kDropTag, d, 0})};
    const Seed ue_seed{derive_state(seed, {kDropTag, d, 1})};
    std::vector<Gnb> gnbs = drop_gnbs(scn, gnb_seed);
    if (gnbs.empty()) {
      return;
    }
    const Drop drop = drop_ues(scn, std::move(gnbs), ue_seed);
    const std::vector<LinkBudget> budgets = build_link_budgets(drop, scn, ue_seed);
    unfilled[d] = drop.unfilled_sectors;
    per_drop[d].reserve(budgets.size());
    for (std::size_t i = 0; i < budgets.size(); ++i) {
      UeReport r;
      r.drop_index = static_cast<int>(d);
      r.ue_index = static_cast<int>(i);
      r.serving_gnb = drop.ues[i].serving_gnb;
      r.serving_sector = drop.ues[i].serving_sector;
      const bool lin = scn.linear_cochannel_interference;
      r.sinr_full = compute_sinr(budgets[i], scn.model, SinrMode::full, lin);
      r.sinr_no_aci = compute_sinr(budgets[i], scn.model, SinrMode::no_aci, lin);
      r.sinr_no_distortion = compute_sinr(budgets[i], scn.model, SinrMode::no_distortion, lin);
      per_drop[d].push_back(r);
    }
  });

  DropsResult result;
  for (std::size_t d = 0; d < n_drops; ++d) {
    result.unfilled_sectors += unfilled[d];
    result.reports.insert(result.reports.end(), per_drop[d].begin(), per_drop[d].end());
  }
  if (result.reports.empty()) {
    throw empty_result_error("run_drops: no served UEs in any drop");
  }
  return result;
}

CdfTable empirical_cdf(std::span<const double> linear_values) {
  if (linear_values.empty()) {
    throw std::invalid_argument("empirical_cdf: need at least one value");
  }
  CdfTable table;
  table.value_db.reserve(linear_values.size());
  for (double v : linear_values) {
    table.value_db.push_back(linear_to_db(v));
  }
  std::sort(table.value_db.begin(), table.value_db.end());
  table.cdf.resize(table.value_db.size());
  const double n = static_cast<double>(table.value_db.size());
  for (std::size_t i = 0; i < table.cdf.size(); ++i) {
    table.cdf[i] = static_cast<double>(i + 1) / n;
  }
  return table;
}

}  // namespace aci::netsim
