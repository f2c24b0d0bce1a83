// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "aci/core.hpp"
#include "aci/netsim.hpp"

using namespace aci;
using namespace aci::netsim;

TEST_CASE("wraparound distance") {
  CHECK(wraparound_distance({0.0, 0.0}, {990.0, 0.0}, 1000.0) == doctest::Approx(10.0));
  CHECK(wraparound_distance({123.0, 456.0}, {123.0, 456.0}, 1000.0) == 0.0);
  CHECK(wraparound_distance({0.0, 0.0}, {500.0, 500.0}, 1000.0) ==
        doctest::Approx(707.10678).epsilon(1e-6));
  // min-image displacement points the short way
  const Vec2 d = torus_delta({0.0, 0.0}, {990.0, 10.0}, 1000.0);
  CHECK(d.x == doctest::Approx(-10.0));
  CHECK(d.y == doctest::Approx(10.0));
}

TEST_CASE("line of sight probability") {
  CHECK(los_probability(10.0) == 1.0);
  CHECK(los_probability(18.0) == 1.0);
  CHECK(los_probability(100.0) == doctest::Approx(0.2311).epsilon(1e-3));
  CHECK_THROWS_AS(los_probability(-1.0), std::invalid_argument);
}

TEST_CASE("street canyon path loss") {
  // short LOS link below the breakpoint
  CHECK(pathloss_umi_db(100.0, 100.0, 3.0, 1.6, 28.0, true) ==
        doctest::Approx(32.4 + 42.0 + 20.0 * std::log10(28.0)).epsilon(1e-6));
  // extrapolated carrier
  CHECK(pathloss_umi_db(100.0, 100.0, 3.0, 1.6, 140.0, true) ==
        doctest::Approx(32.4 + 42.0 + 20.0 * std::log10(140.0)).epsilon(1e-6));
  // NLOS never undercuts LOS
  for (double d : {15.0, 60.0, 200.0, 800.0}) {
    const double d3 = std::sqrt(d * d + 2.0);
    CHECK(pathloss_umi_db(d, d3, 4.0, 1.6, 28.0, false) >=
          pathloss_umi_db(d, d3, 4.0, 1.6, 28.0, true));
  }
  // dual slope beyond the breakpoint: steeper than 21 dB/decade
  const double near = pathloss_umi_db(300.0, 300.0, 5.0, 1.6, 28.0, true);
  const double far = pathloss_umi_db(3000.0, 3000.0, 5.0, 1.6, 28.0, true);
  CHECK(far - near > 21.0);
  CHECK_THROWS_AS(pathloss_umi_db(5.0, 5.0, 3.0, 1.6, 28.0, true), std::invalid_argument);
}

TEST_CASE("element pattern") {
  CHECK(element_gain_db(0.0, 0.0, 65.0, 0.0) == doctest::Approx(8.0));
  // boresight of a tilted element
  CHECK(element_gain_db(0.0, -12.0, 65.0, -12.0) == doctest::Approx(8.0).epsilon(1e-9));
  // 3 dB point at half the beamwidth
  CHECK(element_gain_db(32.5, 0.0, 65.0, 0.0) == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(element_gain_db(0.0, 32.5, 65.0, 0.0) == doctest::Approx(5.0).epsilon(1e-6));
  // floor 30 dB below peak
  CHECK(element_gain_db(180.0, 0.0, 65.0, 0.0) == doctest::Approx(-22.0));
}

TEST_CASE("beamforming gain") {
  const ArrayGeometry ura{8, 8};
  const Direction dir{25.0, -10.0};
  CHECK(beamforming_gain_db(ura, dir, dir) == doctest::Approx(10.0 * std::log10(64.0)));
  CHECK(beamforming_gain_db({1, 1}, {0.0, 0.0}, {77.0, 33.0}) == doctest::Approx(0.0));

  // on-target gain is the element count for any shape
  Rng rng(71);
  for (const ArrayGeometry shape : {ArrayGeometry{2, 7}, {16, 16}, {1, 5}, {3, 3}}) {
    const Direction d{rng.uniform(-90.0, 90.0), rng.uniform(-60.0, 60.0)};
    CHECK(beamforming_gain_db(shape, d, d) ==
          doctest::Approx(10.0 * std::log10(shape.elements())).epsilon(1e-12));
  }

  // steering one DFT bin away in the column coordinate nulls the response
  const double u_null = 2.0 / 8.0;  // one DFT grid step for an 8-column array
  const Direction steer{0.0, 0.0};
  const Direction target{std::asin(u_null) * 180.0 / M_PI, 0.0};
  CHECK(beamforming_gain_db(ura, steer, target) <= -20.0);
}

TEST_CASE("gnb drops follow the deployment density") {
  NetworkScenario scn = default_scenario(Design::rx28_d1);
  double total = 0.0;
  const int n_drops = 300;
  for (int d = 0; d < n_drops; ++d) {
    const auto gnbs = drop_gnbs(scn, Seed{static_cast<std::uint64_t>(d)});
    total += static_cast<double>(gnbs.size());
    if (d == 0) {
      for (const auto& g : gnbs) {
        CHECK(g.pos.x >= 0.0);
        CHECK(g.pos.x < scn.area_m);
        CHECK(g.height_m >= scn.gnb_height_min_m);
        CHECK(g.height_m <= scn.gnb_height_max_m);
        CHECK(g.sector_azimuth_deg.size() == 3);
      }
    }
  }
  CHECK(total / n_drops == doctest::Approx(31.83).epsilon(0.10));

  // vanishing density
  scn.isd_m = 1e6;
  CHECK(drop_gnbs(scn, Seed{1}).empty());

  // determinism
  scn.isd_m = 200.0;
  const auto a = drop_gnbs(scn, Seed{7});
  const auto b = drop_gnbs(scn, Seed{7});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].pos.x == b[i].pos.x);
    CHECK(a[i].height_m == b[i].height_m);
    CHECK((a[i].carrier == b[i].carrier));
  }
}

namespace {

NetworkScenario small_scenario() {
  NetworkScenario scn = default_scenario(Design::rx28_d1);
  scn.area_m = 500.0;
  scn.isd_m = 250.0;  // a handful of gNBs
  return scn;
}

std::vector<Gnb> one_gnb_layout(const NetworkScenario& scn, Carrier carrier) {
  Gnb g;
  g.pos = {scn.area_m / 2.0, scn.area_m / 2.0};
  g.height_m = 4.0;
  g.carrier = carrier;
  g.sector_azimuth_deg = {0.0, 120.0, 240.0};
  return {g};
}

}  // namespace

TEST_CASE("ue drops cover every sector of a lone gnb") {
  const NetworkScenario scn = small_scenario();
  const Drop drop = drop_ues(scn, one_gnb_layout(scn, Carrier::A), Seed{3});
  CHECK(drop.unfilled_sectors == 0);
  REQUIRE(drop.ues.size() == 3);
  std::set<int> sectors;
  for (const auto& ue : drop.ues) {
    sectors.insert(ue.serving_sector);
    CHECK(ue.serving_gnb == 0);
    CHECK((ue.carrier == Carrier::A));
    CHECK(wraparound_distance(ue.pos, drop.gnbs[0].pos, scn.area_m) >= scn.min_dist_m);
  }
  CHECK(sectors.size() == 3);
}

TEST_CASE("ue drops respect the minimum distance everywhere") {
  NetworkScenario scn = small_scenario();
  const auto gnbs = drop_gnbs(scn, Seed{11});
  REQUIRE(!gnbs.empty());
  const Drop drop = drop_ues(scn, gnbs, Seed{11});
  for (const auto& ue : drop.ues) {
    for (const auto& g : drop.gnbs) {
      CHECK(wraparound_distance(ue.pos, g.pos, scn.area_m) >= scn.min_dist_m);
    }
  }
}

TEST_CASE("ue selection is deterministic") {
  NetworkScenario scn = small_scenario();
  const auto gnbs = drop_gnbs(scn, Seed{13});
  REQUIRE(!gnbs.empty());
  const Drop a = drop_ues(scn, gnbs, Seed{13});
  const Drop b = drop_ues(scn, gnbs, Seed{13});
  REQUIRE(a.ues.size() == b.ues.size());
  for (std::size_t i = 0; i < a.ues.size(); ++i) {
    CHECK(a.ues[i].pos.x == b.ues[i].pos.x);
    CHECK(a.ues[i].candidate_id == b.ues[i].candidate_id);
    CHECK(a.ues[i].serving_gnb == b.ues[i].serving_gnb);
  }
}

TEST_CASE("serving assignment is the argmax over candidate sectors") {
  NetworkScenario scn = small_scenario();
  const auto gnbs = drop_gnbs(scn, Seed{17});
  REQUIRE(gnbs.size() >= 2);
  const Seed ue_seed{17};
  const Drop drop = drop_ues(scn, gnbs, ue_seed);
  REQUIRE(!drop.ues.empty());
  for (const auto& ue : drop.ues) {
    const double chosen = serving_link_energy(
        scn, drop.gnbs[ue.serving_gnb], ue.serving_sector, ue.pos,
        link_channel(ue_seed, static_cast<std::uint32_t>(ue.serving_gnb), ue.candidate_id,
                     wraparound_distance(ue.pos, drop.gnbs[ue.serving_gnb].pos, scn.area_m)));
    for (std::size_t g = 0; g < drop.gnbs.size(); ++g) {
      if (drop.gnbs[g].carrier != ue.carrier) {
        continue;
      }
      const auto ch =
          link_channel(ue_seed, static_cast<std::uint32_t>(g), ue.candidate_id,
                       wraparound_distance(ue.pos, drop.gnbs[g].pos, scn.area_m));
      for (int s = 0; s < scn.n_sectors; ++s) {
        CHECK(serving_link_energy(scn, drop.gnbs[g], s, ue.pos, ch) <= chosen * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("association is invariant under a common power scaling") {
  NetworkScenario scn = small_scenario();
  const auto gnbs = drop_gnbs(scn, Seed{19});
  REQUIRE(!gnbs.empty());
  const Drop base = drop_ues(scn, gnbs, Seed{19});

  NetworkScenario hot = scn;
  hot.tx_power_dbm = scn.tx_power_dbm + 20.0;  // scales every link energy alike
  const Drop scaled = drop_ues(hot, gnbs, Seed{19});
  REQUIRE(base.ues.size() == scaled.ues.size());
  for (std::size_t i = 0; i < base.ues.size(); ++i) {
    CHECK(base.ues[i].serving_gnb == scaled.ues[i].serving_gnb);
    CHECK(base.ues[i].serving_sector == scaled.ues[i].serving_sector);
    CHECK(base.ues[i].candidate_id == scaled.ues[i].candidate_id);
  }
}

TEST_CASE("lone link budget: all same-carrier energy is the serving energy") {
  NetworkScenario scn = small_scenario();
  const Seed seed{23};
  const Drop drop = drop_ues(scn, one_gnb_layout(scn, Carrier::A), seed);
  REQUIRE(drop.ues.size() == 3);
  const auto budgets = build_link_budgets(drop, scn, seed);
  REQUIRE(budgets.size() == 3);
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    CHECK(budgets[i].rx_sig_energy > 0.0);
    // the two other sectors of the same gNB also transmit on carrier A
    CHECK(budgets[i].rx_tot_same_carrier >= budgets[i].rx_sig_energy);
    CHECK(budgets[i].rx_tot_adjacent == 0.0);
    CHECK(budgets[i].noise_energy ==
          doctest::Approx(kThermalNoiseDensity * scn.bw_hz).epsilon(1e-12));
  }
}

TEST_CASE("adjacent-carrier gnb adds only to the adjacent total") {
  NetworkScenario scn = small_scenario();
  const Seed seed{29};

  auto gnbs = one_gnb_layout(scn, Carrier::A);
  Gnb other = gnbs[0];
  other.pos = {100.0, 100.0};
  other.carrier = Carrier::B;
  gnbs.push_back(other);

  const Drop drop = drop_ues(scn, gnbs, seed);
  const auto budgets = build_link_budgets(drop, scn, seed);
  REQUIRE(budgets.size() == drop.ues.size());
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    CHECK(budgets[i].rx_tot_adjacent > 0.0);
    CHECK(budgets[i].rx_tot_same_carrier >= budgets[i].rx_sig_energy);
  }
}

TEST_CASE("sinr model arithmetic and mode ordering") {
  const SaturationModel model(1.3865, 0.0090, 0.0058);
  const double kt = 1.0;
  LinkBudget b;
  b.noise_energy = kt;
  b.rx_sig_energy = 100.0 * kt;
  b.rx_tot_same_carrier = 120.0 * kt;
  b.rx_tot_adjacent = 50.0 * kt;
  CHECK(compute_sinr(b, model, SinrMode::full) == doctest::Approx(58.50).epsilon(1e-3));

  const SaturationModel unit(1.0, 0.0, 0.0);
  LinkBudget eq;
  eq.noise_energy = 3.0;
  eq.rx_sig_energy = 3.0;
  eq.rx_tot_same_carrier = 3.0;
  CHECK(compute_sinr(eq, unit, SinrMode::full) == doctest::Approx(1.0));

  const double full = compute_sinr(b, model, SinrMode::full);
  const double no_aci = compute_sinr(b, model, SinrMode::no_aci);
  const double no_dist = compute_sinr(b, model, SinrMode::no_distortion);
  CHECK(full <= no_aci);
  CHECK(no_aci <= no_dist);

  // optional undistorted co-channel term shrinks the SINR further
  CHECK(compute_sinr(b, model, SinrMode::full, true) < full);
}

TEST_CASE("per-ue mode ordering holds across whole drops") {
  NetworkScenario scn = default_scenario(Design::rx28_d1);
  const auto result = run_drops(scn, 10, Seed{31}, 4);
  CHECK(!result.reports.empty());
  for (const auto& r : result.reports) {
    CHECK(r.sinr_full <= r.sinr_no_aci);
    CHECK(r.sinr_no_aci <= r.sinr_no_distortion);
  }
}

TEST_CASE("run_drops is deterministic and thread-count independent") {
  NetworkScenario scn = small_scenario();
  const auto a = run_drops(scn, 4, Seed{37}, 1);
  const auto b = run_drops(scn, 4, Seed{37}, 4);
  REQUIRE(a.reports.size() == b.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    CHECK(a.reports[i].sinr_full == b.reports[i].sinr_full);
    CHECK(a.reports[i].serving_gnb == b.reports[i].serving_gnb);
    CHECK(a.reports[i].drop_index == b.reports[i].drop_index);
  }
}

TEST_CASE("empirical cdf is monotone from 0 to 1") {
  NetworkScenario scn = small_scenario();
  const auto result = run_drops(scn, 5, Seed{41}, 2);
  std::vector<double> vals;
  for (const auto& r : result.reports) {
    vals.push_back(r.sinr_full);
  }
  const CdfTable cdf = empirical_cdf(vals);
  REQUIRE(cdf.value_db.size() == vals.size());
  CHECK(cdf.cdf.front() > 0.0);
  CHECK(cdf.cdf.back() == doctest::Approx(1.0));
  for (std::size_t i = 1; i < cdf.cdf.size(); ++i) {
    CHECK(cdf.value_db[i] >= cdf.value_db[i - 1]);
    CHECK(cdf.cdf[i] >= cdf.cdf[i - 1]);
  }
  CHECK_THROWS_AS(empirical_cdf(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("a tiny candidate cap leaves sectors unfilled but does not fail") {
  NetworkScenario scn = small_scenario();
  scn.ue_fill_cap_factor = 0.4;  // not enough candidates for every sector
  const auto gnbs = drop_gnbs(scn, Seed{43});
  REQUIRE(!gnbs.empty());
  const Drop drop = drop_ues(scn, gnbs, Seed{43});
  CHECK(drop.unfilled_sectors > 0);
  CHECK(drop.ues.size() + static_cast<std::size_t>(drop.unfilled_sectors) ==
        drop.gnbs.size() * 3);
  // budgets still work on the partial drop
  const auto budgets = build_link_budgets(drop, scn, Seed{43});
  CHECK(budgets.size() == drop.ues.size());
}

TEST_CASE("scenario validation") {
  NetworkScenario scn = default_scenario(Design::rx28_d1);
  scn.isd_m = -5.0;
  CHECK_THROWS_AS(validate(scn), std::invalid_argument);
  scn = default_scenario(Design::rx28_d1);
  scn.n_sectors = 0;
  CHECK_THROWS_AS(validate(scn), std::invalid_argument);
  scn = default_scenario(Design::rx28_d1);
  scn.gnb_height_max_m = scn.gnb_height_min_m - 1.0;
  CHECK_THROWS_AS(validate(scn), std::invalid_argument);
}

TEST_CASE("builtin models match the design table") {
  const SaturationModel m1 = builtin_model(Design::rx28_d1);
  CHECK(m1.beta == 1.3865);
  CHECK(m1.alpha1 == 0.0090);
  CHECK(m1.alpha2 == 0.0058);
  const NetworkScenario s140 = default_scenario(Design::rx140_d2);
  CHECK(s140.fc_ghz == 140.0);
  CHECK(s140.gnb_array.elements() == 256);
  CHECK(s140.ue_array.elements() == 64);
  CHECK(s140.model.beta == 0.1862);
}
