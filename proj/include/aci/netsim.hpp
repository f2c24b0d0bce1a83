// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "aci/core.hpp"

namespace aci::netsim {

// Thrown when a run produces no served UEs at all.
class empty_result_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Azimuth/elevation in degrees within some frame.
struct Direction {
  double az_deg = 0.0;
  double el_deg = 0.0;
};

struct ArrayGeometry {
  int rows = 1;
  int cols = 1;
  int elements() const { return rows * cols; }
};

// Two-carrier downlink deployment parameters.
struct NetworkScenario {
  double area_m = 1000.0;   // square side, wrap-around
  double isd_m = 200.0;     // sets HPPP density 4/(pi*ISD^2)
  double min_dist_m = 10.0; // UE-gNB 2D separation floor
  double fc_ghz = 28.0;
  double bw_hz = 190.80e6;
  double tx_power_dbm = 30.0;
  double gnb_height_min_m = 2.0;
  double gnb_height_max_m = 5.0;
  double ue_height_m = 1.6;
  double downtilt_deg = -12.0;
  int n_sectors = 3;
  double hpbw_deg = 65.0;
  ArrayGeometry gnb_array{8, 8};
  ArrayGeometry ue_array{4, 4};
  SaturationModel model;
  double ue_fill_cap_factor = 50.0;  // candidate UEs per sector before giving up
  // Adds the linear (undistorted) non-serving same-carrier power to the SINR
  // denominator on top of the distortion terms. Off by default.
  bool linear_cochannel_interference = false;
};

void validate(const NetworkScenario& scn);

// Per-carrier defaults and fitted models for the built-in designs.
NetworkScenario default_scenario(Design d);
SaturationModel builtin_model(Design d);

enum class Carrier : int { A = 0, B = 1 };

struct Gnb {
  Vec2 pos;
  double height_m = 0.0;
  Carrier carrier = Carrier::A;
  std::vector<double> sector_azimuth_deg;
};

struct Ue {
  Vec2 pos;
  double height_m = 0.0;
  Carrier carrier = Carrier::A;
  int serving_gnb = -1;
  int serving_sector = -1;
  std::uint32_t candidate_id = 0;  // keys this UE's channel draws
};

struct Drop {
  std::vector<Gnb> gnbs;
  std::vector<Ue> ues;            // one selected UE per filled sector
  int unfilled_sectors = 0;       // sectors left silent this drop
  std::uint32_t orphan_candidates = 0;  // candidates with no same-carrier gNB
};

// Per-UE received energies feeding the SINR model, all in watts.
struct LinkBudget {
  double rx_sig_energy = 0.0;        // serving link, both beamforming gains
  double rx_tot_same_carrier = 0.0;  // serving term plus non-serving w/o RX BF
  double rx_tot_adjacent = 0.0;      // other carrier, no RX BF
  double noise_energy = 0.0;         // kT * bandwidth
};

enum class SinrMode { full, no_aci, no_distortion };

struct UeReport {
  int drop_index = 0;
  int ue_index = 0;
  int serving_gnb = -1;
  int serving_sector = -1;
  double sinr_full = 0.0;
  double sinr_no_aci = 0.0;
  double sinr_no_distortion = 0.0;
};

// Torus geometry.
Vec2 torus_delta(const Vec2& from, const Vec2& to, double side);  // min-image to - from
double wraparound_distance(const Vec2& p, const Vec2& q, double side);

// Urban-microcell outdoor line-of-sight probability.
double los_probability(double d2d_m);

// Urban-microcell street-canyon path loss in dB. Shadowing is the caller's
// job (sigma 4 dB LOS / 7.82 dB NLOS).
double pathloss_umi_db(double d2d_m, double d3d_m, double h_bs_m, double h_ut_m,
                       double fc_ghz, bool los);
inline constexpr double kShadowSigmaLosDb = 4.0;
inline constexpr double kShadowSigmaNlosDb = 7.82;

// Parabolic element pattern, 8 dBi peak, 30 dB floor. az/el are given in the
// element's upright frame; the downtilt rotation is applied internally.
double element_gain_db(double az_deg, double el_deg, double hpbw_deg, double downtilt_deg);

// |a(steer)^H a(target)|^2 / N for a half-wavelength URA; N when steer hits
// the target exactly.
double beamforming_gain_db(const ArrayGeometry& array, const Direction& steer,
                           const Direction& target);

// Direction of global displacement d in a frame whose boresight points at
// azimuth az0 and elevation tilt (both degrees).
Direction local_direction(const Vec3& d, double boresight_az_deg, double boresight_el_deg);

// Per-link channel state, drawn once per (gnb, candidate UE) key and
// reproducible from the same seed in every phase.
struct LinkChannel {
  bool los = true;
  double shadow_db = 0.0;
};

LinkChannel link_channel(Seed seed, std::uint32_t gnb_index, std::uint32_t candidate_id,
                         double d2d_m);

// Association metric and serving-link energy: all TX/RX element and
// beamforming gains with both beams on target. Used both to pick the serving
// sector and as rx_sig_energy afterwards.
double serving_link_energy(const NetworkScenario& scn, const Gnb& gnb, int sector,
                           const Vec2& ue_pos, const LinkChannel& channel);

// HPPP gNB deployment with uniform heights, random sector rotations and fair
// carrier coins.
std::vector<Gnb> drop_gnbs(const NetworkScenario& scn, Seed seed);

// Uniform UE drops (min-distance enforced by resampling) until every sector
// has an associate or the cap is reached, then one UE kept per sector.
Drop drop_ues(const NetworkScenario& scn, std::vector<Gnb> gnbs, Seed seed);

// Budgets for every selected UE of the drop. Must be called with the same
// seed as drop_ues so channel draws agree.
std::vector<LinkBudget> build_link_budgets(const Drop& drop, const NetworkScenario& scn,
                                           Seed seed);

double compute_sinr(const LinkBudget& budget, const SaturationModel& model, SinrMode mode,
                    bool add_linear_cochannel = false);

struct DropsResult {
  std::vector<UeReport> reports;
  int unfilled_sectors = 0;
};

DropsResult run_drops(const NetworkScenario& scn, std::size_t n_drops, Seed seed,
                      unsigned n_threads = 1);

// Sorted dB values with cumulative fractions (i+1)/n.
struct CdfTable {
  std::vector<double> value_db;
  std::vector<double> cdf;
};

CdfTable empirical_cdf(std::span<const double> linear_values);

}  // namespace aci::netsim
