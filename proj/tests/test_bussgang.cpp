// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "aci/bussgang.hpp"
#include "aci/core.hpp"

using namespace aci;
using bussgang::SnrMeasurement;
using cpair = std::pair<std::complex<double>, std::complex<double>>;

namespace {

// The four fitted parameter sets shipped with the receiver designs.
const SaturationModel kModels[] = {
    {1.3865, 0.0090, 0.0058},
    {1.2725, 0.0024, 0.0017},
    {0.3099, 0.0021, 0.0014},
    {0.1862, 0.0004, 0.0003},
};

std::vector<SnrMeasurement> synthesize(const SaturationModel& truth,
                                       const std::vector<double>& sig_db,
                                       const std::vector<double>& int_db, double noise_db,
                                       Rng* rng) {
  std::vector<SnrMeasurement> out;
  for (double s : sig_db) {
    for (double i : int_db) {
      const double gs = db_to_linear(s);
      const double gi = std::isinf(i) && i < 0 ? 0.0 : db_to_linear(i);
      double out_db = linear_to_db(bussgang::model_predict(truth, SnrPair(gs, gi)));
      if (noise_db > 0.0 && rng != nullptr) {
        out_db += noise_db * rng->normal();
      }
      out.push_back({gs, gi, db_to_linear(out_db)});
    }
  }
  return out;
}

std::vector<double> range_db(double lo, double hi, double step) {
  std::vector<double> v;
  for (double x = lo; x <= hi + 1e-9; x += step) {
    v.push_back(x);
  }
  return v;
}

}  // namespace

TEST_CASE("estimator recovers an exact linear map") {
  std::vector<cpair> pairs;
  Rng rng(1);
  for (int i = 0; i < 64; ++i) {
    const auto x = rng.cnormal();
    pairs.emplace_back(x, 2.0 * x);
  }
  const auto est = bussgang::estimate_bussgang(pairs);
  CHECK(est.a.real() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(est.a.imag()) < 1e-12);
  CHECK(est.tau < 1e-20);
  CHECK(est.n_samples == 64);
}

TEST_CASE("estimator recovers additive noise power") {
  std::vector<cpair> pairs;
  Rng rng(2);
  const double noise_var = 0.25;
  for (int i = 0; i < 100000; ++i) {
    const auto x = rng.cnormal();
    pairs.emplace_back(x, x + std::sqrt(noise_var) * rng.cnormal());
  }
  const auto est = bussgang::estimate_bussgang(pairs);
  CHECK(std::abs(est.a - std::complex<double>{1.0, 0.0}) < 0.01);
  CHECK(est.tau == doctest::Approx(noise_var).epsilon(0.05));
}

TEST_CASE("independent output gives near-zero gain") {
  std::vector<cpair> pairs;
  Rng rng(3);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    pairs.emplace_back(rng.cnormal(), rng.cnormal());
  }
  const auto est = bussgang::estimate_bussgang(pairs);
  CHECK(std::abs(est.a) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("estimator residual is uncorrelated with the input") {
  Rng rng(4);
  std::vector<cpair> pairs;
  for (int i = 0; i < 5000; ++i) {
    const auto x = rng.cnormal();
    // deliberately nonlinear channel
    pairs.emplace_back(x, x * std::abs(x) + 0.3 * rng.cnormal());
  }
  const auto est = bussgang::estimate_bussgang(pairs);
  std::complex<double> corr{0.0, 0.0};
  double energy = 0.0;
  for (const auto& [x, y] : pairs) {
    corr += (y - est.a * x) * std::conj(x);
    energy += std::norm(x);
  }
  CHECK(std::abs(corr) / energy < 1e-10);
}

TEST_CASE("estimator rejects degenerate inputs") {
  CHECK_THROWS_AS(bussgang::estimate_bussgang(std::vector<cpair>{{{1, 0}, {1, 0}}}),
                  std::invalid_argument);
  const std::vector<cpair> zeros(4, {{0.0, 0.0}, {1.0, 0.0}});
  CHECK_THROWS_AS(bussgang::estimate_bussgang(zeros), std::invalid_argument);
}

TEST_CASE("output snr") {
  CHECK(bussgang::output_snr({{1.0, 0.0}, 1.0, 2}, 1.0) == doctest::Approx(1.0));
  CHECK(bussgang::output_snr({{2.0, 0.0}, 1.0, 2}, 1.0) == doctest::Approx(4.0));
  CHECK(std::isinf(bussgang::output_snr({{1.0, 0.0}, 0.0, 2}, 10.0)));
}

TEST_CASE("identity channel with noise hits the nominal output SNR") {
  Rng rng(6);
  for (double gamma : {1.0, 10.0, 100.0}) {
    std::vector<cpair> pairs;
    for (int i = 0; i < 100000; ++i) {
      const auto x = std::sqrt(gamma) * rng.cnormal();
      pairs.emplace_back(x, x + rng.cnormal());
    }
    const auto est = bussgang::estimate_bussgang(pairs);
    CHECK(bussgang::output_snr(est, gamma) == doctest::Approx(gamma).epsilon(0.05));
  }
}

TEST_CASE("model prediction") {
  const SaturationModel m = kModels[0];
  CHECK(bussgang::model_predict(m, SnrPair(0.0, 0.0)) == 0.0);
  CHECK(bussgang::model_predict(m, SnrPair(10.0, 0.0)) ==
        doctest::Approx(12.7202).epsilon(1e-4));
  // saturation constant beta/alpha1
  for (const auto& model : kModels) {
    const double sat = model.beta / model.alpha1;
    CHECK(bussgang::model_predict(model, SnrPair(1e8, 0.0)) ==
          doctest::Approx(sat).epsilon(1e-3));
    CHECK(bussgang::model_predict(model, SnrPair(1e10, 50.0)) ==
          doctest::Approx(sat).epsilon(1e-3));
  }
}

TEST_CASE("model is monotone in both arguments") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const SaturationModel m(rng.uniform(0.05, 3.0), rng.uniform(1e-5, 0.1),
                            rng.uniform(1e-5, 0.1));
    const double g1 = rng.uniform(0.0, 1e4);
    const double g2 = g1 + rng.uniform(1e-3, 1e4);
    const double gi = rng.uniform(0.0, 1e4);
    CHECK(bussgang::model_predict(m, SnrPair(g2, gi)) >
          bussgang::model_predict(m, SnrPair(g1, gi)));
    const double gi2 = gi + rng.uniform(1e-3, 1e4);
    CHECK(bussgang::model_predict(m, SnrPair(g2, gi2)) <
          bussgang::model_predict(m, SnrPair(g2, gi)));
  }
}

TEST_CASE("heuristic initialization") {
  const SaturationModel a = bussgang::heuristic_init(1.0, 100.0);
  CHECK(a.beta == doctest::Approx(1.0));
  CHECK(a.alpha1 == doctest::Approx(0.01));
  CHECK(a.alpha2 == doctest::Approx(0.01));

  const SaturationModel b = bussgang::heuristic_init(2.0, 50.0);
  CHECK(b.beta == doctest::Approx(0.5));
  CHECK(b.alpha1 == doctest::Approx(0.01));
  CHECK(b.alpha2 == doctest::Approx(0.01));

  // the initialized model saturates exactly at gamma_sat
  CHECK(b.beta / b.alpha1 == doctest::Approx(50.0));

  CHECK_THROWS_AS(bussgang::heuristic_init(0.5, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(bussgang::heuristic_init(2.0, 0.0), std::invalid_argument);
}

TEST_CASE("noiseless fit recovers the generating parameters") {
  const std::vector<double> sig_db = {0.0, 10.0, 20.0, 30.0, 40.0, 50.0};
  const std::vector<double> int_db = {-std::numeric_limits<double>::infinity(), 10.0, 30.0,
                                      50.0};
  for (const auto& truth : kModels) {
    const auto data = synthesize(truth, sig_db, int_db, 0.0, nullptr);
    const auto init = bussgang::init_from_measurements(data, 2.0);
    const auto report = bussgang::fit_model(data, init);
    CHECK(report.converged);
    CHECK(report.residual_norm < 1e-8);
    CHECK(report.model.beta == doctest::Approx(truth.beta).epsilon(1e-3));
    CHECK(report.model.alpha1 == doctest::Approx(truth.alpha1).epsilon(1e-3));
    CHECK(report.model.alpha2 == doctest::Approx(truth.alpha2).epsilon(1e-3));
  }
}

TEST_CASE("mildly noisy fit stays close") {
  const std::vector<double> sig_db = range_db(-10.0, 60.0, 5.0);
  const std::vector<double> int_db = {-std::numeric_limits<double>::infinity(), 10.0, 30.0,
                                      50.0};
  const SaturationModel truth = kModels[0];
  int good = 0;
  for (int seed = 0; seed < 5; ++seed) {
    Rng rng(100 + seed);
    const auto data = synthesize(truth, sig_db, int_db, 0.1, &rng);
    const auto report = bussgang::fit_model(data, bussgang::init_from_measurements(data, 2.0));
    const bool ok = report.converged &&
                    std::abs(report.model.beta / truth.beta - 1.0) < 0.10 &&
                    std::abs(report.model.alpha1 / truth.alpha1 - 1.0) < 0.10 &&
                    std::abs(report.model.alpha2 / truth.alpha2 - 1.0) < 0.10;
    good += ok ? 1 : 0;
  }
  CHECK(good >= 4);
}

TEST_CASE("fit identifiability errors name the deficient axis") {
  const SaturationModel truth = kModels[0];
  // too few points
  const auto two = synthesize(truth, {0.0, 10.0}, {10.0}, 0.0, nullptr);
  CHECK_THROWS_AS(bussgang::fit_model(two, truth), bussgang::identifiability_error);

  // single gamma_int value
  const auto flat_int = synthesize(truth, {0.0, 10.0, 20.0, 30.0}, {10.0}, 0.0, nullptr);
  CHECK_THROWS_WITH_AS(bussgang::fit_model(flat_int, truth),
                       doctest::Contains("gamma_int"), bussgang::identifiability_error);

  // single gamma_sig value
  const auto flat_sig = synthesize(truth, {20.0}, {0.0, 10.0, 30.0}, 0.0, nullptr);
  CHECK_THROWS_WITH_AS(bussgang::fit_model(flat_sig, truth),
                       doctest::Contains("gamma_sig"), bussgang::identifiability_error);
}

TEST_CASE("fit rejects nonpositive measurements") {
  std::vector<SnrMeasurement> bad = {{1.0, 0.0, 1.0}, {10.0, 1.0, 0.0}, {100.0, 2.0, 3.0}};
  CHECK_THROWS_AS(bussgang::fit_model(bad, SaturationModel(1.0, 0.01, 0.01)),
                  std::invalid_argument);
}

TEST_CASE("capacity lower bound") {
  CHECK(bussgang::capacity_lower_bound(0.0, 1.0, 4, 8, 1.0) == 0.0);
  CHECK(bussgang::capacity_lower_bound(3.0, 1.0, 8, 8, 1.0) == doctest::Approx(2.0));
  CHECK(bussgang::capacity_lower_bound(3.0, 1.0, 8, 8, 2.0) ==
        doctest::Approx(2.0 * std::log2(2.5)).epsilon(1e-12));
  CHECK_THROWS_AS(bussgang::capacity_lower_bound(3.0, 1.0, 8, 8, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(bussgang::capacity_lower_bound(3.0, 1.0, 9, 8, 1.0), std::invalid_argument);
}

TEST_CASE("capacity bound is monotone in snr and oversampling") {
  Rng rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const double g1 = rng.uniform(0.0, 1e4);
    const double g2 = g1 + rng.uniform(0.0, 1e4);
    const double z1 = rng.uniform(1.0, 16.0);
    const double z2 = z1 + rng.uniform(0.0, 16.0);
    const double c11 = bussgang::capacity_lower_bound(g1, 2e8, 512, 1024, z1);
    const double c21 = bussgang::capacity_lower_bound(g2, 2e8, 512, 1024, z1);
    const double c12 = bussgang::capacity_lower_bound(g1, 2e8, 512, 1024, z2);
    CHECK(c21 >= c11);
    CHECK(c12 >= c11 * (1.0 - 1e-12));
  }
}
