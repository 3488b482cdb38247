#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include <tdsrobust/freqbounds.hpp>
#include <tdsrobust/spectrum.hpp>
#include <tdsrobust/sysmodel.hpp>

#include "fixtures.hpp"

using namespace tdsr;
using Catch::Approx;

namespace {

SweepConfig cfg_for(const TdsSystem& sys) { return SweepConfig::defaults(sys); }

}  // namespace

TEST_CASE("sweep configuration", "[freqbounds]") {
  auto cfg = SweepConfig::defaults(fx::ex18());
  CHECK(cfg.grid_points == 4096);
  CHECK(cfg.refine_tol == 1e-6);
  // 10 (||a0|| + ||a1|| + 1 + 2 pi / h)
  const double a0n = spectral_norm(fx::ex18().a0), a1n = spectral_norm(fx::ex18().a1);
  CHECK(cfg.omega_max == Approx(10.0 * (a0n + a1n + 1.0 + 2.0 * 3.141592653589793)));

  SweepConfig bad = cfg;
  bad.refine_tol = 0.5;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("peak gain of the perturbation channel", "[freqbounds]") {
  SECTION("first-order lag peaks at zero frequency") {
    auto sys = fx::scalar_sys(-1.0, 0.0);
    auto [norm, wstar] = hinf_norm(sys, fx::scalar_ps(), cfg_for(sys));
    CHECK(norm == Approx(1.0).epsilon(1e-9));
    CHECK(wstar == Approx(0.0).margin(1e-4));
  }
  SECTION("full channel") {
    auto sys = fx::ex18();
    auto [norm, wstar] = hinf_norm(sys, fx::ex18_unstructured(), cfg_for(sys));
    CHECK(norm == Approx(9.443237215455165).epsilon(1e-6));
    CHECK(wstar == Approx(0.8911).margin(2e-3));
  }
  SECTION("restricted input channel") {
    auto sys = fx::ex18();
    auto [norm, wstar] = hinf_norm(sys, fx::ex18_b01(), cfg_for(sys));
    CHECK(1.0 / norm == Approx(0.24615181652683343).epsilon(1e-6));
    (void)wstar;
  }
  SECTION("doubling the grid does not move the result") {
    auto sys = fx::ex18();
    auto cfg = cfg_for(sys);
    auto [n1, w1] = hinf_norm(sys, fx::ex18_unstructured(), cfg);
    cfg.grid_points *= 2;
    auto [n2, w2] = hinf_norm(sys, fx::ex18_unstructured(), cfg);
    CHECK(std::abs(n1 - n2) <= 5.0 * cfg.refine_tol * n2);
    (void)w1;
    (void)w2;
  }
}

TEST_CASE("largest admissible gain bound", "[freqbounds]") {
  SECTION("unstructured") {
    auto sys = fx::ex18();
    auto cert = gamma_max(sys, fx::ex18_unstructured(), cfg_for(sys));
    CHECK(cert.kind == CertKind::GammaMax);
    CHECK(cert.value == Approx(0.10589588900333474).epsilon(1e-6));
    CHECK(cert.assumptions_pass());
    CHECK(certificate_outcome(cert, 1e-6) == CertOutcome::Certified);
  }
  SECTION("square current-state channel") {
    auto sys = fx::ex18();
    auto cert = gamma_max(sys, fx::ex18_square(), cfg_for(sys));
    CHECK(cert.value == Approx(0.14975940242807192).epsilon(1e-6));
  }
  SECTION("trivial scalar") {
    auto sys = fx::scalar_sys(-1.0, 0.0);
    CHECK(gamma_max(sys, fx::scalar_ps(), cfg_for(sys)).value == Approx(1.0).epsilon(1e-8));
  }
  SECTION("unstable nominal fails the recorded assumption") {
    auto sys = fx::scalar_sys(1.0, 0.0);
    auto cert = gamma_max(sys, fx::scalar_ps(), cfg_for(sys));
    CHECK_FALSE(cert.assumptions_pass());
    CHECK(certificate_outcome(cert, 1e-6) == CertOutcome::AssumptionFailure);
  }
}

TEST_CASE("passivity shortage bound", "[freqbounds]") {
  SECTION("input-passive system reports zero approached in the tail") {
    auto sys = fx::scalar_sys(-1.0, 0.0);
    auto cert = rho_min(sys, fx::scalar_ps(), cfg_for(sys));
    CHECK(cert.kind == CertKind::RhoMin);
    CHECK(cert.value == Approx(0.0).margin(1e-9));
    CHECK(cert.critical_omega == Approx(cert.tail_cutoff));
  }
  SECTION("pure-delay scalar") {
    auto sys = fx::scalar_sys(0.0, -1.0);
    auto cert = rho_min(sys, fx::scalar_ps(), cfg_for(sys));
    CHECK(cert.value == Approx(0.319409692).epsilon(1e-5));
    CHECK(cert.critical_omega == Approx(1.8778).margin(1e-2));
  }
  SECTION("square-channel requirement") {
    auto sys = fx::ex18();
    CHECK_THROWS_AS(rho_min(sys, fx::ex18_unstructured(), cfg_for(sys)), Error);
  }
}

TEST_CASE("lower sector bound", "[freqbounds]") {
  SECTION("zero upper bound reduces to the raw channel") {
    auto sys = fx::scalar_sys(-1.0, 0.0);
    auto cert = k1_min(sys, fx::scalar_ps(), 0.0, cfg_for(sys));
    // mu2 of 1/(1+iw) peaks at 1 for w = 0
    CHECK(cert.value == Approx(-1.0).epsilon(1e-8));
  }
  SECTION("scalar with unit upper bound") {
    auto sys = fx::scalar_sys(-1.0, 0.0);
    auto cert = k1_min(sys, fx::scalar_ps(), 1.0, cfg_for(sys));
    // shifted channel 1/(s+2): peak real part 1/2 -> value 1 - 2
    CHECK(cert.value == Approx(-1.0).epsilon(1e-8));
    CHECK_FALSE(cert.degenerate);
  }
  SECTION("restricted channel oracle") {
    auto sys = fx::ex18();
    Mat b(2, 1), c0(1, 2);
    b << 0, 1;
    c0 << 1, 0;
    PerturbationStructure ps(b, Mat::Zero(0, 2), c0);
    auto cert = k1_min(sys, ps, 1.0, cfg_for(sys));
    CHECK(cert.value == Approx(-0.21385514717107457).epsilon(1e-5));
  }
  SECTION("negative-real channel degenerates the bound") {
    auto sys = fx::scalar_sys(-1.0, 0.0);
    Mat b(1, 1);
    b << -1;
    PerturbationStructure ps(b, Mat::Zero(0, 1), Mat::Ones(1, 1));
    auto cert = k1_min(sys, ps, 0.0, cfg_for(sys));
    CHECK(cert.degenerate);
    CHECK(cert.value == -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("uniform definiteness certification", "[freqbounds]") {
  auto sys = fx::ex18();
  auto ps = fx::ex18_unstructured();

  SECTION("inside the admissible range") {
    auto cert = certify_w(sys, ps, sector_norm_bound(0.10, 4, 2), cfg_for(sys));
    CHECK(cert.kind == CertKind::WDefinite);
    CHECK(cert.margin > 0.0);
    CHECK(certificate_outcome(cert, 1e-6) == CertOutcome::Certified);
  }
  SECTION("beyond the admissible range") {
    auto cert = certify_w(sys, ps, sector_norm_bound(0.12, 4, 2), cfg_for(sys));
    CHECK(cert.margin < 0.0);
    CHECK(certificate_outcome(cert, 1e-6) == CertOutcome::Denied);
    // a violated margin is attained at a finite frequency
    CHECK(cert.critical_omega < cert.tail_cutoff);
  }
  SECTION("zero gain sector gives identity test matrix") {
    auto cert = certify_w(sys, ps, sector_norm_bound(0.0, 4, 2), cfg_for(sys));
    CHECK(cert.margin == Approx(1.0).epsilon(1e-9));
  }
  SECTION("near-zero margin is inconclusive rather than forced") {
    Certificate cert;
    cert.kind = CertKind::WDefinite;
    cert.margin = 1e-8;
    CHECK(certificate_outcome(cert, 1e-6) == CertOutcome::Inconclusive);
    cert.margin = -1e-8;
    CHECK(certificate_outcome(cert, 1e-6) == CertOutcome::Inconclusive);
  }
  SECTION("boundary flip matches the closed-form gain bound") {
    const double gm = gamma_max(sys, ps, cfg_for(sys)).value;
    auto margin_at = [&](double g) {
      return certify_w(sys, ps, sector_norm_bound(g, 4, 2), cfg_for(sys)).margin;
    };
    REQUIRE(margin_at(0.98 * gm) > 0.0);
    REQUIRE(margin_at(1.02 * gm) < 0.0);
    double lo = 0.98 * gm, hi = 1.02 * gm;
    for (int i = 0; i < 30; ++i) {
      const double mid = 0.5 * (lo + hi);
      (margin_at(mid) > 0.0 ? lo : hi) = mid;
    }
    CHECK(0.5 * (lo + hi) == Approx(gm).epsilon(2e-5));
  }
}

TEST_CASE("analytic tail bound", "[freqbounds]") {
  auto sys = fx::scalar_sys(-1.0, 0.0);
  auto ps = fx::scalar_ps();
  auto sec = sector_norm_bound(1.0, 1, 1);

  // ||G|| <= 1/(11 - 1) -> bound >= 1 - 0.01
  CHECK(tail_bound(sys, ps, sec, 11.0) >= 0.99);

  SECTION("monotone nondecreasing in omega") {
    double prev = -1e300;
    for (double w : {2.0, 5.0, 11.0, 40.0, 300.0}) {
      const double b = tail_bound(sys, ps, sec, w);
      CHECK(b >= prev - 1e-14);
      prev = b;
    }
    // and the limit is lambda_min(-pi_aa)
    CHECK(tail_bound(sys, ps, sec, 1e9) == Approx(1.0).epsilon(1e-6));
  }
  SECTION("invalid below the norm threshold") {
    CHECK_THROWS_AS(tail_bound(sys, ps, sec, 0.5), Error);
  }
}

TEST_CASE("sweep diagnostics rows", "[freqbounds]") {
  auto sys = fx::ex18();
  auto ps = fx::ex18_unstructured();
  auto rows = sweep_samples(sys, ps, sector_norm_bound(0.1, 4, 2), cfg_for(sys));
  REQUIRE(rows.size() >= 64);
  double prev = -1.0;
  for (const auto& r : rows) {
    CHECK(r.omega >= prev);
    prev = r.omega;
    CHECK(r.g_norm >= 0.0);
  }
  // the recorded minimum matches the certificate margin to sweep accuracy
  double min_l = 1e300;
  for (const auto& r : rows) min_l = std::min(min_l, r.lambda_min_w);
  auto cert = certify_w(sys, ps, sector_norm_bound(0.1, 4, 2), cfg_for(sys));
  CHECK(cert.margin <= min_l + 1e-9);
}

TEST_CASE("disc test agreement on scalar channels", "[freqbounds]") {
  // For p = m = 1 and bounds 0 < k1 < k2, positivity of the test matrix is
  // equivalent to the Nyquist curve staying outside the disc through
  // -1/k1 and -1/k2.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  int done = 0, attempts = 0;
  while (done < 100 && attempts < 1000) {
    ++attempts;
    const double a0 = -0.5 - 2.5 * uni(rng);
    const double a1 = (2.0 * uni(rng) - 1.0) * 0.9 * (-a0);
    const double h = 0.3 + 1.7 * uni(rng);
    const double k1 = 0.05 + 0.45 * uni(rng);
    const double k2 = k1 + 0.1 + 0.9 * uni(rng);

    auto sys = fx::scalar_sys(a0, a1, h);
    auto ps = fx::scalar_ps();
    Mat m1(1, 1), m2(1, 1);
    m1 << k1;
    m2 << k2;
    auto sec = sector_bounds_inverse(m1, m2);
    auto cfg = cfg_for(sys);
    auto cert = certify_w(sys, ps, sec, cfg);
    if (!cert.assumptions_pass()) continue;

    // direct disc check on a dense grid
    const double c = 0.5 * (1.0 / k1 + 1.0 / k2);
    const double r = 0.5 * (1.0 / k1 - 1.0 / k2);
    double min_dist = 1e300;
    for (int j = 0; j <= 20000; ++j) {
      const double w = cfg.omega_max * j / 20000.0;
      const Complex g = transfer_g(sys, ps, Complex(0, w))(0, 0);
      min_dist = std::min(min_dist, std::abs(g + c) - r);
    }
    // skip draws that land on the decision boundary of either test
    if (std::abs(cert.margin) < 1e-4 || std::abs(min_dist) < 1e-4) continue;

    CHECK((cert.margin > 0.0) == (min_dist > 0.0));
    ++done;
  }
  REQUIRE(done == 100);
}
