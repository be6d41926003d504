#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "mwsim/constants.hpp"
#include "mwsim/error.hpp"
#include "mwsim/kinematics.hpp"
#include "mwsim/slit_propagator.hpp"
#include "mwsim/species.hpp"
#include "mwsim/talbot_lau.hpp"
#include "mwsim/units.hpp"

using namespace mwsim;
using doctest::Approx;

namespace {

GratingSpec grating(int n, double D, double a) {
  GratingSpec g;
  g.n_slits = n;
  g.period = D;
  g.profile = SlitProfile::rectangular(a);
  return g;
}

// Antiprotons at 1 keV through two bare 265 nm gratings, interactions off.
TalbotLauSetup pbar_setup(int n) {
  TalbotLauSetup s;
  s.grating1 = grating(n, 265e-9, 90e-9);
  s.grating2 = s.grating1;
  s.species = species_preset("pbar");
  s.beam.mean_speed = from_energy_keV(s.species, 1.0).speed;
  s.apply_effective_width = false;
  s.separation = talbot_length(265e-9, from_energy_keV(s.species, 1.0));
  return s;
}

double meta(const Metadata& m, const std::string& key) {
  const std::string* v = m.find(key);
  REQUIRE(v != nullptr);
  return std::stod(*v);
}

}  // namespace

TEST_CASE("self-images of a plane-wave-lit grating") {
  const auto g = grating(40, 2e-6, 0.6e-6);
  const double lambda = 1.2e-11, D = g.period;
  const double tl = D * D / lambda;
  const auto screen = UniformGrid::centered(8 * D, 513);
  // period D at integer multiples, D / 2 at half the Talbot length
  for (double m : {1.0, 2.0}) {
    const auto p = talbot_self_image(g, lambda, m * tl, screen);
    CHECK(dominant_frequency(p, 0.3 / D, 3.0 / D) == Approx(1.0 / D).epsilon(0.01));
  }
  const auto half = talbot_self_image(g, lambda, 0.5 * tl, screen);
  CHECK(dominant_frequency(half, 0.3 / D, 3.0 / D) == Approx(2.0 / D).epsilon(0.01));
  CHECK(meta(half.metadata, "talbot_length_m") == Approx(tl).epsilon(1e-12));
}

TEST_CASE("classical baseline: exact ray measure against ray sampling") {
  auto s = pbar_setup(10);
  const auto screen = UniformGrid::centered(2 * s.grating1.period, 41);
  const auto p = classical_baseline(s, screen);
  // rays from uniform G1 sources; for equal distances the ray meets G2 at
  // (x_s + x) / 2
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 200000;
  const auto& g = s.grating1;
  const double a = g.profile.width;
  for (Eigen::Index k : {Eigen::Index(0), Eigen::Index(7), Eigen::Index(20), Eigen::Index(33)}) {
    const double x = screen.x(k);
    int pass = 0;
    for (int i = 0; i < n; ++i) {
      const int j = static_cast<int>(u(gen) * g.n_slits);
      const double xs = g.slit_center(j) + a * (u(gen) - 0.5);
      const double y = 0.5 * (xs + x);
      for (int m = 0; m < g.n_slits; ++m) {
        if (std::abs(y - g.slit_center(m)) < 0.5 * a) {
          ++pass;
          break;
        }
      }
    }
    const double f = static_cast<double>(pass) / n;
    CAPTURE(x);
    CHECK(std::abs(p.intensity[k] - f) < 5 * std::sqrt(f * (1 - f) / n) + 1e-12);
  }
  // with equal distances the shadow does not depend on L
  const auto cs = classical_scan(s, {0.05, 0.5, 1.0, 1.5});
  for (double c : cs.curve.contrast) CHECK(c == Approx(cs.curve.contrast[0]).epsilon(1e-12));
  CHECK(cs.curve.mode == "classical");
}

TEST_CASE("monochromatic source quadrature against a brute-force source sum") {
  const auto s = pbar_setup(10);
  MCConfig cfg;
  cfg.threads = 1;
  const auto r = talbot_lau_pattern(s, cfg);
  CHECK(r.contrast_error < s.contrast_tolerance);
  CHECK(r.source_points_per_slit >= s.source_points_per_slit);
  CHECK(r.talbot_length == Approx(s.separation).epsilon(1e-12));

  // midpoint rule, 200 sources per slit
  const SlitPropagator prop(s.grating2, r.wavelength);
  const auto screen = s.screen_grid();
  RealArray brute = RealArray::Zero(screen.size);
  const int m = 200;
  const auto& g1 = s.grating1;
  for (int j = 0; j < g1.n_slits; ++j) {
    for (int i = 0; i < m; ++i) {
      const double xs = g1.slit_center(j) + g1.profile.width * ((i + 0.5) / m - 0.5);
      brute += prop.fresnel_intensity(screen, s.separation, Illumination::point(xs, s.separation));
    }
  }
  brute /= static_cast<double>(g1.n_slits * m);
  CHECK((r.pattern.intensity - brute).abs().maxCoeff() < 1e-2 * brute.maxCoeff());
  const double cb = extract_contrast(screen, brute, g1.period).contrast;
  CHECK(std::abs(r.contrast.contrast - cb) < 0.01);

  // fringes of period D, well above the ray-optics shadow
  CHECK(dominant_frequency(r.pattern, 0.3 / g1.period, 3.0 / g1.period) ==
        Approx(1.0 / g1.period).epsilon(0.01));
  const double classical =
      extract_contrast(classical_baseline(s, screen), g1.period).contrast;
  CHECK(r.contrast.contrast > classical);
}

TEST_CASE("energy and distance scans agree at the same L / T_L") {
  const auto s = pbar_setup(10);
  MCConfig cfg;
  cfg.threads = 1;
  const double e0 = 1.0 * units::keV;
  for (double ratio : {0.5, 1.0}) {
    const auto byl = scan_grating_separation(s, {ratio}, cfg);
    // L fixed at T_L(E0); L / T_L(E) = sqrt(E0 / E)
    const auto bye = scan_energy(s, {e0 / (ratio * ratio)}, 0.0, cfg);
    CAPTURE(ratio);
    CHECK(bye.curve.contrast[0] == Approx(byl.curve.contrast[0]).epsilon(1e-9));
  }
}

TEST_CASE("energy spread: Monte Carlo determinism and continuity") {
  auto s = pbar_setup(10);
  s.beam.speed_dist = SpeedDistribution::gaussian_energy;
  s.beam.mean_energy = 1.0 * units::keV;
  s.beam.energy_sigma = 1e-3 * units::keV;  // 1 eV
  MCConfig cfg;
  cfg.sample_count = 800;
  cfg.seed = 3;
  cfg.threads = 1;
  const auto a = talbot_lau_pattern(s, cfg);
  cfg.threads = 2;
  const auto b = talbot_lau_pattern(s, cfg);
  CHECK((a.pattern.intensity == b.pattern.intensity).all());
  CHECK(a.contrast_error == b.contrast_error);
  CHECK(a.samples == 800);
  CHECK(a.contrast_error > 0.0);
  CHECK(*a.pattern.metadata.find("model") == "talbot_lau_mc");

  auto mono = s;
  mono.beam.energy_sigma = 0.0;
  const auto m = talbot_lau_pattern(mono, cfg);
  CHECK(*m.pattern.metadata.find("model") == "talbot_lau_source_quadrature");
  CHECK(std::abs(a.contrast.contrast - m.contrast.contrast) <
        3 * a.contrast_error + s.contrast_tolerance);

  // speed spreads are not supported for Talbot-Lau
  auto sv = pbar_setup(10);
  sv.beam.speed_dist = SpeedDistribution::gaussian_speed;
  sv.beam.speed_sigma = 1e3;
  CHECK_THROWS_AS(talbot_lau_pattern(sv, cfg), UnsupportedOperation);
}

TEST_CASE("scan energy reports the critical fields at the lowest energy") {
  auto s = pbar_setup(4);
  MCConfig cfg;
  cfg.threads = 1;
  const std::vector<double> es{1.2 * units::keV, 0.9 * units::keV};
  const auto r = scan_energy(s, es, 0.0, cfg);
  const auto f = scan_critical_fields(s, 0.9 * units::keV);
  const auto ref = critical_fields(s.species, from_energy(s.species, 0.9 * units::keV),
                                   s.grating1.period, s.separation, PatternScale::talbot);
  CHECK(f.e_field == Approx(ref.e_field).epsilon(1e-14));
  CHECK(meta(r.manifest, "worst_energy_J") == Approx(0.9 * units::keV).epsilon(1e-12));
  CHECK(meta(r.manifest, "critical_E_V_per_m") == Approx(ref.e_field).epsilon(1e-12));
  CHECK(meta(r.manifest, "critical_B_T") == Approx(ref.b_field).epsilon(1e-12));
  REQUIRE(r.curve.values.size() == 2);
  CHECK(r.curve.values[0] == Approx(1.2));
  CHECK_THROWS_AS(scan_energy(s, {-1.0}, 0.0, cfg), ConfigError);
  CHECK_THROWS_AS(scan_energy(s, es, -1.0, cfg), ConfigError);
}

TEST_CASE("dominant frequency of a synthetic pattern") {
  IntensityPattern p{UniformGrid::centered(10.0, 401), RealArray(401), {}};
  for (Eigen::Index k = 0; k < 401; ++k) {
    const double x = p.grid.x(k);
    p.intensity[k] = 2.0 + std::cos(2 * std::numbers::pi * 0.7 * x) +
                     0.3 * std::cos(2 * std::numbers::pi * 1.9 * x);
  }
  CHECK(dominant_frequency(p, 0.1, 3.0) == Approx(0.7).epsilon(2e-3));
  CHECK_THROWS_AS(dominant_frequency(p, 0.0, 1.0), DomainError);
}

TEST_CASE("setup validation") {
  auto s = pbar_setup(4);
  CHECK_NOTHROW(s.validate());
  s.grating2.period = 300e-9;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = pbar_setup(4);
  s.separation = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = pbar_setup(4);
  s.max_source_points = 4;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  // charged species default to the effective slit width
  s = pbar_setup(4);
  s.apply_effective_width.reset();
  CHECK(s.effective_width_enabled());
  s.species = species_preset("Hbar");
  CHECK_FALSE(s.effective_width_enabled());
}
