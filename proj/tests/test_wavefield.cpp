#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "mwsim/error.hpp"
#include "mwsim/wavefield.hpp"

using namespace mwsim;
using doctest::Approx;
using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

namespace {

// Free propagation of A exp(-(x'-x0)^2 / 4 s^2) with the (lambda L)^{-1/2}
// kernel, by completing the square:
// int exp(-a u^2 + b u) du = sqrt(pi / a) exp(b^2 / 4a).
cd gaussian_propagated(double x, double x0, double s, double lambda, double L) {
  const double amp = 1.0 / (2.0 * s * std::sqrt(pi));
  const double lam_l = lambda * L;
  const double y = x - x0;
  const cd a(1.0 / (4 * s * s), -pi / lam_l);
  const cd b(0.0, -2 * pi * y / lam_l);
  const cd c(0.0, pi * y * y / lam_l);
  return amp / std::sqrt(lam_l) * std::sqrt(pi / a) * std::exp(b * b / (4.0 * a) + c);
}

}  // namespace

TEST_CASE("uniform grids") {
  const auto g = UniformGrid::centered(1.0, 5);
  CHECK(g.x0 == -1.0);
  CHECK(g.dx == 0.5);
  CHECK(g.x(2) == 0.0);
  CHECK(g.back() == 1.0);
  const auto s = UniformGrid::spanning(2.0, 3.0, 11);
  CHECK(s.dx == Approx(0.1));
  CHECK(s.coordinates()[10] == 3.0);
  CHECK_THROWS_AS(UniformGrid::centered(1.0, 1), DomainError);
  CHECK_THROWS_AS((UniformGrid{0.0, -1.0, 10}.validate()), ConfigError);
}

TEST_CASE("metadata keeps insertion order and overwrites in place") {
  Metadata m;
  m.set("a", "1");
  m.set("b", 2.5);
  m.set("a", "3");
  REQUIRE(m.entries().size() == 2);
  CHECK(m.entries()[0].first == "a");
  CHECK(*m.find("a") == "3");
  CHECK(*m.find("b") == "2.5");
  CHECK(m.find("c") == nullptr);
}

TEST_CASE("slit profiles are unit integral") {
  const auto r = SlitProfile::rectangular(2e-6);
  CHECK(r.amplitude(0.0) == Approx(5e5));
  CHECK(r.amplitude(1.1e-6) == 0.0);
  const auto g = SlitProfile::gaussian(1e-6);
  CHECK(g.sigma == Approx(1e-6 / (2 * std::sqrt(2 * pi))));
  double sum = 0.0;
  const double h = g.sigma / 200;
  for (int k = -4000; k <= 4000; ++k) sum += g.amplitude(k * h) * h;
  CHECK(sum == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("grating geometry and validation") {
  GratingSpec g;
  g.n_slits = 3;
  g.period = 2e-6;
  g.profile = SlitProfile::rectangular(0.6e-6);
  g.thickness = 800e-9;
  g.wedge_angle = 10 * pi / 180;
  CHECK(g.exit_width() == Approx(0.6e-6 + 2 * 800e-9 * std::tan(10 * pi / 180)));
  CHECK(g.slit_center(0) == Approx(-2e-6));
  CHECK(g.slit_center(1) == 0.0);
  CHECK(g.weight(2) == 1.0);
  CHECK_NOTHROW(g.validate());
  g.thickness = 5e-6;
  CHECK_THROWS_WITH_AS(g.validate(), "period must exceed slit width", ConfigError);
  g.thickness = 0;
  g.weights = {1, 2};
  CHECK_THROWS_AS(g.validate(), ConfigError);
  // overlapping Gaussian apertures are allowed
  g.weights.clear();
  g.profile = SlitProfile::gaussian(3e-6);
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("grating field: grid-aligned rectangular slits integrate to one") {
  GratingSpec g;
  g.n_slits = 2;
  g.period = 1e-6;
  g.profile = SlitProfile::rectangular(0.25e-6);
  const auto grid = UniformGrid::centered(1e-6, 801);  // dx = 2.5 nm, edges on nodes
  const auto f = build_grating_field(g, grid, 1e-10);
  const double integral = f.amplitude.real().sum() * grid.dx;
  CHECK(integral == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("closed-form Gaussian two-slit intensity matches direct Gaussian propagation") {
  const double sigma = 50e-9, D = 400e-9, lambda = 1e-10;
  for (double L : {1e-4, 1e-3, 5e-3}) {
    const auto sc = ScaledCoordinates::from(sigma, D, L, lambda);
    const auto grid = UniformGrid::centered(5e-6, 401);
    const auto p = analytic_two_slit_intensity(sc, grid, Normalization::absolute);
    double peak = p.peak();
    double worst = 0.0;
    for (Eigen::Index k = 0; k < grid.size; ++k) {
      const double x = grid.x(k);
      const cd psi = gaussian_propagated(x, -D / 2, sigma, lambda, L) +
                     gaussian_propagated(x, D / 2, sigma, lambda, L);
      worst = std::max(worst, std::abs(std::norm(psi) - p.intensity[k]));
    }
    CAPTURE(L);
    CHECK(worst < 1e-12 * peak);
  }
  // L = 0: two non-overlapping Gaussians, relative form peaks at 1 + tiny overlap
  const auto sc0 = ScaledCoordinates::from(sigma, D, 0.0, lambda);
  const auto p0 = analytic_two_slit_intensity(sc0, UniformGrid::spanning(-D / 2, D / 2, 3));
  CHECK(p0.intensity[0] == Approx(1.0).epsilon(1e-6));
  // coincident slits at L = 0 give the peak 4 of the relative form
  const auto sc1 = ScaledCoordinates::from(sigma, 1e-30, 0.0, lambda);
  CHECK(analytic_two_slit_intensity(sc1, UniformGrid::centered(D, 3)).intensity[1] ==
        Approx(4.0));
}

TEST_CASE("Fresnel propagation against the Gaussian closed form") {
  const double sigma = 50e-9, D = 400e-9, lambda = 1e-10;
  GratingSpec g;
  g.n_slits = 2;
  g.period = D;
  g.profile = SlitProfile::gaussian_sigma(sigma);
  const double L = 2e-3;
  const auto in_grid = UniformGrid::centered(1.2e-6, 2401);
  const auto f = build_grating_field(g, in_grid, lambda);
  PropagationOptions opt;
  opt.output = UniformGrid::centered(3e-6, 601);
  PropagationReport rep;
  const auto out = fresnel_propagate(f, L, opt, &rep);
  const auto sc = ScaledCoordinates::from(sigma, D, L, lambda);
  const auto ref = analytic_two_slit_intensity(sc, *opt.output, Normalization::absolute);
  const double err = (out.intensity() - ref.intensity).abs().maxCoeff() / ref.peak();
  CHECK(err < 1e-4);
  CHECK(rep.max_phase_step <= pi / 2);
  CHECK(rep.richardson_error < 1e-4);

  // probability on the automatic window
  const auto auto_out = fresnel_propagate(f, L, {}, &rep);
  CHECK(std::abs(rep.output_norm2 / rep.input_norm2 - 1.0) < 1e-6);
  CHECK(auto_out.grid.size == 2049);
}

TEST_CASE("under-resolved propagation is refused with the required count") {
  GratingSpec g;
  g.n_slits = 2;
  g.period = 400e-9;
  g.profile = SlitProfile::gaussian_sigma(50e-9);
  const auto f = build_grating_field(g, UniformGrid::centered(1.2e-6, 41), 1e-10);
  PropagationOptions opt;
  opt.output = UniformGrid::centered(3e-6, 101);
  try {
    (void)fresnel_propagate(f, 1e-4, opt);
    FAIL("expected ResolutionError");
  } catch (const ResolutionError& e) {
    CHECK(e.required_samples() > 41);
    CHECK(e.code() == ErrorCode::numerical);
    // the suggested count actually resolves the kernel
    const auto f2 = build_grating_field(g, UniformGrid::centered(1.2e-6, e.required_samples()),
                                        1e-10);
    CHECK_NOTHROW((void)fresnel_propagate(f2, 1e-4, opt));
  }
  CHECK_THROWS_AS(fresnel_propagate(f, 0.0), DomainError);
}

TEST_CASE("Fraunhofer envelope: closed form and quadrature routes agree") {
  const auto r = SlitProfile::rectangular(1e-6);
  PhaseProfile zero;
  zero.half_width = 0.5e-6;
  zero.phase = [](double) { return 0.0; };
  for (double zeta : {0.0, 1e6, 7.3e6, 2e7}) {
    const cd closed = fraunhofer_envelope(r, nullptr, zeta);
    const cd quad = fraunhofer_envelope(r, &zero, zeta);
    CHECK(std::abs(closed - quad) < 1e-10);
    CHECK(closed.real() == Approx(std::sin(0.5 * zeta * 1e-6) / (0.5 * zeta * 1e-6 + 1e-300) +
                                  (zeta == 0 ? 1.0 : 0.0)));
  }
  const auto gs = SlitProfile::gaussian_sigma(1e-7);
  PhaseProfile wide;
  wide.half_width = 2e-6;
  wide.phase = [](double) { return 0.0; };
  for (double zeta : {0.0, 5e6, 1.5e7}) {
    CHECK(std::abs(fraunhofer_envelope(gs, nullptr, zeta) - fraunhofer_envelope(gs, &wide, zeta)) <
          1e-10);
  }
}

TEST_CASE("classical double slit and far-field switch") {
  const auto p = classical_double_slit(0.25e-6, 1e-6, 1e-10, 1.0, UniformGrid::centered(1e-3, 3));
  CHECK(p.intensity[1] == 2.0);
  // first zero of the cos term at x = lambda L / 2D
  const auto q = classical_double_slit(0.25e-6, 1e-6, 1e-10, 1.0,
                                       UniformGrid::spanning(0.0, 5e-5, 2));
  CHECK(q.intensity[1] < 1e-20);

  CHECK(far_field_applicable(50.1, 10e-6, 1e-6));
  CHECK_FALSE(far_field_applicable(50.0, 10e-6, 1e-6));
  CHECK_FALSE(far_field_applicable(100.0, 9.9e-6, 1e-6));
}

TEST_CASE("pattern helpers") {
  IntensityPattern p{UniformGrid::spanning(0.0, 2.0, 3), RealArray(3), {}};
  p.intensity << 1.0, 3.0, 1.0;
  CHECK(p.integral() == Approx(4.0));
  CHECK(p.at(0.5) == Approx(2.0));
  CHECK(p.at(-0.1) == 0.0);
  CHECK(p.peak() == 3.0);
}
