#include "mwsim/talbot_lau.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "mwsim/constants.hpp"
#include "mwsim/error.hpp"
#include "mwsim/parallel.hpp"
#include "mwsim/random.hpp"
#include "mwsim/slit_propagator.hpp"
#include "mwsim/units.hpp"

namespace mwsim {

using constants::pi;

bool TalbotLauSetup::effective_width_enabled() const {
  return apply_effective_width.value_or(species.charged());
}

UniformGrid TalbotLauSetup::screen_grid() const {
  if (screen) return *screen;
  return UniformGrid::centered(2.0 * grating2.period, 129);
}

void TalbotLauSetup::validate() const {
  grating1.validate();
  grating2.validate();
  if (std::abs(grating1.period - grating2.period) > 1e-12 * grating1.period) {
    throw ConfigError("Talbot-Lau gratings must share the same period");
  }
  if (!(separation > 0.0)) throw ConfigError("grating separation must be positive");
  species.validate();
  beam.validate();
  if (source_points_per_slit < 1 || max_source_points < source_points_per_slit) {
    throw ConfigError("invalid source point counts");
  }
  if (!(contrast_tolerance > 0.0)) throw ConfigError("contrast tolerance must be positive");
  screen_grid().validate();
}

namespace {

struct Widths {
  double g1, g2;
};

Widths slit_widths(const TalbotLauSetup& s, double speed) {
  Widths w{s.grating1.open_width(), s.grating2.open_width()};
  if (!s.effective_width_enabled()) return w;
  w.g2 = effective_slit_width(s.grating2, s.species, speed, s.interaction).a_eff;
  if (s.effective_width_on_g1) {
    w.g1 = effective_slit_width(s.grating1, s.species, speed, s.interaction).a_eff;
  }
  return w;
}

// Grating used for propagation: rectangular slits of the given width, walls
// already folded into the width.
GratingSpec as_mask(const GratingSpec& g, double width) {
  GratingSpec m = g;
  m.profile = SlitProfile::rectangular(width);
  m.thickness = 0.0;
  m.wedge_angle = 0.0;
  m.material = MaterialSpec{};
  return m;
}

void source_contribution(const SlitPropagator& prop, const UniformGrid& screen, double length,
                         double x_s, double weight, RealArray& acc) {
  const Illumination ill = Illumination::point(x_s, length);
  for (Eigen::Index k = 0; k < screen.size; ++k) {
    acc[k] += weight * std::norm(prop.fresnel_amplitude(screen.x(k), length, ill));
  }
}

TalbotLauResult monochromatic(const TalbotLauSetup& s, double speed, unsigned threads) {
  const auto kin = de_broglie(s.species, speed);
  const Widths w = slit_widths(s, speed);
  const GratingSpec g2 = as_mask(s.grating2, w.g2);
  const SlitPropagator prop(g2, kin.wavelength);
  const UniformGrid screen = s.screen_grid();
  const int n1 = s.grating1.n_slits;
  const double L = s.separation;
  const double D = s.grating1.period;

  // Per-slit trapezoid sums S_j = f_0/2 + f_1 + ... + f_{K-1} + f_K/2.
  std::vector<RealArray> slit_sum(n1, RealArray::Zero(screen.size));
  int K = s.source_points_per_slit;
  parallel_for(n1, threads, [&](std::size_t j) {
    const double c = s.grating1.slit_center(static_cast<int>(j));
    const double lo = c - 0.5 * w.g1;
    for (int i = 0; i <= K; ++i) {
      const double wt = (i == 0 || i == K) ? 0.5 : 1.0;
      source_contribution(prop, screen, L, lo + w.g1 * i / K, wt * s.grating1.weight(j), slit_sum[j]);
    }
  });
  auto mean_pattern = [&](int k) {
    RealArray tot = RealArray::Zero(screen.size);
    for (const auto& a : slit_sum) tot += a;
    return RealArray(tot / (static_cast<double>(n1) * k));
  };
  RealArray pat = mean_pattern(K);
  ContrastPoint cp = extract_contrast(screen, pat, D);
  double err = 1.0;
  while (2 * K <= s.max_source_points) {
    parallel_for(n1, threads, [&](std::size_t j) {
      const double c = s.grating1.slit_center(static_cast<int>(j));
      const double lo = c - 0.5 * w.g1;
      for (int i = 0; i < K; ++i) {
        source_contribution(prop, screen, L, lo + w.g1 * (2 * i + 1) / (2.0 * K),
                            s.grating1.weight(j), slit_sum[j]);
      }
    });
    K *= 2;
    RealArray next = mean_pattern(K);
    const ContrastPoint cn = extract_contrast(screen, next, D);
    err = std::abs(cn.contrast - cp.contrast);
    pat = std::move(next);
    cp = cn;
    if (err < s.contrast_tolerance) break;
  }
  TalbotLauResult r;
  r.pattern.grid = screen;
  r.pattern.intensity = std::move(pat);
  r.contrast = cp;
  r.contrast_error = err;
  r.source_points_per_slit = K;
  r.wavelength = kin.wavelength;
  r.talbot_length = talbot_length(D, kin);
  r.width_g1 = w.g1;
  r.width_g2 = w.g2;
  return r;
}

TalbotLauResult energy_spread(const TalbotLauSetup& s, const MCConfig& cfg) {
  cfg.validate();
  const double e0 = s.beam.mean_energy;
  const double v0 = std::sqrt(2.0 * e0 / s.species.mass);
  const auto kin0 = de_broglie(s.species, v0);
  const Widths w = slit_widths(s, v0);
  const GratingSpec g2 = as_mask(s.grating2, w.g2);
  const SlitPropagator base(g2, kin0.wavelength);
  const UniformGrid screen = s.screen_grid();
  const int n1 = s.grating1.n_slits;
  const int K = s.source_points_per_slit;
  const std::uint64_t cells = static_cast<std::uint64_t>(n1) * K;
  const std::uint64_t replicas = std::max<std::uint64_t>(1, (cfg.sample_count + cells - 1) / cells);
  const std::uint64_t n = replicas * cells;
  const std::uint64_t nb = std::min<std::uint64_t>(static_cast<std::uint64_t>(cfg.batches), replicas);

  MCResult mc;
  mc.samples = n;
  mc.batch_sums.assign(nb, RealArray::Zero(screen.size));
  mc.batch_counts.assign(nb, 0);
  parallel_for(nb, cfg.threads, [&](std::size_t b) {
    const std::uint64_t lo = cells * (replicas * b / nb);
    const std::uint64_t hi = cells * (replicas * (b + 1) / nb);
    for (std::uint64_t i = lo; i < hi; ++i) {
      rng::Stream st(cfg.seed, i);
      const std::uint64_t cell = i % cells;
      const int j = static_cast<int>(cell / K);
      const int sub = static_cast<int>(cell % K);
      const double x_s = s.grating1.slit_center(j) - 0.5 * w.g1 + w.g1 * (sub + st.uniform()) / K;
      double e;
      do {
        e = e0 + s.beam.energy_sigma * st.normal();
      } while (!(e > 0.0));
      const SlitPropagator prop = base.rescaled(from_energy(s.species, e).wavelength, 1.0);
      source_contribution(prop, screen, s.separation, x_s, s.grating1.weight(j), mc.batch_sums[b]);
      ++mc.batch_counts[b];
    }
  });
  std::vector<RealArray> sums(mc.batch_sums);
  for (std::size_t stride = 1; stride < nb; stride *= 2) {
    for (std::size_t i = 0; i + stride < nb; i += 2 * stride) sums[i] += sums[i + stride];
  }
  mc.survivors = n;
  mc.pattern.grid = screen;
  mc.pattern.intensity = sums[0] / static_cast<double>(n);

  TalbotLauResult r;
  r.pattern = mc.pattern;
  r.contrast = extract_contrast(mc.pattern, s.grating1.period);
  r.contrast_error = jackknife_contrast_error(mc, s.grating1.period);
  r.source_points_per_slit = K;
  r.samples = n;
  r.wavelength = kin0.wavelength;
  r.talbot_length = talbot_length(s.grating1.period, kin0);
  r.width_g1 = w.g1;
  r.width_g2 = w.g2;
  return r;
}

void describe(const TalbotLauSetup& s, Metadata& md) {
  md.set("species", s.species.name);
  md.set("period_m", s.grating1.period);
  md.set("slits_g1", std::to_string(s.grating1.n_slits));
  md.set("slits_g2", std::to_string(s.grating2.n_slits));
  md.set("slit_width_g1_m", s.grating1.open_width());
  md.set("slit_width_g2_m", s.grating2.open_width());
  md.set("open_fraction", s.grating2.open_fraction());
  md.set("effective_width", s.effective_width_enabled() ? "on" : "off");
}

}  // namespace

TalbotLauResult talbot_lau_pattern(const TalbotLauSetup& setup, const MCConfig& cfg) {
  setup.validate();
  TalbotLauResult r;
  const bool spread = setup.beam.speed_dist == SpeedDistribution::gaussian_energy &&
                      setup.beam.energy_sigma > 0.0;
  if (setup.beam.speed_dist == SpeedDistribution::gaussian_speed && setup.beam.speed_sigma > 0.0) {
    throw UnsupportedOperation("Talbot-Lau spreads are given in energy; use an energy sigma");
  }
  r = spread ? energy_spread(setup, cfg)
             : monochromatic(setup, setup.beam.nominal_speed(setup.species), cfg.threads);
  auto& md = r.pattern.metadata;
  md.set("model", spread ? "talbot_lau_mc" : "talbot_lau_source_quadrature");
  describe(setup, md);
  md.set("separation_m", setup.separation);
  md.set("wavelength_m", r.wavelength);
  md.set("talbot_length_m", r.talbot_length);
  md.set("width_used_g1_m", r.width_g1);
  md.set("width_used_g2_m", r.width_g2);
  md.set("source_points_per_slit", std::to_string(r.source_points_per_slit));
  if (spread) md.set("samples", std::to_string(r.samples));
  return r;
}

IntensityPattern talbot_self_image(const GratingSpec& grating, double wavelength, double length,
                                   const UniformGrid& screen) {
  const SlitPropagator prop(as_mask(grating, grating.open_width()), wavelength);
  IntensityPattern p{screen, prop.fresnel_intensity(screen, length, Illumination::plane()), {}};
  p.metadata.set("model", "plane_wave_self_image");
  p.metadata.set("separation_m", length);
  p.metadata.set("talbot_length_m", grating.period * grating.period / wavelength);
  return p;
}

IntensityPattern classical_baseline(const TalbotLauSetup& setup, const UniformGrid& screen) {
  setup.validate();
  const double speed = setup.beam.nominal_speed(setup.species);
  const Widths w = slit_widths(setup, speed);
  const auto& g1 = setup.grating1;
  const auto& g2 = setup.grating2;
  // Ray from x_s (G1) to x (screen) crosses G2 at (x_s + x) / 2 for equal
  // distances; count the measure of x_s in each G1 slit whose ray clears a
  // G2 slit.
  IntensityPattern p{screen, RealArray::Zero(screen.size), {}};
  for (Eigen::Index k = 0; k < screen.size; ++k) {
    const double x = screen.x(k);
    double total = 0.0;
    for (int m = 0; m < g2.n_slits; ++m) {
      const double c2 = g2.slit_center(m);
      const double lo2 = 2.0 * (c2 - 0.5 * w.g2) - x;
      const double hi2 = 2.0 * (c2 + 0.5 * w.g2) - x;
      for (int j = 0; j < g1.n_slits; ++j) {
        const double c1 = g1.slit_center(j);
        const double lo = std::max(lo2, c1 - 0.5 * w.g1);
        const double hi = std::min(hi2, c1 + 0.5 * w.g1);
        if (hi > lo) total += g1.weight(j) * g2.weight(m) * (hi - lo);
      }
    }
    p.intensity[k] = total / (g1.n_slits * w.g1);
  }
  p.metadata.set("model", "classical_moire");
  describe(setup, p.metadata);
  return p;
}

ScanResult scan_grating_separation(const TalbotLauSetup& setup, const std::vector<double>& ratios,
                                   const MCConfig& cfg) {
  setup.validate();
  const double v = setup.beam.nominal_speed(setup.species);
  const auto kin = de_broglie(setup.species, v);
  const double tl = talbot_length(setup.grating1.period, kin);
  ScanResult out;
  out.curve.parameter = "L/T_L";
  out.curve.mode = "quantum";
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!(ratios[i] > 0.0)) throw ConfigError("L/T_L values must be positive");
    TalbotLauSetup s = setup;
    s.separation = ratios[i] * tl;
    MCConfig c = cfg;
    c.seed = rng::derive_seed(cfg.seed, i);
    auto r = talbot_lau_pattern(s, c);
    out.curve.push(ratios[i], r.contrast.contrast, r.contrast_error);
    out.points.push_back(std::move(r));
  }
  describe(setup, out.manifest);
  out.manifest.set("wavelength_m", kin.wavelength);
  out.manifest.set("talbot_length_m", tl);
  out.manifest.set("energy_J", kin.kinetic_energy);
  if (setup.species.charged()) {
    const auto f = critical_fields(setup.species, kin, setup.grating1.period, tl, PatternScale::talbot);
    out.manifest.set("critical_force_N", f.force);
    out.manifest.set("critical_E_V_per_m", f.e_field);
    out.manifest.set("critical_B_T", f.b_field);
  }
  return out;
}

ScanResult classical_scan(const TalbotLauSetup& setup, const std::vector<double>& ratios) {
  setup.validate();
  const double v = setup.beam.nominal_speed(setup.species);
  const double tl = talbot_length(setup.grating1.period, de_broglie(setup.species, v));
  ScanResult out;
  out.curve.parameter = "L/T_L";
  out.curve.mode = "classical";
  const UniformGrid screen = setup.screen_grid();
  for (double r : ratios) {
    TalbotLauSetup s = setup;
    s.separation = r * tl;
    const auto p = classical_baseline(s, screen);
    out.curve.push(r, extract_contrast(p, setup.grating1.period).contrast, 0.0);
  }
  describe(setup, out.manifest);
  out.manifest.set("talbot_length_m", tl);
  return out;
}

ScanResult scan_energy(const TalbotLauSetup& setup, const std::vector<double>& energies,
                       double energy_sigma, const MCConfig& cfg) {
  setup.validate();
  if (energy_sigma < 0.0) throw ConfigError("energy spread must be non-negative");
  ScanResult out;
  out.curve.parameter = "E0_keV";
  out.curve.mode = energy_sigma > 0.0 ? "quantum_mc" : "quantum";
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (!(energies[i] > 0.0)) throw ConfigError("scan energies must be positive");
    worst = std::min(worst, energies[i]);
    TalbotLauSetup s = setup;
    s.beam.speed_dist = SpeedDistribution::gaussian_energy;
    s.beam.mean_energy = energies[i];
    s.beam.energy_sigma = energy_sigma;
    MCConfig c = cfg;
    c.seed = rng::derive_seed(cfg.seed, i);
    auto r = talbot_lau_pattern(s, c);
    out.curve.push(energies[i] / units::keV, r.contrast.contrast, r.contrast_error);
    out.points.push_back(std::move(r));
  }
  describe(setup, out.manifest);
  out.manifest.set("separation_m", setup.separation);
  out.manifest.set("energy_sigma_J", energy_sigma);
  if (setup.species.charged() && !energies.empty()) {
    const auto f = scan_critical_fields(setup, worst);
    out.manifest.set("worst_energy_J", worst);
    out.manifest.set("critical_force_N", f.force);
    out.manifest.set("critical_E_V_per_m", f.e_field);
    out.manifest.set("critical_B_T", f.b_field);
  }
  return out;
}

double dominant_frequency(const IntensityPattern& pattern, double f_min, double f_max,
                          int resolution) {
  if (!(f_min > 0.0) || !(f_max > f_min) || resolution < 2) {
    throw DomainError("invalid frequency search range");
  }
  const RealArray x = pattern.grid.coordinates();
  const RealArray y = pattern.intensity - pattern.intensity.mean();
  double best_f = f_min, best = -1.0;
  for (int i = 0; i < resolution; ++i) {
    const double f = f_min + (f_max - f_min) * i / (resolution - 1);
    const RealArray ph = 2.0 * pi * f * x;
    const double re = (y * ph.cos()).sum();
    const double im = (y * ph.sin()).sum();
    const double mag = re * re + im * im;
    if (mag > best) {
      best = mag;
      best_f = f;
    }
  }
  return best_f;
}

CriticalFields scan_critical_fields(const TalbotLauSetup& setup, double worst_energy) {
  const auto kin = from_energy(setup.species, worst_energy);
  return critical_fields(setup.species, kin, setup.grating1.period, setup.separation,
                         PatternScale::talbot);
}

}  // namespace mwsim
