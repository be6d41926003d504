#include "mwsim/incoherence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mwsim/constants.hpp"
#include "mwsim/error.hpp"
#include "mwsim/parallel.hpp"
#include "mwsim/quadrature.hpp"
#include "mwsim/random.hpp"
#include "mwsim/slit_propagator.hpp"
#include "mwsim/units.hpp"

namespace mwsim {

using constants::pi;

double BeamModel::nominal_speed(const ParticleSpecies& species) const {
  if (speed_dist == SpeedDistribution::gaussian_energy) {
    return std::sqrt(2.0 * mean_energy / species.mass);
  }
  return mean_speed;
}

void BeamModel::validate() const {
  if (source_extent < 0.0) throw ConfigError("source extent must be non-negative");
  if (!(source_distance > 0.0)) throw ConfigError("source distance must be positive");
  switch (speed_dist) {
    case SpeedDistribution::delta:
    case SpeedDistribution::gaussian_speed:
      if (!(mean_speed > 0.0)) throw ConfigError("beam speed must be positive");
      if (speed_sigma < 0.0) throw ConfigError("speed spread must be non-negative");
      break;
    case SpeedDistribution::gaussian_energy:
      if (!(mean_energy > 0.0)) throw ConfigError("beam energy must be positive");
      if (energy_sigma < 0.0) throw ConfigError("energy spread must be non-negative");
      break;
  }
  if (coherence_length && !(*coherence_length > 0.0)) {
    throw ConfigError("coherence length must be positive");
  }
}

void MCConfig::validate() const {
  if (sample_count < 1) throw ConfigError("sample count must be >= 1");
  if (batches < 1) throw ConfigError("batch count must be >= 1");
}

std::string_view field_model_name(FieldModel m) {
  switch (m) {
    case FieldModel::automatic: return "auto";
    case FieldModel::fraunhofer: return "fraunhofer";
    case FieldModel::fresnel: return "fresnel";
  }
  return "?";
}

void ContrastCurve::push(double value, double c, double err) {
  values.push_back(value);
  contrast.push_back(c);
  error.push_back(err);
}

void ContrastCurve::validate() const {
  if (values.size() != contrast.size() || values.size() != error.size()) {
    throw NumericalError("contrast curve columns differ in length");
  }
  for (double c : contrast) {
    if (!(c >= 0.0 && c <= 1.0)) throw NumericalError("contrast outside [0, 1]");
  }
}

double coherence_length(double source_distance, double wavelength, double source_extent) {
  if (!(source_distance > 0.0) || !(wavelength > 0.0) || !(source_extent > 0.0)) {
    throw DomainError("coherence length needs positive y_s, lambda, sigma_s");
  }
  return source_distance * wavelength / (2.0 * source_extent);
}

double survival_probability(const ParticleSpecies& species, double path_length, double speed) {
  if (species.stable()) return 1.0;
  if (!(speed > 0.0)) throw DomainError("speed must be positive");
  return std::exp(-(path_length / speed) / species.lifetime);
}

std::vector<std::uint64_t> decay_cull(std::uint64_t n, const ParticleSpecies& species,
                                      double path_length, double speed, std::uint64_t seed) {
  const double p = survival_probability(species, path_length, speed);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 0; i < n; ++i) {
    rng::Stream s(seed, i);
    if (p >= 1.0 || s.uniform() < p) out.push_back(i);
  }
  return out;
}

namespace {

struct Sample {
  double source_x;
  double speed;
  bool survives;
};

Sample draw_sample(const BeamModel& beam, const ParticleSpecies& species, double path,
                   bool cull, std::uint64_t seed, std::uint64_t index) {
  rng::Stream s(seed, index);
  Sample out{0.0, 0.0, true};
  // Draw order is fixed: position, speed, survival.
  const double u = s.uniform();
  out.source_x = beam.source_extent * (u - 0.5);
  switch (beam.speed_dist) {
    case SpeedDistribution::delta:
      out.speed = beam.mean_speed;
      break;
    case SpeedDistribution::gaussian_speed:
      do {
        out.speed = beam.mean_speed + beam.speed_sigma * s.normal();
      } while (!(out.speed > 0.0));
      break;
    case SpeedDistribution::gaussian_energy: {
      double e;
      do {
        e = beam.mean_energy + beam.energy_sigma * s.normal();
      } while (!(e > 0.0));
      out.speed = std::sqrt(2.0 * e / species.mass);
      break;
    }
  }
  if (cull && !species.stable()) {
    out.survives = s.uniform() < survival_probability(species, path, out.speed);
  }
  return out;
}

}  // namespace

MCResult mc_average(const GratingSpec& grating, const ParticleSpecies& species,
                    double screen_distance, const BeamModel& beam, const MCConfig& cfg,
                    const UniformGrid& screen, FieldModel model, const PhaseProfile* phase) {
  grating.validate();
  beam.validate();
  cfg.validate();
  screen.validate();
  if (!(screen_distance > 0.0)) throw DomainError("screen distance must be positive");

  const double v0 = beam.nominal_speed(species);
  const double lambda0 = de_broglie(species, v0).wavelength;
  if (model == FieldModel::automatic) {
    const double sigma = grating.profile.sigma;
    const double l_hat = screen_distance * lambda0 / (4.0 * pi * sigma * sigma);
    model = far_field_applicable(l_hat, screen.extent(), grating.period) ? FieldModel::fraunhofer
                                                                        : FieldModel::fresnel;
  }
  const SlitPropagator base(grating, lambda0, phase);
  const double path = beam.source_distance + screen_distance;
  const bool fixed_speed = beam.speed_dist == SpeedDistribution::delta;

  const std::uint64_t n = cfg.sample_count;
  const auto nb = static_cast<std::uint64_t>(std::min<std::uint64_t>(cfg.batches, n));
  MCResult res;
  res.samples = n;
  res.model = model;
  res.batch_sums.assign(nb, RealArray::Zero(screen.size));
  std::vector<RealArray> batch_sq(nb, RealArray::Zero(screen.size));
  res.batch_counts.assign(nb, 0);

  parallel_for(nb, cfg.threads, [&](std::size_t b) {
    const std::uint64_t lo = n * b / nb;
    const std::uint64_t hi = n * (b + 1) / nb;
    RealArray& sum = res.batch_sums[b];
    RealArray& sq = batch_sq[b];
    for (std::uint64_t i = lo; i < hi; ++i) {
      const Sample smp = draw_sample(beam, species, path, cfg.decay_culling, cfg.seed, i);
      if (!smp.survives) continue;
      const Illumination ill = Illumination::point(smp.source_x, beam.source_distance);
      RealArray I;
      if (fixed_speed) {
        I = model == FieldModel::fraunhofer ? base.fraunhofer_intensity(screen, screen_distance, ill)
                                            : base.fresnel_intensity(screen, screen_distance, ill);
      } else {
        const SlitPropagator prop =
            base.rescaled(de_broglie(species, smp.speed).wavelength, v0 / smp.speed);
        I = model == FieldModel::fraunhofer ? prop.fraunhofer_intensity(screen, screen_distance, ill)
                                            : prop.fresnel_intensity(screen, screen_distance, ill);
      }
      sum += I;
      sq += I.square();
      ++res.batch_counts[b];
    }
  });

  // Fixed-order pairwise reduction over batches.
  std::vector<RealArray> sums(res.batch_sums), sqs(batch_sq);
  for (std::size_t stride = 1; stride < nb; stride *= 2) {
    for (std::size_t i = 0; i + stride < nb; i += 2 * stride) {
      sums[i] += sums[i + stride];
      sqs[i] += sqs[i + stride];
    }
  }
  res.survivors = std::accumulate(res.batch_counts.begin(), res.batch_counts.end(), std::uint64_t{0});
  if (res.survivors == 0) {
    throw EmptyEnsemble("no Monte Carlo sample survived decay in flight (survival probability " +
                        format_double(survival_probability(species, path, v0)) + ")");
  }
  const double m = static_cast<double>(res.survivors);
  res.pattern.grid = screen;
  res.pattern.intensity = sums[0] / m;
  if (res.survivors > 1) {
    const RealArray var = ((sqs[0] / m - res.pattern.intensity.square()) * (m / (m - 1.0))).max(0.0);
    res.standard_error = (var / m).sqrt();
  } else {
    res.standard_error = RealArray::Zero(screen.size);
  }
  auto& md = res.pattern.metadata;
  md.set("model", std::string("mc_average_") + std::string(field_model_name(model)));
  md.set("species", species.name);
  md.set("wavelength_m", lambda0);
  md.set("screen_distance_m", screen_distance);
  md.set("source_extent_m", beam.source_extent);
  md.set("source_distance_m", beam.source_distance);
  md.set("samples", std::to_string(n));
  md.set("survivors", std::to_string(res.survivors));
  md.set("survival_fraction", res.survival_fraction());
  md.set("seed", std::to_string(cfg.seed));
  return res;
}

IntensityPattern analytic_coherent_pattern(const GratingSpec& grating, double wavelength,
                                           double screen_distance, double l0,
                                           const UniformGrid& screen, const PhaseProfile* phase) {
  grating.validate();
  if (!(wavelength > 0.0) || !(screen_distance > 0.0) || !(l0 > 0.0)) {
    throw DomainError("analytic pattern needs positive lambda, L and l0");
  }
  const int N = grating.n_slits;
  const double D = grating.period;
  const double lam_l = wavelength * screen_distance;
  std::vector<double> coef(N);
  for (int k = 1; k < N; ++k) {
    const double r = k * D / l0;
    coef[k] = 2.0 * (N - k) / N * std::exp(-0.5 * r * r);
  }
  IntensityPattern p{screen, RealArray(screen.size), {}};
  for (Eigen::Index j = 0; j < screen.size; ++j) {
    const double x = screen.x(j);
    const double zeta = 2.0 * pi * x / lam_l;
    double s = 1.0;
    for (int k = 1; k < N; ++k) s += coef[k] * std::cos(k * D * zeta);
    p.intensity[j] = N / lam_l * std::norm(fraunhofer_envelope(grating.profile, phase, zeta)) * s;
  }
  p.metadata.set("model", "analytic_partially_coherent");
  p.metadata.set("coherence_length_m", l0);
  return p;
}

ContrastPoint extract_contrast(const IntensityPattern& pattern, double expected_period,
                               double center) {
  return extract_contrast(pattern.grid, pattern.intensity, expected_period, center);
}

namespace {

// Parabolic vertex through samples k-1, k, k+1 (value only), kept only when
// it lies between the neighbours.
double refine_extremum(const RealArray& y, Eigen::Index k) {
  if (k <= 0 || k >= y.size() - 1) return y[k];
  const double a = y[k - 1], b = y[k], c = y[k + 1];
  const double den = a - 2.0 * b + c;
  if (den == 0.0) return b;
  const double t = 0.5 * (a - c) / den;
  if (std::abs(t) > 1.0) return b;
  return b - 0.25 * (a - c) * t;
}

}  // namespace

ContrastPoint extract_contrast(const UniformGrid& grid, const RealArray& y,
                               double expected_period, double center) {
  if (!(expected_period > 0.0)) throw DomainError("expected period must be positive");
  if (y.size() != grid.size) throw DomainError("pattern and grid sizes differ");
  const double P = expected_period;
  if (grid.x0 > center - 1.5 * P + 1e-9 * P || grid.back() < center + 1.5 * P - 1e-9 * P) {
    throw DomainError("pattern must span three expected periods around the axis");
  }
  auto index_of = [&](double x) {
    return static_cast<Eigen::Index>(std::llround((x - grid.x0) / grid.dx));
  };
  const double tol = 1e-9 * grid.dx;
  Eigen::Index lo = std::max<Eigen::Index>(0, index_of(center - 0.5 * P));
  while (lo < grid.size && grid.x(lo) < center - 0.5 * P - tol) ++lo;
  Eigen::Index hi = std::min<Eigen::Index>(grid.size - 1, index_of(center + 0.5 * P));
  while (hi >= 0 && grid.x(hi) > center + 0.5 * P + tol) --hi;

  ContrastPoint cp;
  Eigen::Index km = lo;
  for (Eigen::Index k = lo; k <= hi; ++k) {
    if (y[k] > y[km]) km = k;
  }
  const Eigen::Index nper = static_cast<Eigen::Index>(std::floor(P / grid.dx + 1e-9));
  // a fringe peak just outside the central window: climb to it (at most
  // half a period further)
  for (Eigen::Index step = 0; step < nper / 2; ++step) {
    if (km > 0 && y[km - 1] > y[km]) {
      --km;
    } else if (km < grid.size - 1 && y[km + 1] > y[km]) {
      ++km;
    } else {
      break;
    }
  }
  const double xm = grid.x(km);
  auto window_min = [&](Eigen::Index a, Eigen::Index b) {
    a = std::max<Eigen::Index>(a, 0);
    b = std::min<Eigen::Index>(b, grid.size - 1);
    Eigen::Index best = a;
    for (Eigen::Index k = a; k <= b; ++k) {
      if (y[k] < y[best]) best = k;
    }
    return best;
  };
  const Eigen::Index kl = window_min(km - nper, km - 1);
  const Eigen::Index kr = window_min(km + 1, km + nper);
  const double imax = refine_extremum(y, km);
  const double imin = 0.5 * (std::max(0.0, refine_extremum(y, kl)) +
                             std::max(0.0, refine_extremum(y, kr)));
  cp.i_max = imax;
  cp.i_min = imin;
  cp.x_max = xm;
  const bool interior_max = km > 0 && km < grid.size - 1 && y[km] >= y[km - 1] && y[km] >= y[km + 1];
  // A minimum reached only at the far end of its window means the intensity
  // is still falling a full period away: an envelope, not a fringe.
  auto edge_only = [&](Eigen::Index kmin, Eigen::Index edge, Eigen::Index inner) {
    if (kmin != edge) return false;
    const Eigen::Index lo = std::min(edge, inner), hi = std::max(edge, inner);
    for (Eigen::Index k = lo; k <= hi; ++k)
      if (k != edge && y[k] <= y[edge]) return false;
    return true;
  };
  const bool no_adjacent_min = edge_only(kl, std::max<Eigen::Index>(km - nper, 0), km - 1) ||
                               edge_only(kr, std::min(km + nper, grid.size - 1), km + 1);
  if (!(imax > 0.0) || !(imax - imin > 1e-12 * imax) || !interior_max || no_adjacent_min) {
    cp.contrast = 0.0;
    cp.degenerate = true;
    return cp;
  }
  cp.contrast = std::clamp((imax - imin) / (imax + imin), 0.0, 1.0);
  return cp;
}

double jackknife_contrast_error(const MCResult& r, double expected_period, double center) {
  const std::size_t nb = r.batch_sums.size();
  if (nb < 2) return 0.0;
  RealArray total = RealArray::Zero(r.pattern.grid.size);
  for (const auto& s : r.batch_sums) total += s;
  const double ntot = static_cast<double>(r.survivors);
  std::vector<double> c;
  for (std::size_t b = 0; b < nb; ++b) {
    const double m = ntot - static_cast<double>(r.batch_counts[b]);
    if (m <= 0.0) continue;
    const RealArray mean = (total - r.batch_sums[b]) / m;
    c.push_back(extract_contrast(r.pattern.grid, mean, expected_period, center).contrast);
  }
  if (c.size() < 2) return 0.0;
  const double k = static_cast<double>(c.size());
  const double avg = std::accumulate(c.begin(), c.end(), 0.0) / k;
  double ss = 0.0;
  for (double v : c) ss += (v - avg) * (v - avg);
  return std::sqrt((k - 1.0) / k * ss);
}

ResolvabilityReport fringe_resolvability(double length, double period, double wavelength,
                                         double detector_resolution, int m_factor) {
  if (!(length > 0.0) || !(period > 0.0) || !(wavelength > 0.0) ||
      !(detector_resolution > 0.0) || m_factor < 1) {
    throw DomainError("resolvability check needs positive inputs");
  }
  ResolvabilityReport r;
  r.order_spacing = length * wavelength / period;
  r.required_length = m_factor * period * detector_resolution / wavelength;
  r.resolvable = r.order_spacing >= m_factor * detector_resolution;
  return r;
}

}  // namespace mwsim
