#include "mwsim/wavefield.hpp"

#include <cmath>
#include <numbers>

#include "mwsim/constants.hpp"
#include "mwsim/error.hpp"
#include "mwsim/parallel.hpp"
#include "mwsim/quadrature.hpp"
#include "mwsim/special.hpp"
#include "mwsim/units.hpp"

namespace mwsim {

using constants::pi;
using cplx = std::complex<double>;

RealArray UniformGrid::coordinates() const {
  return RealArray::LinSpaced(size, x0, back());
}

UniformGrid UniformGrid::centered(double half_width, Eigen::Index size) {
  if (size < 2) throw DomainError("grid needs at least two samples");
  return {-half_width, 2.0 * half_width / static_cast<double>(size - 1), size};
}

UniformGrid UniformGrid::spanning(double lo, double hi, Eigen::Index size) {
  if (size < 2) throw DomainError("grid needs at least two samples");
  return {lo, (hi - lo) / static_cast<double>(size - 1), size};
}

void UniformGrid::validate() const {
  if (size < 2) throw ConfigError("grid needs at least two samples");
  if (!(dx > 0.0) || !std::isfinite(dx)) throw ConfigError("grid spacing must be positive");
}

void Metadata::set(const std::string& key, const std::string& value) {
  for (auto& kv : entries_) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Metadata::set(const std::string& key, double value) { set(key, format_double(value)); }

const std::string* Metadata::find(const std::string& key) const {
  for (const auto& kv : entries_) {
    if (kv.first == key) return &kv.second;
  }
  return nullptr;
}

SlitProfile SlitProfile::rectangular(double a) {
  SlitProfile p{SlitKind::rectangular, a, a / (2.0 * std::sqrt(2.0 * pi))};
  p.validate();
  return p;
}

SlitProfile SlitProfile::gaussian(double a) {
  SlitProfile p{SlitKind::gaussian, a, a / (2.0 * std::sqrt(2.0 * pi))};
  p.validate();
  return p;
}

SlitProfile SlitProfile::gaussian_sigma(double sigma) {
  SlitProfile p{SlitKind::gaussian, 2.0 * std::sqrt(2.0 * pi) * sigma, sigma};
  p.validate();
  return p;
}

double SlitProfile::amplitude(double xi) const {
  if (kind == SlitKind::rectangular) {
    return std::abs(xi) <= 0.5 * width ? 1.0 / width : 0.0;
  }
  return std::exp(-xi * xi / (4.0 * sigma * sigma)) / (2.0 * sigma * std::sqrt(pi));
}

void SlitProfile::validate() const {
  if (!(width > 0.0)) throw ConfigError("slit width must be positive");
  if (!(sigma > 0.0)) throw ConfigError("Gaussian slit sigma must be positive");
}

void MaterialSpec::validate() const {
  if (c3 < 0.0) throw ConfigError("C3 must be non-negative");
  if (!(permittivity >= 1.0)) throw ConfigError("relative permittivity must be >= 1");
  if (reference_polarizability < 0.0) {
    throw ConfigError("reference polarizability must be non-negative");
  }
}

double GratingSpec::exit_width() const {
  return profile.width + 2.0 * thickness * std::tan(wedge_angle);
}

double GratingSpec::slit_center(int n) const {
  return (n - 0.5 * (n_slits - 1)) * period;
}

double GratingSpec::weight(int n) const {
  return weights.empty() ? 1.0 : weights.at(static_cast<std::size_t>(n));
}

void GratingSpec::validate() const {
  if (n_slits < 1) throw ConfigError("grating needs at least one slit");
  profile.validate();
  if (!(period > 0.0)) throw ConfigError("grating period must be positive");
  if (thickness < 0.0) throw ConfigError("grating thickness must be non-negative");
  if (wedge_angle < 0.0 || wedge_angle >= 0.5 * pi) {
    throw ConfigError("wedge angle must lie in [0, 90) deg");
  }
  // Gaussian apertures superpose smoothly and may overlap
  if (profile.kind == SlitKind::rectangular && !(period > exit_width())) {
    throw ConfigError("period must exceed slit width");
  }
  if (!weights.empty() && weights.size() != static_cast<std::size_t>(n_slits)) {
    throw ConfigError("slit weight count must equal the slit count");
  }
  material.validate();
}

std::pair<RealArray, RealArray> PhaseProfile::sample(Eigen::Index n) const {
  RealArray xi = RealArray::LinSpaced(n, -half_width, half_width);
  RealArray ph(n);
  for (Eigen::Index k = 0; k < n; ++k) ph[k] = (*this)(xi[k]);
  return {xi, ph};
}

PhaseProfile PhaseProfile::scaled(double factor) const {
  PhaseProfile p = *this;
  p.scale *= factor;
  if (phase) {
    auto f = phase;
    p.phase = [f, factor](double xi) { return factor * f(xi); };
  }
  return p;
}

double ComplexWavefield::norm2() const {
  const RealArray p = amplitude.abs2();
  if (p.size() < 2) return 0.0;
  return grid.dx * (p.sum() - 0.5 * (p[0] + p[p.size() - 1]));
}

double IntensityPattern::integral() const {
  if (intensity.size() < 2) return 0.0;
  return grid.dx * (intensity.sum() - 0.5 * (intensity[0] + intensity[intensity.size() - 1]));
}

double IntensityPattern::at(double x) const {
  const double u = (x - grid.x0) / grid.dx;
  if (u < 0.0 || u > static_cast<double>(grid.size - 1)) return 0.0;
  const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(u), grid.size - 2);
  const double t = u - static_cast<double>(k);
  return (1.0 - t) * intensity[k] + t * intensity[k + 1];
}

ScaledCoordinates ScaledCoordinates::from(double sigma, double period, double length,
                                          double wavelength) {
  if (!(sigma > 0.0) || !(period > 0.0) || !(length >= 0.0) || !(wavelength > 0.0)) {
    throw DomainError("scaled coordinates need positive sigma, D, lambda and L >= 0");
  }
  return {sigma, period / sigma, length * wavelength / (4.0 * pi * sigma * sigma)};
}

ComplexWavefield build_grating_field(const GratingSpec& grating, const UniformGrid& grid,
                                     double wavelength, const PhaseProfile* phase) {
  grating.validate();
  grid.validate();
  const auto& prof = grating.profile;
  const double half = 0.5 * prof.width;
  if (phase && phase->half_width > half * (1.0 + 1e-12)) {
    throw ConfigError("phase profile support exceeds the slit width");
  }
  ComplexWavefield f{grid, ComplexArray::Zero(grid.size), wavelength};
  const double edge_tol = 1e-9 * grid.dx;
  for (int n = 0; n < grating.n_slits; ++n) {
    const double c = grating.slit_center(n);
    const double w = grating.weight(n);
    for (Eigen::Index k = 0; k < grid.size; ++k) {
      const double xi = grid.x(k) - c;
      double amp = 0.0;
      if (prof.kind == SlitKind::rectangular) {
        const double d = std::abs(xi) - half;
        if (d < -edge_tol) amp = 1.0 / prof.width;
        else if (d <= edge_tol) amp = 0.5 / prof.width;
      } else {
        amp = prof.amplitude(xi);
      }
      if (amp == 0.0) continue;
      if (phase) {
        if (!phase->transmits(xi)) continue;
        f.amplitude[k] += w * std::polar(amp, (*phase)(xi));
      } else {
        f.amplitude[k] += w * amp;
      }
    }
  }
  if (phase) {
    // The phase must be sampled finely enough to be represented on the grid.
    double worst = 0.0;
    for (Eigen::Index k = 0; k + 1 < grid.size; ++k) {
      const auto a = f.amplitude[k], b = f.amplitude[k + 1];
      if (a == cplx{} || b == cplx{}) continue;
      worst = std::max(worst, std::abs(std::arg(b / a)));
    }
    if (worst > 0.5 * pi) {
      throw ResolutionError("phase mask under-sampled (step " + format_double(worst) + " rad)",
                            static_cast<long>(std::ceil(grid.size * worst / (0.5 * pi))));
    }
  }
  return f;
}

double fresnel_required_spacing(double wavelength, double length, double max_separation) {
  return wavelength * length / (4.0 * max_separation);
}

namespace {

// Automatic output window: RMS width of |psi|^2 grown by the RMS wavenumber
// (free-evolution variance), padded to 8 sigma.
UniformGrid auto_output_grid(const ComplexWavefield& f, double length, Eigen::Index n) {
  const RealArray x = f.grid.coordinates();
  const RealArray p = f.amplitude.abs2();
  const double w = p.sum();
  if (!(w > 0.0)) throw NumericalError("cannot propagate an all-zero field");
  const double mean = (x * p).sum() / w;
  const double var_x = ((x - mean).square() * p).sum() / w;
  double grad2 = 0.0;
  for (Eigen::Index k = 0; k + 1 < f.grid.size; ++k) {
    grad2 += std::norm((f.amplitude[k + 1] - f.amplitude[k]) / f.grid.dx);
  }
  const double var_k = grad2 / w;
  const double t = f.wavelength * length / (2.0 * pi);
  const double sigma_out = std::sqrt(var_x + t * t * var_k);
  const double half = std::max(std::abs(f.grid.x0 - mean), std::abs(f.grid.back() - mean));
  return UniformGrid::spanning(mean - half - 8.0 * sigma_out, mean + half + 8.0 * sigma_out, n);
}

}  // namespace

ComplexWavefield fresnel_propagate(const ComplexWavefield& field, double length,
                                   const PropagationOptions& options,
                                   PropagationReport* report) {
  if (!(length > 0.0)) throw DomainError("propagation distance must be positive");
  if (!(field.wavelength > 0.0)) throw DomainError("wavefield needs a positive wavelength");
  field.grid.validate();
  const UniformGrid out_grid =
      options.output ? *options.output : auto_output_grid(field, length, options.auto_samples);
  out_grid.validate();

  const auto& in = field.grid;
  const double lam_l = field.wavelength * length;
  const double max_sep = std::max(out_grid.back() - in.x0, in.back() - out_grid.x0);
  const double step = 2.0 * pi * max_sep * in.dx / lam_l;
  if (step > 0.5 * pi * (1.0 + 1e-12)) {
    const double need = fresnel_required_spacing(field.wavelength, length, max_sep);
    const long required = static_cast<long>(std::ceil(in.extent() / need)) + 1;
    throw ResolutionError("Fresnel kernel under-resolved: phase step " + format_double(step) +
                              " rad > pi/2; need " + std::to_string(required) + " input samples",
                          required);
  }

  // Only samples with nonzero amplitude contribute.
  std::vector<Eigen::Index> support;
  for (Eigen::Index k = 0; k < in.size; ++k) {
    if (field.amplitude[k] != cplx{}) support.push_back(k);
  }
  const double a = pi / lam_l;
  const double pref = 1.0 / std::sqrt(lam_l);
  const Eigen::Index last = in.size - 1;
  const bool richardson = options.richardson && in.size >= 5 && (in.size % 2 == 1);

  ComplexWavefield out{out_grid, ComplexArray::Zero(out_grid.size), field.wavelength};
  RealArray coarse_err = RealArray::Zero(out_grid.size);
  parallel_for(static_cast<std::size_t>(out_grid.size), options.threads, [&](std::size_t j) {
    const double x = out_grid.x(static_cast<Eigen::Index>(j));
    cplx fine = 0.0, coarse = 0.0;
    for (Eigen::Index k : support) {
      const double d = x - in.x(k);
      const cplx term = field.amplitude[k] * std::polar(1.0, a * d * d);
      const double wt = (k == 0 || k == last) ? 0.5 : 1.0;
      fine += wt * term;
      if (richardson && (k % 2 == 0)) coarse += wt * 2.0 * term;
    }
    fine *= pref * in.dx;
    out.amplitude[static_cast<Eigen::Index>(j)] = fine;
    if (richardson) coarse_err[static_cast<Eigen::Index>(j)] = std::abs(fine - pref * in.dx * coarse) / 3.0;
  });

  if (report) {
    report->max_phase_step = step;
    const double peak = out.amplitude.abs().maxCoeff();
    report->richardson_error = richardson && peak > 0.0 ? coarse_err.maxCoeff() / peak : 0.0;
    report->input_norm2 = field.norm2();
    report->output_norm2 = out.norm2();
  }
  return out;
}

IntensityPattern analytic_two_slit_intensity(const ScaledCoordinates& coords,
                                             const UniformGrid& grid, Normalization norm) {
  grid.validate();
  const double l = coords.l_hat;
  const double d = coords.d_hat;
  const double g = 1.0 + l * l;
  IntensityPattern p{grid, RealArray(grid.size), {}};
  for (Eigen::Index k = 0; k < grid.size; ++k) {
    const double xh = coords.x_hat(grid.x(k));
    const double fp = std::exp(-(xh + 0.5 * d) * (xh + 0.5 * d) / (2.0 * g));
    const double fm = std::exp(-(xh - 0.5 * d) * (xh - 0.5 * d) / (2.0 * g));
    p.intensity[k] = fp + fm + 2.0 * std::sqrt(fp * fm) * std::cos(l * xh * d / (2.0 * g));
  }
  if (norm == Normalization::absolute) {
    const double amp = 1.0 / (2.0 * coords.sigma * std::sqrt(pi));
    p.intensity *= amp * amp / std::sqrt(g);
  }
  p.metadata.set("model", "gaussian_two_slit_closed_form");
  p.metadata.set("sigma_m", coords.sigma);
  p.metadata.set("d_hat", coords.d_hat);
  p.metadata.set("l_hat", coords.l_hat);
  return p;
}

std::complex<double> fraunhofer_envelope(const SlitProfile& profile, const PhaseProfile* phase,
                                         double zeta) {
  if (!phase || !phase->phase) {
    if (phase && phase->half_width < 0.5 * profile.width) {
      // constant phase but narrowed support
      if (profile.kind == SlitKind::rectangular) {
        return 2.0 * phase->half_width / profile.width *
               special::sinc(zeta * phase->half_width);
      }
    } else if (profile.kind == SlitKind::rectangular) {
      return special::sinc(0.5 * zeta * profile.width);
    } else {
      return std::exp(-profile.sigma * profile.sigma * zeta * zeta);
    }
  }
  const double h = phase ? phase->half_width : 0.5 * profile.width;
  // Panels refined geometrically toward both walls, where the phase varies
  // fastest.
  std::vector<double> breaks;
  for (int k = 40; k >= 1; --k) breaks.push_back(-h + h * std::ldexp(1.0, -k));
  breaks.push_back(0.0);
  for (int k = 1; k <= 40; ++k) breaks.push_back(h - h * std::ldexp(1.0, -k));
  auto f = [&](double xi) {
    const double ph = phase ? (*phase)(xi) : 0.0;
    return std::polar(profile.amplitude(xi), ph + zeta * xi);
  };
  const auto r = quad::integrate(f, -h, h, 1e-14, 1e-11, breaks);
  if (!r.converged) {
    throw NumericalError("Fraunhofer envelope quadrature did not converge (error " +
                         format_double(r.error) + ")");
  }
  return r.value;
}

ComplexArray fraunhofer_envelope(const SlitProfile& profile, const PhaseProfile* phase,
                                 const UniformGrid& grid, double wavelength, double length) {
  ComplexArray out(grid.size);
  const double s = 2.0 * pi / (wavelength * length);
  for (Eigen::Index k = 0; k < grid.size; ++k) {
    out[k] = fraunhofer_envelope(profile, phase, s * grid.x(k));
  }
  return out;
}

IntensityPattern classical_double_slit(double a, double period, double wavelength,
                                       double length, const UniformGrid& grid) {
  if (!(a > 0.0) || !(period > 0.0) || !(wavelength > 0.0) || !(length > 0.0)) {
    throw DomainError("classical double slit needs positive a, D, lambda, L");
  }
  IntensityPattern p{grid, RealArray(grid.size), {}};
  for (Eigen::Index k = 0; k < grid.size; ++k) {
    const double u = pi * grid.x(k) / (wavelength * length);
    const double s = special::sinc(a * u);
    p.intensity[k] = s * s * (1.0 + std::cos(2.0 * period * u));
  }
  p.metadata.set("model", "classical_double_slit");
  return p;
}

bool far_field_applicable(double l_hat, double window, double period) {
  return l_hat > 50.0 && window >= 10.0 * period;
}

}  // namespace mwsim
