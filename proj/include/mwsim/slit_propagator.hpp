#pragma once

#include <complex>
#include <vector>

#include "mwsim/wavefield.hpp"

namespace mwsim {

/// Illumination of a grating: a plane wave (optionally tilted by a common
/// transverse wavenumber k_x) or a point source at transverse position
/// x_s a distance `distance` upstream.
struct Illumination {
  enum class Kind { plane_wave, point_source } kind = Kind::plane_wave;
  double tilt = 0.0;      // k_x, rad/m (plane wave)
  double source_x = 0.0;  // x_s (point source)
  double distance = 0.0;  // L1 (point source)

  static Illumination plane(double tilt = 0.0) { return {Kind::plane_wave, tilt, 0.0, 0.0}; }
  static Illumination point(double x_s, double distance) {
    return {Kind::point_source, 0.0, x_s, distance};
  }
};

/// Semi-analytic coherent propagation of an N-slit grating to a screen.
/// Rectangular slits use Fresnel integrals, Gaussian slits the complex
/// Gaussian integral, and phase-masked slits a piecewise-linear phase
/// panelling with one closed-form chirp integral per panel.
class SlitPropagator {
 public:
  SlitPropagator(GratingSpec grating, double wavelength, const PhaseProfile* phase = nullptr,
                 double phase_tolerance = 1e-4);

  /// Field at screen position x, distance L behind the grating, with the
  /// (lambda L)^{-1/2} kernel normalization. Both illuminations have unit
  /// intensity at the grating (a point source is the chirp
  /// exp[i pi (x' - x_s)^2 / (lambda L1)]). Global phases common to all x
  /// are dropped.
  [[nodiscard]] std::complex<double> fresnel_amplitude(double x, double length,
                                                       const Illumination& ill) const;
  /// Fraunhofer limit of fresnel_amplitude(): the grating spectrum at
  /// q = 2 pi x / (lambda L) - k_x. A point source enters only through its
  /// tilt k_x = -2 pi x_s / (lambda L1), which shifts the whole pattern by
  /// -x_s L / L1.
  [[nodiscard]] std::complex<double> fraunhofer_amplitude(double x, double length,
                                                          const Illumination& ill) const;

  [[nodiscard]] RealArray fresnel_intensity(const UniformGrid& grid, double length,
                                            const Illumination& ill) const;
  [[nodiscard]] RealArray fraunhofer_intensity(const UniformGrid& grid, double length,
                                               const Illumination& ill) const;

  /// Same grating at another wavelength with the phase mask multiplied by
  /// `phase_factor` (eikonal phases scale as 1/v). Reuses the panels.
  [[nodiscard]] SlitPropagator rescaled(double wavelength, double phase_factor) const;

  /// Single-slit envelope by panels; independent of the Gauss-Kronrod route
  /// in fraunhofer_envelope().
  [[nodiscard]] std::complex<double> envelope(double zeta) const;

  [[nodiscard]] const GratingSpec& grating() const { return grating_; }
  [[nodiscard]] double wavelength() const { return wavelength_; }
  [[nodiscard]] std::size_t panel_count() const { return panels_.size(); }

 private:
  struct Panel {
    double lo, hi;    // relative to the slit center
    double phi0;      // phase at lo
    double slope;     // dphi/dxi
  };
  [[nodiscard]] std::complex<double> slit_chirp(double alpha, double center, double slit_c) const;
  [[nodiscard]] std::complex<double> array_factor(double zeta) const;

  GratingSpec grating_;
  double wavelength_;
  bool masked_ = false;
  std::vector<Panel> panels_;
};

/// Builds panels on [-h, h] such that linear interpolation of phi deviates
/// by at most `tolerance` rad at panel midpoints.
std::vector<std::pair<double, double>> phase_panels(const PhaseProfile& phase, double tolerance);

}  // namespace mwsim
