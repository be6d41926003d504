#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mwsim/incoherence.hpp"
#include "mwsim/interaction.hpp"
#include "mwsim/kinematics.hpp"
#include "mwsim/wavefield.hpp"

namespace mwsim {

/// Two-grating Talbot-Lau interferometer: G1 -> (L) -> G2 -> (L) -> screen.
/// The open slits of G1 act as mutually incoherent, uniformly filled line
/// sources.
struct TalbotLauSetup {
  GratingSpec grating1;
  GratingSpec grating2;
  double separation = 0.0;  // L, also the G2 -> screen distance
  ParticleSpecies species;
  BeamModel beam;  // only the speed/energy distribution is used

  /// Replace the G2 (and optionally G1) slit width by a_eff from the
  /// wall-interaction cumulant expansion. Unset means: on for charged species.
  std::optional<bool> apply_effective_width;
  bool effective_width_on_g1 = false;
  InteractionOptions interaction;

  int source_points_per_slit = 8;    // starting trapezoid intervals per G1 slit
  int max_source_points = 256;
  double contrast_tolerance = 0.005; // absolute change between refinements
  std::optional<UniformGrid> screen; // default: [-2D, 2D], 129 samples

  [[nodiscard]] bool effective_width_enabled() const;
  [[nodiscard]] UniformGrid screen_grid() const;
  void validate() const;
};

struct TalbotLauResult {
  IntensityPattern pattern;
  ContrastPoint contrast;
  double contrast_error = 0.0;  // refinement difference or jackknife error
  int source_points_per_slit = 0;
  std::uint64_t samples = 0;    // Monte Carlo samples (energy spread only)
  double wavelength = 0.0;
  double talbot_length = 0.0;
  double width_g1 = 0.0;        // slit widths actually used
  double width_g2 = 0.0;
};

/// Incoherent sum over G1 source points of the coherent G2 diffraction
/// pattern at distance L. Monochromatic beams integrate the source slits by
/// nested trapezoid refinement until the contrast settles; beams with an
/// energy spread are averaged by Monte Carlo (stratified source positions,
/// Gaussian energies, counter-based seeds).
TalbotLauResult talbot_lau_pattern(const TalbotLauSetup& setup, const MCConfig& cfg);

/// Coherent plane-wave illumination of a single grating observed at L
/// (Talbot self-images at L = n D^2 / lambda).
IntensityPattern talbot_self_image(const GratingSpec& grating, double wavelength, double length,
                                   const UniformGrid& screen);

/// Ballistic (moire) baseline: exact measure of straight rays from G1's
/// open slits that pass G2's open slits, per screen position.
IntensityPattern classical_baseline(const TalbotLauSetup& setup, const UniformGrid& screen);

struct ScanResult {
  ContrastCurve curve;
  Metadata manifest;
  std::vector<TalbotLauResult> points;
};

/// Contrast versus L / T_L at the setup's nominal energy.
ScanResult scan_grating_separation(const TalbotLauSetup& setup, const std::vector<double>& ratios,
                                   const MCConfig& cfg);
/// Classical contrast over the same L / T_L values.
ScanResult classical_scan(const TalbotLauSetup& setup, const std::vector<double>& ratios);
/// Contrast versus mean energy E0 (J) at fixed L with Gaussian energy spread
/// `energy_sigma` (J, 0 = monochromatic).
ScanResult scan_energy(const TalbotLauSetup& setup, const std::vector<double>& energies,
                       double energy_sigma, const MCConfig& cfg);

/// Spatial frequency (1/m) with the largest DFT magnitude of the
/// mean-subtracted pattern, searched on [f_min, f_max].
double dominant_frequency(const IntensityPattern& pattern, double f_min, double f_max,
                          int resolution = 4000);

/// Stray-field tolerances at the worst (lowest) energy of a scan range,
/// Talbot-Lau pattern scale Delta = D and the actual separation L.
CriticalFields scan_critical_fields(const TalbotLauSetup& setup, double worst_energy);

}  // namespace mwsim
