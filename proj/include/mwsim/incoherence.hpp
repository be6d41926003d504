#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mwsim/kinematics.hpp"
#include "mwsim/species.hpp"
#include "mwsim/wavefield.hpp"

namespace mwsim {

enum class SpeedDistribution { delta, gaussian_speed, gaussian_energy };

/// Classical fluctuations of the source: uniform transverse position over
/// [-sigma_s/2, sigma_s/2] at distance y_s upstream of the grating, and a
/// speed (or kinetic energy) distribution.
struct BeamModel {
  double source_extent = 0.0;    // sigma_s
  double source_distance = 1.0;  // y_s
  SpeedDistribution speed_dist = SpeedDistribution::delta;
  double mean_speed = 0.0;       // delta / gaussian_speed
  double speed_sigma = 0.0;
  double mean_energy = 0.0;      // gaussian_energy, J
  double energy_sigma = 0.0;
  std::optional<double> coherence_length;  // for the analytic model only

  /// Speed at which deterministic quantities (lambda, phases) are quoted.
  [[nodiscard]] double nominal_speed(const ParticleSpecies& species) const;
  void validate() const;
};

struct MCConfig {
  std::uint64_t sample_count = 100000;
  std::uint64_t seed = 1;
  bool decay_culling = true;
  unsigned threads = 0;  // 0 = all hardware threads
  int batches = 32;      // fixed reduction blocks, also the jackknife groups

  void validate() const;
};

enum class FieldModel { automatic, fraunhofer, fresnel };

std::string_view field_model_name(FieldModel m);

struct ContrastPoint {
  double contrast = 0.0;
  double i_max = 0.0;
  double i_min = 0.0;
  double x_max = 0.0;
  bool degenerate = false;
};

struct ContrastCurve {
  std::string parameter;  // e.g. "L/T_L", "E0_keV"
  std::string mode;       // e.g. "quantum", "classical"
  std::vector<double> values;
  std::vector<double> contrast;
  std::vector<double> error;

  void push(double value, double c, double err);
  void validate() const;
};

struct MCResult {
  IntensityPattern pattern;      // ensemble mean
  RealArray standard_error;      // per-bin standard error of the mean
  std::uint64_t samples = 0;
  std::uint64_t survivors = 0;
  FieldModel model = FieldModel::fraunhofer;
  std::vector<RealArray> batch_sums;  // per-batch intensity sums (jackknife)
  std::vector<std::uint64_t> batch_counts;

  [[nodiscard]] double survival_fraction() const {
    return samples ? static_cast<double>(survivors) / static_cast<double>(samples) : 0.0;
  }
};

/// Monte Carlo average of the ideal intensity over source position, speed
/// and decay in flight. Each sample is an independent point source at
/// (x_s, -y_s); Fresnel mode propagates its spherical wave exactly through
/// the slits, Fraunhofer mode keeps only its tilt. Bit-identical for a given
/// (config, seed) regardless of the thread count.
MCResult mc_average(const GratingSpec& grating, const ParticleSpecies& species,
                    double screen_distance, const BeamModel& beam, const MCConfig& cfg,
                    const UniformGrid& screen, FieldModel model = FieldModel::automatic,
                    const PhaseProfile* phase = nullptr);

/// Far-field partially coherent N-slit pattern:
/// (N / lambda L) |psi^|^2 {1 + 2 sum_n (N-n)/N exp[-(nD)^2 / 2 l0^2] cos(2 pi n D x / lambda L)}.
IntensityPattern analytic_coherent_pattern(const GratingSpec& grating, double wavelength,
                                           double screen_distance, double coherence_length,
                                           const UniformGrid& screen,
                                           const PhaseProfile* phase = nullptr);

/// l0 = y_s lambda / (2 sigma_s).
double coherence_length(double source_distance, double wavelength, double source_extent);

/// exp(-(path / speed) / tau); 1 for stable species.
double survival_probability(const ParticleSpecies& species, double path_length, double speed);

/// Bernoulli survival of samples [0, n): returns surviving sample indices.
std::vector<std::uint64_t> decay_cull(std::uint64_t n, const ParticleSpecies& species,
                                      double path_length, double speed, std::uint64_t seed);

/// Contrast of the fringe nearest `center`: the maximum within +-P/2 and the
/// lowest intensity within one period on each side of it, averaged. Extrema
/// are refined by three-point parabolic interpolation. Degenerate (C = 0)
/// when there is no interior maximum or when a side's minimum sits only at
/// the far end of its window (monotone envelope, no fringe).
ContrastPoint extract_contrast(const IntensityPattern& pattern, double expected_period,
                               double center = 0.0);
ContrastPoint extract_contrast(const UniformGrid& grid, const RealArray& intensity,
                               double expected_period, double center = 0.0);

/// Jackknife standard error of the contrast over MC batches.
double jackknife_contrast_error(const MCResult& result, double expected_period,
                                double center = 0.0);

struct ResolvabilityReport {
  double order_spacing = 0.0;   // L lambda / D
  double required_length = 0.0; // M D dx / lambda
  bool resolvable = false;
};
/// Detector check L lambda / D >= M dx.
ResolvabilityReport fringe_resolvability(double length, double period, double wavelength,
                                         double detector_resolution, int m_factor);

}  // namespace mwsim
