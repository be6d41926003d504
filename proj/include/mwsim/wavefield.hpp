#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mwsim {

using RealArray = Eigen::ArrayXd;
using ComplexArray = Eigen::ArrayXcd;

/// Uniform transverse grid x_k = x0 + k dx, k = 0..size-1.
struct UniformGrid {
  double x0 = 0.0;
  double dx = 1.0;
  Eigen::Index size = 0;

  [[nodiscard]] double x(Eigen::Index k) const { return x0 + static_cast<double>(k) * dx; }
  [[nodiscard]] double back() const { return x(size - 1); }
  [[nodiscard]] double extent() const { return back() - x0; }
  [[nodiscard]] RealArray coordinates() const;
  /// Odd sample count keeps x = 0 on a node.
  static UniformGrid centered(double half_width, Eigen::Index size);
  static UniformGrid spanning(double lo, double hi, Eigen::Index size);
  void validate() const;

  bool operator==(const UniformGrid&) const = default;
};

/// Ordered key = value provenance attached to patterns and written to file
/// headers.
class Metadata {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  [[nodiscard]] const std::string* find(const std::string& key) const;
  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  bool operator==(const Metadata&) const = default;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

enum class SlitKind { rectangular, gaussian };

struct SlitProfile {
  SlitKind kind = SlitKind::rectangular;
  double width = 0.0;  // a
  double sigma = 0.0;  // Gaussian amplitude width, psi ~ exp(-x^2 / 4 sigma^2)

  static SlitProfile rectangular(double a);
  /// Gaussian with sigma = a / (2 sqrt(2 pi)).
  static SlitProfile gaussian(double a);
  static SlitProfile gaussian_sigma(double sigma);
  /// Unit-integral single-slit amplitude at offset xi from the slit center.
  [[nodiscard]] double amplitude(double xi) const;
  void validate() const;

  bool operator==(const SlitProfile&) const = default;
};

/// Wall material of a grating. C3 is the van der Waals coefficient measured
/// for a reference particle of polarizability `reference_polarizability`.
struct MaterialSpec {
  std::string name = "none";
  double c3 = 0.0;                        // J m^3
  double reference_polarizability = 0.0;  // m^3
  double permittivity = 1.0;              // relative

  void validate() const;
  bool operator==(const MaterialSpec&) const = default;
};

/// N identical slits with period D. `profile.width` is the open width a_m on
/// the beam-facing side; the exit width is a_M = a_m + 2 delta tan(beta).
struct GratingSpec {
  int n_slits = 1;
  double period = 0.0;
  SlitProfile profile;
  double thickness = 0.0;   // delta
  double wedge_angle = 0.0; // beta
  MaterialSpec material;
  std::vector<double> weights;  // C_n, empty means all 1

  [[nodiscard]] double open_width() const { return profile.width; }
  [[nodiscard]] double exit_width() const;
  [[nodiscard]] double slit_center(int n) const;
  [[nodiscard]] double weight(int n) const;
  [[nodiscard]] double open_fraction() const { return profile.width / period; }
  void validate() const;

  bool operator==(const GratingSpec&) const = default;
};

/// Transmission phase phi(xi) across one slit (xi measured from the slit
/// center). Points with |xi| > half_width are absorbed.
struct PhaseProfile {
  double half_width = 0.0;
  std::function<double(double)> phase;
  double scale = 0.0;  // interaction scale, informational
  std::string model;

  [[nodiscard]] bool transmits(double xi) const { return std::abs(xi) <= half_width; }
  [[nodiscard]] double operator()(double xi) const { return phase ? phase(xi) : 0.0; }
  /// Samples (xi, phi) on n points across the transmitting interval.
  [[nodiscard]] std::pair<RealArray, RealArray> sample(Eigen::Index n) const;
  /// Copy with phi scaled by `factor` (phi is proportional to 1/v).
  [[nodiscard]] PhaseProfile scaled(double factor) const;
};

struct ComplexWavefield {
  UniformGrid grid;
  ComplexArray amplitude;
  double wavelength = 0.0;

  /// Trapezoid estimate of int |psi|^2 dx.
  [[nodiscard]] double norm2() const;
  [[nodiscard]] RealArray intensity() const { return amplitude.abs2(); }
};

struct IntensityPattern {
  UniformGrid grid;
  RealArray intensity;
  Metadata metadata;

  [[nodiscard]] double peak() const { return intensity.size() ? intensity.maxCoeff() : 0.0; }
  /// Trapezoid estimate of int I dx.
  [[nodiscard]] double integral() const;
  /// Linear interpolation (zero outside the grid).
  [[nodiscard]] double at(double x) const;
};

/// Rescaled Gaussian two-slit variables: x^ = x / sigma, D^ = D / sigma,
/// L^ = L lambda / (4 pi sigma^2).
struct ScaledCoordinates {
  double sigma = 0.0;
  double d_hat = 0.0;
  double l_hat = 0.0;

  static ScaledCoordinates from(double sigma, double period, double length, double wavelength);
  [[nodiscard]] double x_hat(double x) const { return x / sigma; }
};

/// Superposition of N D-shifted unit-integral slit amplitudes sampled on
/// `grid`, each multiplied by exp(i phi) when a phase is supplied. Edge
/// samples of rectangular slits carry half weight so grid-aligned edges are
/// integrated exactly by the trapezoid rule.
ComplexWavefield build_grating_field(const GratingSpec& grating, const UniformGrid& grid,
                                     double wavelength, const PhaseProfile* phase = nullptr);

struct PropagationOptions {
  std::optional<UniformGrid> output;  // default: automatic window
  Eigen::Index auto_samples = 2049;
  bool richardson = true;
  unsigned threads = 0;
};

struct PropagationReport {
  double max_phase_step = 0.0;   // rad between adjacent input samples
  double richardson_error = 0.0; // max |S_h - S_2h| / 3, relative to peak |psi|
  double input_norm2 = 0.0;
  double output_norm2 = 0.0;
};

/// psi(x, L) = (lambda L)^{-1/2} int exp[i pi (x - x')^2 / (lambda L)] psi(x') dx'
/// by the trapezoid rule over the input samples. Throws ResolutionError when
/// the kernel phase advances more than pi/2 between input samples.
ComplexWavefield fresnel_propagate(const ComplexWavefield& field, double length,
                                   const PropagationOptions& options = {},
                                   PropagationReport* report = nullptr);

/// Input spacing needed to keep the kernel phase step below pi/2 for an
/// input/output pair spanning at most `max_separation`.
double fresnel_required_spacing(double wavelength, double length, double max_separation);

enum class Normalization {
  relative,  // the bare two-Gaussian interference formula (peak 4 at L = 0)
  absolute,  // |psi|^2 for unit-integral Gaussians and the (lambda L)^{-1/2} kernel
};

/// Closed-form Gaussian two-slit intensity
/// I = F+ + F- + 2 sqrt(F+ F-) cos[L^ x^ D^ / (2 (1 + L^2))].
IntensityPattern analytic_two_slit_intensity(const ScaledCoordinates& coords,
                                             const UniformGrid& grid,
                                             Normalization norm = Normalization::relative);

/// Fraunhofer single-slit envelope psi^(zeta) = int psi(xi) e^{i phi(xi)} e^{i zeta xi} dxi
/// with zeta = 2 pi x / (lambda L). Closed forms without phase; adaptive
/// Gauss-Kronrod with a phase.
std::complex<double> fraunhofer_envelope(const SlitProfile& profile, const PhaseProfile* phase,
                                         double zeta);
ComplexArray fraunhofer_envelope(const SlitProfile& profile, const PhaseProfile* phase,
                                 const UniformGrid& grid, double wavelength, double length);

/// Classical Fraunhofer double slit, sinc^2(pi a x / (lambda L)) [1 + cos(2 pi D x / (lambda L))].
IntensityPattern classical_double_slit(double a, double period, double wavelength,
                                       double length, const UniformGrid& grid);

/// Far-field switch: Fraunhofer formulas only when L^ > 50 and the window is
/// at least ten periods wide.
bool far_field_applicable(double l_hat, double window, double period);

}  // namespace mwsim
