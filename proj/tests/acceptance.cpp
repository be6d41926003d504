// Acceptance checks. Usage: mwsim_acceptance [criterion ...] (default: all).
// Prints one line per sub-check and a final PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mwsim/config.hpp"
#include "mwsim/constants.hpp"
#include "mwsim/error.hpp"
#include "mwsim/incoherence.hpp"
#include "mwsim/interaction.hpp"
#include "mwsim/io.hpp"
#include "mwsim/kinematics.hpp"
#include "mwsim/run.hpp"
#include "mwsim/slit_propagator.hpp"
#include "mwsim/species.hpp"
#include "mwsim/wavefield.hpp"

using namespace mwsim;
namespace fs = std::filesystem;

namespace {

class Criterion {
 public:
  explicit Criterion(int n) : n_(n) {}

  void check(const std::string& what, bool ok, const std::string& detail) {
    std::printf("  [%s] c%d %s: %s\n", ok ? "ok" : "FAILED", n_, what.c_str(), detail.c_str());
    std::fflush(stdout);
    all_ &= ok;
  }
  bool finish(const std::string& title) const {
    std::printf("%s criterion %d: %s\n", all_ ? "PASS" : "FAIL", n_, title.c_str());
    std::fflush(stdout);
    return all_;
  }

 private:
  int n_;
  bool all_ = true;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}
std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}
std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

std::string out_dir(const std::string& name) {
  const fs::path p = fs::path(MWSIM_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

RunConfig preset(const std::string& name) {
  return load_config(std::string(MWSIM_PRESET_DIR) + "/" + name);
}

struct Timed {
  RunOutputs out;
  double seconds = 0.0;
};

Timed timed_run(const RunConfig& c, const std::string& dir, unsigned threads = 0,
                bool timing = true) {
  RunOptions opt;
  opt.out_dir = dir;
  opt.threads = threads;
  opt.timing = timing;
  const auto t0 = std::chrono::steady_clock::now();
  Timed t;
  t.out = run(c, opt);
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

double num(const std::string& s) { return std::stod(s); }

std::string file_named(const RunOutputs& out, const std::string& name) {
  for (const auto& f : out.files)
    if (fs::path(f).filename() == name) return f;
  throw std::runtime_error("run wrote no " + name);
}

// ---------------------------------------------------------------------------

bool criterion1() {
  Criterion c(1);
  const auto ps = species_preset("Ps");
  const double lam = de_broglie(ps, 1e5).wavelength;
  c.check("lambda(Ps, 1e5 m/s) = 3.637 nm within 1%", rel(lam, 3.637e-9) <= 0.01,
          fmt("%.4f nm (rel %.2e)", lam * 1e9, rel(lam, 3.637e-9)));
  const double t1 = talbot_length(265e-9, from_energy_keV(species_preset("pbar"), 1.0));
  c.check("T_L(265 nm, pbar 1 keV) = 77.9 mm within 0.5%", rel(t1, 77.9e-3) <= 0.005,
          fmt("%.3f mm (rel %.2e)", t1 * 1e3, rel(t1, 77.9e-3)));
  const double t2 = talbot_length(2e-6, from_energy_keV(species_preset("e+"), 10.0));
  c.check("T_L(2 um, e+ 10 keV) = 0.326 m within 0.5%", rel(t2, 0.326) <= 0.005,
          fmt("%.4f m (rel %.2e)", t2, rel(t2, 0.326)));
  return c.finish("kinematics goldens");
}

bool criterion2() {
  Criterion c(2);
  const double sig[] = {900e-6, 90e-6, 9e-6};
  const double want[] = {1e-6, 10e-6, 100e-6};
  for (int i = 0; i < 3; ++i) {
    const double l0 = coherence_length(0.5, 3.637e-9, sig[i]);
    c.check(fmt("l0(sigma_s = %.0f um) = %.0f um within 1%%", sig[i] * 1e6, want[i] * 1e6),
            rel(l0, want[i]) <= 0.01, fmt("%.4f um (rel %.2e)", l0 * 1e6, rel(l0, want[i])));
  }
  return c.finish("coherence-length goldens");
}

bool criterion3() {
  Criterion c(3);
  const auto cfg = preset("ps_far_field_coherence.cfg");
  const auto t = timed_run(cfg, out_dir("c3"));
  const auto table = read_table(file_named(t.out, "coherence.dat"));
  const auto l0 = table.numeric_column("coherence_length");
  const auto cm = table.numeric_column("contrast_mc");
  const auto ce = table.numeric_column("contrast_mc_error");
  const auto ca = table.numeric_column("contrast_analytic");
  const auto rms = table.numeric_column("rms_rel_peak");
  c.check("1e5 samples per pattern", cfg.integer("mc", "samples") == 100000,
          std::to_string(cfg.integer("mc", "samples")));
  for (int i = 0; i < 3; ++i)
    std::printf("  l0 = %.3g um: C_mc = %.4f +- %.4f, C_analytic = %.4f, rms/peak = %.4f\n",
                l0[i] * 1e6, cm[i], ce[i], ca[i], rms[i]);
  c.check("C(l0 = 1 um) < 0.05", cm[0] < 0.05, fmt("%.4f", cm[0]));
  c.check("C(l0 = 10 um) intermediate", cm[1] > cm[0] && cm[1] < cm[2],
          fmt("%.4f < %.4f < %.4f", cm[0], cm[1], cm[2]));
  c.check("C(l0 = 100 um) > 0.9", cm[2] > 0.9, fmt("%.4f", cm[2]));
  for (int i = 0; i < 3; ++i)
    c.check(fmt("RMS vs analytic < 2%% of peak (l0 = %.0f um)", l0[i] * 1e6), rms[i] < 0.02,
            fmt("%.4f", rms[i]));
  c.check("runtime <= 2 min", t.seconds <= 120.0, fmt("%.1f s", t.seconds));
  return c.finish("far-field partial coherence");
}

bool criterion4() {
  Criterion c(4);
  const auto t0 = std::chrono::steady_clock::now();
  const double sigma = 50e-9, lambda = 1e-10;
  double worst_err = 0.0, worst_norm = 0.0;
  for (double l_hat : {0.1, 1.0, 10.0}) {
    for (double d_hat : {5.0, 20.0}) {
      const double D = d_hat * sigma;
      const double L = l_hat * 4.0 * constants::pi * sigma * sigma / lambda;
      GratingSpec g;
      g.n_slits = 2;
      g.period = D;
      g.profile = SlitProfile::gaussian_sigma(sigma);
      // support padded by 8 sigma; spacing sigma / 20, refined on request
      const double half = 0.5 * D + 8.0 * sigma;
      Eigen::Index n = static_cast<Eigen::Index>(2.0 * half / (sigma / 20.0)) + 1;
      ComplexWavefield out;
      PropagationReport rep;
      ComplexWavefield in;
      for (;;) {
        in = build_grating_field(g, UniformGrid::centered(half, n), lambda);
        try {
          out = fresnel_propagate(in, L, {}, &rep);
          break;
        } catch (const ResolutionError& e) {
          n = e.required_samples();
        }
      }
      const auto sc = ScaledCoordinates::from(sigma, D, L, lambda);
      const auto ref = analytic_two_slit_intensity(sc, out.grid, Normalization::absolute);
      const double err = (out.intensity() - ref.intensity).abs().maxCoeff() / ref.peak();
      const double dn = std::abs(rep.output_norm2 / rep.input_norm2 - 1.0);
      std::printf("  L^ = %-4g D^ = %-3g: max err / peak = %.2e, |norm change| = %.2e\n", l_hat,
                  d_hat, err, dn);
      worst_err = std::max(worst_err, err);
      worst_norm = std::max(worst_norm, dn);
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.check("max error <= 1e-4 of peak over the (L^, D^) grid", worst_err <= 1e-4,
          fmt("%.2e", worst_err));
  c.check("probability conserved to 1e-6", worst_norm <= 1e-6, fmt("%.2e", worst_norm));
  c.check("runtime <= 1 min", secs <= 60.0, fmt("%.1f s", secs));
  return c.finish("Fresnel propagator against the Gaussian two-slit closed form");
}

bool criterion5() {
  Criterion c(5);
  const auto t0 = std::chrono::steady_clock::now();
  const auto t = timed_run(preset("slit_width_table.cfg"), out_dir("c5_table"));
  const auto table = read_table(file_named(t.out, "slitwidth.dat"));
  const auto& rows = table.rows;
  const std::size_t sp = table.column("species"), en = table.column("energy"),
                    ae = table.column("a_eff"), fl = table.column("near_validity_edge");
  struct Golden {
    const char* species;
    double keV, nm, tol;
    bool edge;
  };
  const Golden gold[] = {{"e+", 0.1, 401.3, 0.05, false},  {"e+", 1, 477.2, 0.05, false},
                         {"e+", 10, 497.1, 0.05, false},   {"e+", 100, 499.7, 0.05, false},
                         {"pbar", 0.1, 148.1, 0.10, true}, {"pbar", 1, 285.8, 0.05, false},
                         {"pbar", 10, 397.4, 0.05, false}, {"pbar", 100, 460.0, 0.05, false}};
  std::vector<std::pair<std::string, double>> outside;
  for (const auto& g : gold) {
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) {
      return r[sp] == g.species && rel(num(r[en]), g.keV * units::keV) < 1e-9;
    });
    if (it == rows.end()) {
      c.check(std::string(g.species) + " row present", false, "missing");
      continue;
    }
    const double a = num((*it)[ae]) * 1e9;
    const bool ok = rel(a, g.nm) <= g.tol;
    if (!ok) outside.emplace_back(g.species, g.keV);
    const std::string row = std::string(g.species) + fmt(" %g keV", g.keV);
    c.check("a_eff(" + row + fmt(") = %.1f nm within %.0f%%", g.nm, g.tol * 100), ok,
            fmt("%.1f nm (rel %.3f)", a, rel(a, g.nm)));
    if (g.edge) c.check(row + " flagged near the validity edge", (*it)[fl] == "true", (*it)[fl]);
  }
  // the wall-cutoff sweep must exist for every out-of-tolerance row
  if (!outside.empty()) {
    bool swept = true;
    std::size_t n_rows = 0;
    {
      const auto sw = read_table(file_named(t.out, "slitwidth_cutoff.dat"));
      for (const auto& [s, e] : outside) {
        std::size_t k = 0;
        for (const auto& r : sw.rows)
          if (r[sw.column("species")] == s && rel(num(r[sw.column("energy")]), e * units::keV) < 1e-9)
            ++k;
        swept &= k > 0;
        n_rows += k;
      }
    }
    c.check("cutoff sensitivity sweep produced for rows outside tolerance", swept,
            std::to_string(outside.size()) + " rows, " + std::to_string(n_rows) + " sweep lines");
  }

  const auto d = timed_run(preset("positron_slit_width.cfg"), out_dir("c5_design"));
  const auto dt = read_table(file_named(d.out, "slitwidth.dat"));
  const double a = num(dt.rows[0][dt.column("a_eff")]);
  const double red = num(dt.rows[0][dt.column("reduction")]);
  c.check("design a_eff = 0.598 um (reduction window [0.594, 0.598] um)",
          std::abs(a - 0.598e-6) <= 0.004e-6, fmt("%.4f um", a * 1e6));
  c.check("design reduction in [0.3%, 1.0%]", red >= 0.003 && red <= 0.010,
          fmt("%.3f%%", red * 100));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.check("runtime <= 1 min", secs <= 60.0, fmt("%.1f s", secs));
  return c.finish("effective slit width goldens");
}

bool criterion6() {
  Criterion c(6);
  const auto cfg = preset("pbar_talbot_scan_l.cfg");
  const auto t = timed_run(cfg, out_dir("c6"));
  const auto curves = read_scan(file_named(t.out, "scan_l.dat"));
  const auto& q = curves.at(0);
  const auto& cl = curves.at(1);
  const auto& r = q.values;
  std::printf("  L/T_L     C_quantum  +-       C_classical\n");
  for (std::size_t i = 0; i < r.size(); ++i)
    std::printf("  %-8.4f  %.4f     %.4f   %.4f\n", r[i], q.contrast[i], q.error[i],
                cl.contrast[i]);
  c.check("20 points over [0.05, 1.5]",
          r.size() == 20 && r.front() <= 0.05 + 1e-12 && r.back() >= 1.5 - 1e-12,
          std::to_string(r.size()) + " points");
  bool local_max = false;
  double where = 0.0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    if (r[i] >= 0.8 && r[i] <= 1.2 && q.contrast[i] >= q.contrast[i - 1] &&
        q.contrast[i] >= q.contrast[i + 1]) {
      local_max = true;
      where = r[i];
    }
  }
  c.check("local contrast maximum in L/T_L in [0.8, 1.2]", local_max,
          local_max ? fmt("at %.3f", where) : "none");
  const auto [mn, mx] = std::minmax_element(cl.contrast.begin(), cl.contrast.end());
  const double var = (*mx - *mn) / *mx;
  c.check("classical baseline varies < 10% relative", var < 0.10, fmt("%.2e", var));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] >= 0.1) continue;
    const double diff = std::abs(q.contrast[i] - cl.contrast[i]);
    c.check(fmt("L/T_L = %.4f: |C_q - C_cl| <= 2 x error", r[i]), diff <= 2.0 * q.error[i],
            fmt("|%.4f - %.4f| = %.4f", q.contrast[i], cl.contrast[i], diff) +
                fmt(" vs %.4f", 2.0 * q.error[i]));
  }
  c.check("1e4 samples per point configured", cfg.integer("mc", "samples") == 10000,
          std::to_string(cfg.integer("mc", "samples")));
  c.check("runtime <= 10 min", t.seconds <= 600.0, fmt("%.1f s", t.seconds));
  return c.finish("Talbot-Lau separation scan");
}

bool criterion7() {
  Criterion c(7);
  const auto t = timed_run(preset("positron_talbot_scan_e.cfg"), out_dir("c7"));
  const auto curves = read_scan(file_named(t.out, "scan_e.dat"));
  c.check("three energy spreads", curves.size() == 3, std::to_string(curves.size()));
  if (curves.size() != 3) return c.finish("Talbot-Lau energy scan");
  const auto& e = curves[0].values;
  std::printf("  E0 [keV]  C(0)     C(0.25)  C(0.5 keV)\n");
  for (std::size_t i = 0; i < e.size(); ++i)
    std::printf("  %-8.2f  %.4f   %.4f   %.4f\n", e[i], curves[0].contrast[i],
                curves[1].contrast[i], curves[2].contrast[i]);
  c.check("scan covers 5-20 keV", e.front() <= 5.0 + 1e-12 && e.back() >= 20.0 - 1e-12,
          fmt("%.2f - %.2f keV", e.front(), e.back()));
  // full peak: interior maximum with the contrast falling below half of it
  // on both sides
  const auto& m = curves[0].contrast;
  const auto k = static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
  const bool interior = k > 0 && k + 1 < m.size();
  const double left = interior ? *std::min_element(m.begin(), m.begin() + k) : m[k];
  const double right = interior ? *std::min_element(m.begin() + k + 1, m.end()) : m[k];
  c.check("monochromatic curve has a full peak inside the range",
          interior && left < 0.5 * m[k] && right < 0.5 * m[k],
          fmt("peak %.4f at %.2f keV", m[k], e[k]) + fmt(", minima %.4f / %.4f", left, right));
  double prev = 2.0;
  const char* names[] = {"0", "0.25", "0.5"};
  for (int j = 0; j < 3; ++j) {
    const double pk = *std::max_element(curves[j].contrast.begin(), curves[j].contrast.end());
    c.check(std::string("peak contrast non-increasing at sigma_E = ") + names[j] + " keV",
            pk <= prev, fmt("%.4f", pk));
    prev = pk;
  }
  c.check("runtime <= 10 min", t.seconds <= 600.0, fmt("%.1f s", t.seconds));
  return c.finish("Talbot-Lau energy scan");
}

bool criterion8() {
  Criterion c(8);
  const auto t = timed_run(preset("positron_fields.cfg"), out_dir("c8"));
  const auto& md = t.out.manifest;
  const double e = num(*md.find("critical_E_V_per_m"));
  const double b = num(*md.find("critical_B_T")) / units::milligauss;
  c.check("E_crit within a factor 2 of 0.2 V/m", e >= 0.1 && e <= 0.4, fmt("%.4f V/m", e));
  c.check("B_crit within an order of magnitude of 0.3 mG", b >= 0.03 && b <= 3.0,
          fmt("%.4f mG", b));
  const std::string manifest = read_text(t.out.files.back());
  c.check("formula-ambiguity note in the manifest",
          manifest.find("# note_b_field = ") != std::string::npos, "note_b_field");
  return c.finish("stray-field tolerances");
}

// Runs `cfg` with 1 and with 3 threads and compares every output byte.
void same_bytes(Criterion& c, const std::string& label, const RunConfig& cfg) {
  const auto a = timed_run(cfg, out_dir("c9_" + label + "_t1"), 1, false);
  const auto b = timed_run(cfg, out_dir("c9_" + label + "_t3"), 3, false);
  bool same = a.out.files.size() == b.out.files.size();
  for (std::size_t i = 0; same && i < a.out.files.size(); ++i)
    same = read_text(a.out.files[i]) == read_text(b.out.files[i]);
  c.check(label + ": 1 vs 3 threads byte-identical", same,
          std::to_string(a.out.files.size()) + " files");
  const auto again = timed_run(cfg, out_dir("c9_" + label + "_t1b"), 1, false);
  bool rerun = a.out.files.size() == again.out.files.size();
  for (std::size_t i = 0; rerun && i < a.out.files.size(); ++i)
    rerun = read_text(a.out.files[i]) == read_text(again.out.files[i]);
  c.check(label + ": repeated run byte-identical", rerun,
          std::to_string(again.out.files.size()) + " files");
}

bool criterion9() {
  Criterion c(9);
  auto coh = preset("ps_far_field_coherence.cfg");
  same_bytes(c, "coherence", coh);
  same_bytes(c, "scan_l", preset("pbar_talbot_scan_l.cfg"));
  return c.finish("determinism across thread counts");
}

bool criterion10() {
  Criterion c(10);
  // zero interaction
  GratingSpec g;
  g.n_slits = 40;
  g.period = 2e-6;
  g.profile = SlitProfile::rectangular(0.6e-6);
  g.thickness = 800e-9;
  g.wedge_angle = 10 * units::deg;
  g.material.permittivity = 1.0;
  const auto ep = species_preset("e+");
  const double v = from_energy_keV(ep, 5.0).speed;
  const auto ce = effective_slit_width(g, ep, v);
  c.check("zero interaction: a_eff = a0", rel(ce.a_eff, 0.6e-6) <= 1e-12,
          fmt("rel %.2e", rel(ce.a_eff, 0.6e-6)));
  // eps = 1
  double worst = 0.0;
  for (double xi : {0.0, 0.1e-6, -0.25e-6, 0.29e-6})
    worst = std::max(worst, std::abs(electrostatic_phase(g, ep, v, xi).value()));
  c.check("eps = 1: zero electrostatic phase", worst == 0.0, fmt("max |phi| = %.1e", worst));

  // l0 -> infinity
  GratingSpec pg;
  pg.n_slits = 10;
  pg.period = 10e-6;
  pg.profile = SlitProfile::rectangular(3e-6);
  const auto ps = species_preset("Ps");
  const double lam = de_broglie(ps, 1e5).wavelength;
  const auto screen = UniformGrid::centered(2.5e-3, 1001);
  const SlitPropagator prop(pg, lam);
  const RealArray coherent = prop.fraunhofer_intensity(screen, 1.0, Illumination::plane());
  const auto an = analytic_coherent_pattern(pg, lam, 1.0, 1e9, screen);
  const double d1 = (an.intensity - coherent).abs().maxCoeff() / coherent.maxCoeff();
  c.check("l0 -> infinity: coherent pattern", d1 <= 1e-9, fmt("max diff / peak = %.1e", d1));

  // sigma_s -> 0
  BeamModel beam;
  beam.source_distance = 0.5;
  beam.mean_speed = 1e5;
  MCConfig cfg;
  cfg.sample_count = 256;
  cfg.decay_culling = false;
  const auto mc = mc_average(pg, ps, 1.0, beam, cfg, screen, FieldModel::fraunhofer);
  const RealArray single =
      prop.fraunhofer_intensity(screen, 1.0, Illumination::point(0.0, beam.source_distance));
  const double d2 = (mc.pattern.intensity - single).abs().maxCoeff() / single.maxCoeff();
  c.check("sigma_s -> 0: single-source pattern", d2 <= 1e-12, fmt("max diff / peak = %.1e", d2));

  // tau = infinity
  cfg.decay_culling = true;
  beam.source_extent = 90e-6;
  const auto stable = mc_average(pg, species_preset("e-"), 1.0, beam, cfg, screen,
                                 FieldModel::fraunhofer);
  const auto kept = decay_cull(100000, ep, 1e3, 1.0, 5);
  c.check("tau = infinity: no culling",
          stable.survivors == stable.samples && kept.size() == 100000,
          std::to_string(stable.survivors) + "/" + std::to_string(stable.samples) +
              " survivors, " + std::to_string(kept.size()) + "/100000 kept");
  return c.finish("trivial limits");
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<bool()>> all = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (const auto& [k, f] : all) which.push_back(k);
  bool ok = true;
  for (int k : which) {
    const auto it = all.find(k);
    if (it == all.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", k);
      return 2;
    }
    try {
      ok &= it->second();
    } catch (const std::exception& e) {
      std::printf("FAIL criterion %d: exception: %s\n", k, e.what());
      ok = false;
    }
  }
  return ok ? 0 : 1;
}
