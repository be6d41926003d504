#include "mwsim/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>

#include "mwsim/constants.hpp"
#include "mwsim/error.hpp"
#include "mwsim/incoherence.hpp"
#include "mwsim/interaction.hpp"
#include "mwsim/io.hpp"
#include "mwsim/kinematics.hpp"
#include "mwsim/random.hpp"
#include "mwsim/talbot_lau.hpp"

namespace mwsim {

namespace {

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string sci(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

struct Context {
  const RunConfig& config;
  const RunOptions& options;
  std::string hash;
  RunOutputs out;
  std::ostringstream summary;

  void write(const std::string& name, DataTable table) {
    table.header.set("run_hash", hash);
    const std::string path = (std::filesystem::path(options.out_dir) / name).string();
    write_text_atomic(path, table.render());
    out.files.push_back(path);
  }
};

MCConfig mc_for(const Context& ctx) {
  MCConfig m = config_mc(ctx.config);
  m.threads = ctx.options.threads;
  return m;
}

// Deterministic beams need a single sample unless the config asks for more.
bool deterministic_beam(const BeamModel& beam, const ParticleSpecies& species, const MCConfig& m) {
  const bool spread = (beam.speed_dist == SpeedDistribution::gaussian_speed && beam.speed_sigma > 0) ||
                      (beam.speed_dist == SpeedDistribution::gaussian_energy && beam.energy_sigma > 0);
  return beam.source_extent == 0.0 && !spread && (species.stable() || !m.decay_culling);
}

std::optional<PhaseProfile> phase_for(Context& ctx, const GratingSpec& grating,
                                      const ParticleSpecies& species, double speed) {
  if (!config_interactions_enabled(ctx.config, species)) return std::nullopt;
  const auto opt = config_interaction(ctx.config);
  const auto ce = effective_slit_width(grating, species, speed, opt);
  auto& md = ctx.out.manifest;
  md.set("a_eff_m", ce.a_eff);
  md.set("a_eff_reduction", ce.reduction());
  md.set("a_eff_near_validity_edge", ce.near_validity_edge ? "true" : "false");
  md.set("wall_cutoff_m", opt.wall_cutoff);
  return interaction_phase(grating, species, speed, opt);
}

void kinematics_manifest(Metadata& md, const ParticleSpecies& species, const GratingSpec& g,
                         double speed) {
  const auto kin = de_broglie(species, speed);
  md.set("species", species.name);
  md.set("speed_m_per_s", kin.speed);
  md.set("wavelength_m", kin.wavelength);
  md.set("kinetic_energy_J", kin.kinetic_energy);
  md.set("talbot_length_m", talbot_length(g.period, kin));
}

std::optional<ContrastPoint> try_contrast(const IntensityPattern& p, double period) {
  try {
    return extract_contrast(p, period);
  } catch (const DomainError&) {
    return std::nullopt;  // window narrower than three fringes
  }
}

// ---------------------------------------------------------------------------

void run_pattern(Context& ctx) {
  const auto& c = ctx.config;
  const auto species = config_species(c);
  const auto grating = config_grating(c);
  const auto beam = config_beam(c, species);
  const auto screen = config_screen(c);
  const double L = c.quantity("screen", "distance");
  MCConfig m = mc_for(ctx);
  if (deterministic_beam(beam, species, m) && !c.has("mc", "samples")) m.sample_count = 1;

  const double v = beam.nominal_speed(species);
  const auto phase = phase_for(ctx, grating, species, v);
  auto res = mc_average(grating, species, L, beam, m, screen, config_field_model(c),
                        phase ? &*phase : nullptr);

  auto& md = ctx.out.manifest;
  kinematics_manifest(md, species, grating, v);
  if (beam.source_extent > 0.0)
    md.set("coherence_length_m",
           coherence_length(beam.source_distance, de_broglie(species, v).wavelength,
                            beam.source_extent));
  md.set("samples", std::to_string(res.samples));
  md.set("survivors", std::to_string(res.survivors));
  md.set("survival_fraction", res.survival_fraction());
  md.set("field_model", std::string(field_model_name(res.model)));

  const double lambda = de_broglie(species, v).wavelength;
  const double period = lambda * L / grating.period;
  ctx.summary << "pattern: " << species.name << ", lambda = " << sci(lambda, 4) << " m, "
              << res.samples << " samples, survival " << fixed(res.survival_fraction(), 4)
              << "\n";
  if (auto cp = try_contrast(res.pattern, period)) {
    md.set("contrast", cp->contrast);
    ctx.summary << "central fringe contrast = " << fixed(cp->contrast, 4) << "\n";
  }
  ctx.write("pattern.dat", pattern_table(res.pattern, &res.standard_error));
}

void run_coherence(Context& ctx) {
  const auto& c = ctx.config;
  const auto species = config_species(c);
  const auto grating = config_grating(c);
  const auto base_beam = config_beam(c, species);
  const auto screen = config_screen(c);
  const double L = c.quantity("screen", "distance");
  const auto extents = c.quantities("coherence", "source_extents");
  const MCConfig m0 = mc_for(ctx);

  const double v = base_beam.nominal_speed(species);
  const double lambda = de_broglie(species, v).wavelength;
  const auto phase = phase_for(ctx, grating, species, v);
  const PhaseProfile* ph = phase ? &*phase : nullptr;
  const double period = lambda * L / grating.period;

  DataTable summary;
  summary.kind = "coherence";
  summary.columns = {"source_extent", "coherence_length", "contrast_mc", "contrast_mc_error",
                     "contrast_analytic", "rms_rel_peak"};
  ctx.summary << "sigma_s [um]   l0 [um]    C_mc     +-       C_analytic  rms/peak\n";
  for (std::size_t i = 0; i < extents.size(); ++i) {
    BeamModel beam = base_beam;
    beam.source_extent = extents[i];
    MCConfig m = m0;
    m.seed = rng::derive_seed(m0.seed, i);
    auto res = mc_average(grating, species, L, beam, m, screen, config_field_model(c), ph);
    const double l0 = extents[i] > 0.0
                          ? coherence_length(beam.source_distance, lambda, extents[i])
                          : std::numeric_limits<double>::infinity();
    const auto an = analytic_coherent_pattern(grating, lambda, L, l0, screen, ph);

    const double peak = an.peak();
    const double rms = std::sqrt((res.pattern.intensity - an.intensity).square().mean()) / peak;
    const auto cm = try_contrast(res.pattern, period);
    const auto ca = try_contrast(an, period);
    const double err = cm ? jackknife_contrast_error(res, period) : 0.0;

    DataTable t;
    t.kind = "coherence_pattern";
    t.header = res.pattern.metadata;
    t.header.set("coherence_length_m", l0);
    t.header.set("grid_x0", format_double(screen.x0));
    t.header.set("grid_dx", format_double(screen.dx));
    t.header.set("grid_size", std::to_string(screen.size));
    t.columns = {"x", "intensity_mc", "stat_error", "intensity_analytic"};
    for (Eigen::Index k = 0; k < screen.size; ++k)
      t.rows.push_back({format_double(screen.x(k)), format_double(res.pattern.intensity[k]),
                        format_double(res.standard_error[k]), format_double(an.intensity[k])});
    ctx.write("coherence_" + std::to_string(i) + ".dat", std::move(t));

    const double nan = std::numeric_limits<double>::quiet_NaN();
    summary.rows.push_back({format_double(extents[i]), format_double(l0),
                            format_double(cm ? cm->contrast : nan), format_double(err),
                            format_double(ca ? ca->contrast : nan), format_double(rms)});
    ctx.summary << fixed(extents[i] / units::um, 3) << "  " << sci(l0 / units::um, 5) << "  "
                << fixed(cm ? cm->contrast : nan, 4) << "  " << fixed(err, 4) << "  "
                << fixed(ca ? ca->contrast : nan, 4) << "  " << fixed(rms, 4) << "\n";
    ctx.out.manifest.set("survival_fraction_" + std::to_string(i), res.survival_fraction());
  }
  kinematics_manifest(ctx.out.manifest, species, grating, v);
  ctx.write("coherence.dat", std::move(summary));
}

void run_slitwidth(Context& ctx) {
  const auto& c = ctx.config;
  const auto base = config_grating(c);
  const auto opt = config_interaction(c);
  const auto& names = c.texts("slitwidth", "species");
  const auto& energies = c.quantities("slitwidth", "energies");
  const std::vector<double> thick =
      c.has("slitwidth", "thicknesses") ? c.quantities("slitwidth", "thicknesses")
                                        : std::vector<double>(names.size(), base.thickness);
  const std::vector<double> cutoffs =
      c.has("slitwidth", "cutoffs") ? c.quantities("slitwidth", "cutoffs") : std::vector<double>{};

  DataTable table;
  table.kind = "slitwidth";
  table.header.set("nominal_width_m", base.open_width());
  table.header.set("wedge_angle_rad", base.wedge_angle);
  table.header.set("permittivity", base.material.permittivity);
  table.header.set("wall_cutoff_m", opt.wall_cutoff);
  table.columns = {"species", "thickness", "energy", "a_eff", "reduction", "near_validity_edge",
                   "transmitted_fraction"};
  DataTable sweep;
  sweep.kind = "slitwidth_cutoff";
  sweep.columns = {"species", "energy", "wall_cutoff", "a_eff", "transmitted_fraction"};

  ctx.summary << "species  E [keV]   a_eff [nm]  reduction  flag\n";
  for (std::size_t s = 0; s < names.size(); ++s) {
    const auto species = config_species(c, names[s]);
    GratingSpec g = base;
    g.thickness = thick[s];
    for (double E : energies) {
      const auto kin = from_energy(species, E);
      const auto ce = effective_slit_width(g, species, kin.speed, opt);
      table.rows.push_back({species.name, format_double(g.thickness), format_double(E),
                            format_double(ce.a_eff), format_double(ce.reduction()),
                            ce.near_validity_edge ? "true" : "false",
                            format_double(ce.open_fraction)});
      ctx.summary << species.name << "  " << sci(E / units::keV, 4) << "  "
                  << fixed(ce.a_eff / units::nm, 1) << "  " << fixed(ce.reduction(), 4)
                  << (ce.near_validity_edge ? "  near validity edge" : "") << "\n";
      for (const auto& p : cutoff_sensitivity(g, species, kin.speed, cutoffs))
        sweep.rows.push_back({species.name, format_double(E), format_double(p.wall_cutoff),
                              p.a_eff ? format_double(*p.a_eff) : "invalid",
                              format_double(p.open_fraction)});
    }
  }
  ctx.write("slitwidth.dat", std::move(table));
  if (!cutoffs.empty()) ctx.write("slitwidth_cutoff.dat", std::move(sweep));
}

void talbot_manifest(Metadata& md, const Metadata& scan) {
  for (const auto& [k, v] : scan.entries()) md.set(k, v);
}

void run_scan_l(Context& ctx) {
  const auto& c = ctx.config;
  auto setup = config_talbot(c);
  const auto ratios = c.quantities("talbot", "ratios");
  const MCConfig m = mc_for(ctx);
  setup.separation = 1.0;  // replaced per point

  auto q = scan_grating_separation(setup, ratios, m);
  auto cl = classical_scan(setup, ratios);
  talbot_manifest(ctx.out.manifest, q.manifest);
  if (!q.points.empty()) {
    ctx.out.manifest.set("width_used_g1_m", q.points.front().width_g1);
    ctx.out.manifest.set("width_used_g2_m", q.points.front().width_g2);
  }
  ctx.summary << "L/T_L      C_quantum  +-        C_classical\n";
  for (std::size_t i = 0; i < ratios.size(); ++i)
    ctx.summary << fixed(ratios[i], 4) << "  " << fixed(q.curve.contrast[i], 4) << "  "
                << fixed(q.curve.error[i], 4) << "  " << fixed(cl.curve.contrast[i], 4) << "\n";
  ctx.write("scan_l.dat", scan_table({q.curve, cl.curve}, {}));
}

void run_scan_e(Context& ctx) {
  const auto& c = ctx.config;
  const auto setup = config_talbot(c);
  const auto energies = c.quantities("talbot", "energies");
  const std::vector<double> sigmas =
      c.has("talbot", "energy_sigmas") ? c.quantities("talbot", "energy_sigmas")
                                       : std::vector<double>{0.0};
  const MCConfig m0 = mc_for(ctx);

  std::vector<ContrastCurve> curves;
  for (std::size_t j = 0; j < sigmas.size(); ++j) {
    MCConfig m = m0;
    m.seed = rng::derive_seed(m0.seed, 1000 + j);
    auto r = scan_energy(setup, energies, sigmas[j], m);
    r.curve.mode += "_sigmaE_keV=" + format_double(sigmas[j] / units::keV);
    talbot_manifest(ctx.out.manifest, r.manifest);
    curves.push_back(r.curve);
  }
  ctx.out.manifest.set("note_b_field", "B_crit = F / (|q| v) at the worst energy; see fields report");
  ctx.summary << "E0 [keV]";
  for (double s : sigmas) ctx.summary << "   C(sigma=" << format_double(s / units::keV) << " keV)";
  ctx.summary << "\n";
  for (std::size_t i = 0; i < energies.size(); ++i) {
    ctx.summary << fixed(energies[i] / units::keV, 3);
    for (const auto& cv : curves) ctx.summary << "   " << fixed(cv.contrast[i], 4);
    ctx.summary << "\n";
  }
  ctx.write("scan_e.dat", scan_table(curves, {}));
}

void run_fields(Context& ctx) {
  const auto& c = ctx.config;
  const auto species = config_species(c);
  const double D = c.quantity("grating", "period");
  const double E = c.quantity("fields", "energy");
  const auto kin = from_energy(species, E);
  const double tl = talbot_length(D, kin);
  const double L = c.maybe_quantity("fields", "length").value_or(tl);
  const bool fraunhofer = c.has("fields", "scale") && c.text("fields", "scale") == "fraunhofer";
  const auto scale = fraunhofer ? PatternScale::fraunhofer : PatternScale::talbot;
  const auto f = critical_fields(species, kin, D, L, scale);
  const auto f_tl = critical_fields(species, kin, D, tl, scale);

  DataTable t;
  t.kind = "fields";
  t.columns = {"quantity", "value", "unit"};
  auto row = [&](const char* q, double v, const char* u) {
    t.rows.push_back({q, format_double(v), u});
  };
  row("energy", E, "J");
  row("speed", kin.speed, "m/s");
  row("wavelength", kin.wavelength, "m");
  row("period", D, "m");
  row("talbot_length", tl, "m");
  row("length", L, "m");
  row("pattern_scale", f.pattern_scale, "m");
  row("flight_time", f.flight_time, "s");
  row("critical_force", f.force, "N");
  row("critical_e_field", f.e_field, "V/m");
  row("critical_b_field", f.b_field, "T");
  row("critical_e_field_at_talbot_length", f_tl.e_field, "V/m");
  row("critical_b_field_at_talbot_length", f_tl.b_field, "T");

  auto& md = ctx.out.manifest;
  md.set("species", species.name);
  md.set("wavelength_m", kin.wavelength);
  md.set("talbot_length_m", tl);
  md.set("critical_force_N", f.force);
  md.set("critical_E_V_per_m", f.e_field);
  md.set("critical_B_T", f.b_field);
  const std::string note =
      "B_crit = F / (|q| v) uses the speed at the quoted energy. A quoted B near 0.3 mG is not "
      "reproduced by this relation for either L = " + fixed(L, 3) + " m (" +
      sci(f.b_field / units::milligauss, 3) + " mG) or L = T_L (" +
      sci(f_tl.b_field / units::milligauss, 3) + " mG); E_crit is unaffected.";
  md.set("note_b_field", note);

  ctx.summary << "species = " << species.name << ", E = " << sci(E / units::keV, 4)
              << " keV, D = " << sci(D / units::um, 4) << " um, L = " << sci(L, 4)
              << " m, T_L = " << sci(tl, 4) << " m\n"
              << "E_crit = " << sci(f.e_field, 3) << " V/m\n"
              << "B_crit = " << sci(f.b_field / units::milligauss, 3) << " mG\n"
              << "at L = T_L: E_crit = " << sci(f_tl.e_field, 3) << " V/m, B_crit = "
              << sci(f_tl.b_field / units::milligauss, 3) << " mG\n"
              << "note: " << note << "\n";
  ctx.write("fields.dat", std::move(t));
}

}  // namespace

std::string run_hash(const RunConfig& config) {
  return hex64(fnv1a64(std::string("mwsim ") + MWSIM_VERSION + "\n" + emit_config(config)));
}

RunOutputs run(const RunConfig& config, const RunOptions& options) {
  validate_config(config);
  const auto t0 = std::chrono::steady_clock::now();
  Context ctx{config, options, run_hash(config), {}, {}};
  ctx.out.run_hash = ctx.hash;
  ctx.out.manifest.set("tool_version", MWSIM_VERSION);
  ctx.out.manifest.set("subcommand", std::string(subcommand_name(config.subcommand())));
  ctx.out.manifest.set("run_hash", ctx.hash);

  switch (config.subcommand()) {
    case Subcommand::pattern: run_pattern(ctx); break;
    case Subcommand::coherence: run_coherence(ctx); break;
    case Subcommand::slitwidth: run_slitwidth(ctx); break;
    case Subcommand::talbot_scan_l: run_scan_l(ctx); break;
    case Subcommand::talbot_scan_e: run_scan_e(ctx); break;
    case Subcommand::fields: run_fields(ctx); break;
  }

  if (options.timing) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ctx.out.manifest.set("timing_s", fixed(secs, 3));
  }
  std::string text = "# mwsim manifest\n";
  for (const auto& [k, v] : ctx.out.manifest.entries()) text += "# " + k + " = " + v + "\n";
  for (const auto& f : ctx.out.files)
    text += "# output = " + std::filesystem::path(f).filename().string() + "\n";
  text += "\n" + emit_config(config);
  const std::string path = (std::filesystem::path(options.out_dir) / "manifest.txt").string();
  write_text_atomic(path, text);
  ctx.out.files.push_back(path);
  ctx.out.summary = ctx.summary.str();
  return std::move(ctx.out);
}

}  // namespace mwsim
