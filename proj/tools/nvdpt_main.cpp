// nvdpt command-line driver. Talks to the engine only through the C API.
#include "nvdpt/nvdpt.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kNumerical = 3;

struct UsageError {
  std::string message;
};

struct ApiError {
  nvdpt_status status;
  std::string message;
};

void check(nvdpt_status s, const std::string& context) {
  if (s != NVDPT_OK) throw ApiError{s, context + ": " + nvdpt_last_error()};
}

int exit_code(nvdpt_status s) {
  switch (s) {
    case NVDPT_ERR_INVALID_ARGUMENT:
    case NVDPT_ERR_IO:
    case NVDPT_ERR_SCHEMA:
      return kUsage;
    default:
      return kNumerical;
  }
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <class T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using System = Handle<nvdpt_system, nvdpt_system_free>;
using Levels = Handle<nvdpt_levels, nvdpt_levels_free>;
using Tracked = Handle<nvdpt_tracked, nvdpt_tracked_free>;
using Transitions = Handle<nvdpt_transitions, nvdpt_transitions_free>;
using Lacs = Handle<nvdpt_lacs, nvdpt_lacs_free>;
using Dpts = Handle<nvdpt_dpts, nvdpt_dpts_free>;
using Spectrum = Handle<nvdpt_spectrum, nvdpt_spectrum_free>;
using Peaks = Handle<nvdpt_peaks, nvdpt_peaks_free>;
using Assignments = Handle<nvdpt_assignments, nvdpt_assignments_free>;

struct RunConfig {
  std::string system_path;
  std::string out = "-";
  std::string format = "csv";
  std::optional<double> field, from, to, step;
  double kappa_min = 1e-6;
  double fmin = 0.0;
  double fmax = 0.0;
  bool nuclear_zeeman = false;
  bool tme_squared = false;
  bool observable_only = false;
  nvdpt_linewidth_model linewidth{};
  // spectrum
  double fstep = 0.01;
  std::string transitions_path;
  std::string peaks_path;
  std::string assignments_path;
  double window = 5.0;
  // lac / zefoz
  double refine_tol = 0.01;
  // fieldcal
  std::optional<double> n_spins, t_meas, t2_star, linewidth_mhz;
  double gamma = 2.8;
};

nvdpt_format output_format(const RunConfig& c) {
  if (c.format == "csv") return NVDPT_FORMAT_CSV;
  if (c.format == "json") return NVDPT_FORMAT_JSON;
  throw UsageError{"--format must be csv or json, got '" + c.format + "'"};
}

System load_system(const RunConfig& c) {
  nvdpt_system* raw = nullptr;
  if (c.system_path.empty())
    check(nvdpt_system_default(&raw), "--system");
  else
    check(nvdpt_system_load(c.system_path.c_str(), &raw), "--system " + c.system_path);
  System s(raw);
  if (c.nuclear_zeeman) check(nvdpt_system_set_nuclear_zeeman(s.get(), 1), "--nuclear-zeeman");
  return s;
}

void require_positive(double x, const char* flag) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw UsageError{std::string(flag) + " must be positive, got " + std::to_string(x)};
}

void require_single_field(const RunConfig& c) {
  if (c.from || c.to || c.step)
    throw UsageError{"--field cannot be combined with --from/--to/--step"};
  if (!c.field) throw UsageError{"--field is required"};
  if (!std::isfinite(*c.field)) throw UsageError{"--field must be finite"};
}

void require_range(const RunConfig& c) {
  if (c.field) throw UsageError{"--field cannot be combined with --from/--to/--step"};
  if (!c.from || !c.to || !c.step) throw UsageError{"--from, --to and --step are all required"};
  require_positive(*c.step, "--step");
  if (!(*c.from < *c.to)) throw UsageError{"--from must be below --to"};
}

void check_frequency_window(const RunConfig& c) {
  if (c.fmin < 0.0) throw UsageError{"--fmin must not be negative"};
  if (c.fmax != 0.0 && !(c.fmin < c.fmax)) throw UsageError{"--fmin must be below --fmax"};
}

void check_linewidth(const RunConfig& c) {
  require_positive(c.linewidth.bath_field_gauss, "--bath-field");
  require_positive(c.linewidth.floor_mhz, "--floor");
  require_positive(c.linewidth.reference_mhz, "--reference");
}

Tracked run_sweep(const nvdpt_system* system, const RunConfig& c) {
  nvdpt_tracked* raw = nullptr;
  check(nvdpt_sweep(system, *c.from, *c.to, *c.step, &raw), "sweep");
  return Tracked(raw);
}

Transitions run_transitions(const nvdpt_system* system, const RunConfig& c, double kappa_min,
                            bool band) {
  nvdpt_transition_options o;
  nvdpt_transition_options_init(&o);
  o.kappa_min = kappa_min;
  if (band) {
    o.fmin_mhz = c.fmin;
    if (c.fmax > 0.0) o.fmax_mhz = c.fmax;
  }
  o.tme_squared = c.tme_squared ? 1 : 0;
  nvdpt_transitions* raw = nullptr;
  check(nvdpt_transitions_compute(system, *c.field, &o, &raw), "transitions");
  return Transitions(raw);
}

int cmd_eigen(const RunConfig& c) {
  require_single_field(c);
  const nvdpt_format f = output_format(c);
  const System s = load_system(c);
  nvdpt_levels* raw = nullptr;
  check(nvdpt_levels_compute(s.get(), *c.field, &raw), "eigen");
  const Levels levels(raw);
  check(nvdpt_levels_write(levels.get(), c.out.c_str(), f), "--out");
  return kOk;
}

int cmd_sweep(const RunConfig& c) {
  require_range(c);
  const nvdpt_format f = output_format(c);
  const System s = load_system(c);
  const Tracked t = run_sweep(s.get(), c);
  check(nvdpt_tracked_write(t.get(), c.out.c_str(), f), "--out");
  return kOk;
}

int cmd_transitions(const RunConfig& c) {
  require_single_field(c);
  require_positive(c.kappa_min, "--kappa-min");
  check_frequency_window(c);
  const nvdpt_format f = output_format(c);
  const System s = load_system(c);
  const Transitions t = run_transitions(s.get(), c, c.kappa_min, true);
  check(nvdpt_transitions_write(t.get(), c.out.c_str(), f), "--out");
  return kOk;
}

int cmd_lac(const RunConfig& c) {
  require_range(c);
  require_positive(c.refine_tol, "--refine-tol");
  const nvdpt_format f = output_format(c);
  const System s = load_system(c);
  const Tracked t = run_sweep(s.get(), c);
  nvdpt_lacs* raw = nullptr;
  check(nvdpt_lacs_find(t.get(), c.refine_tol, &raw), "lac");
  const Lacs lacs(raw);
  check(nvdpt_lacs_write(lacs.get(), c.out.c_str(), f), "--out");
  return kOk;
}

int cmd_zefoz(const RunConfig& c) {
  require_range(c);
  require_positive(c.kappa_min, "--kappa-min");
  require_positive(c.refine_tol, "--refine-tol");
  if (*c.step > 1.0) throw UsageError{"--step must be at most 1 G for the DPT search"};
  check_linewidth(c);
  const nvdpt_format f = output_format(c);
  const System s = load_system(c);
  const Tracked t = run_sweep(s.get(), c);
  nvdpt_dpt_options o;
  nvdpt_dpt_options_init(&o);
  o.kappa_min = c.kappa_min;
  o.refine_tol_gauss = c.refine_tol;
  o.observable_only = c.observable_only ? 1 : 0;
  o.tme_squared = c.tme_squared ? 1 : 0;
  o.linewidth = c.linewidth;
  nvdpt_dpts* raw = nullptr;
  check(nvdpt_dpts_scan(t.get(), &o, &raw), "zefoz");
  const Dpts dpts(raw);
  check(nvdpt_dpts_write(dpts.get(), c.out.c_str(), f), "--out");
  return kOk;
}

int cmd_spectrum(const RunConfig& c) {
  require_positive(c.kappa_min, "--kappa-min");
  require_positive(c.fstep, "--fstep");
  require_positive(c.window, "--window");
  check_linewidth(c);
  const double fmax = c.fmax > 0.0 ? c.fmax : 100.0;
  if (!(c.fmin < fmax)) throw UsageError{"--fmin must be below --fmax"};
  if (!c.assignments_path.empty() && c.peaks_path.empty())
    throw UsageError{"--assignments requires --peaks"};
  const nvdpt_format f = output_format(c);

  Transitions t;
  if (!c.transitions_path.empty()) {
    if (c.field || c.from || c.to || c.step)
      throw UsageError{"--transitions cannot be combined with --field"};
    nvdpt_transitions* raw = nullptr;
    check(nvdpt_transitions_read(c.transitions_path.c_str(), &raw),
          "--transitions " + c.transitions_path);
    t.reset(raw);
  } else {
    require_single_field(c);
    const System s = load_system(c);
    t = run_transitions(s.get(), c, c.kappa_min, false);
  }

  nvdpt_spectrum* raw = nullptr;
  check(nvdpt_spectrum_synthesize(t.get(), c.fmin, fmax, c.fstep, c.kappa_min, &c.linewidth, &raw),
        "spectrum");
  const Spectrum spectrum(raw);
  check(nvdpt_spectrum_write(spectrum.get(), c.out.c_str(), f), "--out");

  if (!c.peaks_path.empty()) {
    nvdpt_peaks* praw = nullptr;
    check(nvdpt_peaks_read(c.peaks_path.c_str(), &praw), "--peaks " + c.peaks_path);
    const Peaks peaks(praw);
    nvdpt_assignments* araw = nullptr;
    check(nvdpt_assign_peaks(peaks.get(), t.get(), c.window, &araw), "assign");
    const Assignments a(araw);
    const std::string path = c.assignments_path.empty() ? "-" : c.assignments_path;
    if (path == "-" && (c.out.empty() || c.out == "-"))
      throw UsageError{"--assignments must name a file when the spectrum goes to standard output"};
    check(nvdpt_assignments_write(a.get(), path.c_str()), "--assignments");
  }
  return kOk;
}

int cmd_fieldcal(const RunConfig& c) {
  if (!c.n_spins) throw UsageError{"--n-spins is required"};
  require_positive(*c.n_spins, "--n-spins");
  require_positive(c.gamma, "--gamma");
  double db = 0.0;
  if (c.linewidth_mhz) {
    if (c.t_meas || c.t2_star) throw UsageError{"--linewidth cannot be combined with --t-meas/--t2-star"};
    require_positive(*c.linewidth_mhz, "--linewidth");
    check(nvdpt_fieldcal_linewidth(*c.n_spins, *c.linewidth_mhz, c.gamma, &db), "fieldcal");
  } else {
    if (!c.t_meas || !c.t2_star) throw UsageError{"either --linewidth or both --t-meas and --t2-star are required"};
    require_positive(*c.t_meas, "--t-meas");
    require_positive(*c.t2_star, "--t2-star");
    check(nvdpt_fieldcal(*c.n_spins, *c.t_meas, *c.t2_star, c.gamma, &db), "fieldcal");
  }
  std::printf("%.6g\n", db);
  return kOk;
}

void add_system_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--system", c.system_path, "Spin-system JSON file (default: NV with three first-shell 13C)");
  sub->add_flag("--nuclear-zeeman", c.nuclear_zeeman, "Include the nuclear Zeeman term");
}

void add_output_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--out", c.out, "Output path, - for standard output")->capture_default_str();
  sub->add_option("--format", c.format, "csv or json")->capture_default_str();
}

void add_field_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--field", c.field, "Field in G");
  sub->add_option("--from", c.from, "Range start in G");
  sub->add_option("--to", c.to, "Range end in G");
  sub->add_option("--step", c.step, "Range step in G");
}

void add_linewidth_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--bath-field", c.linewidth.bath_field_gauss, "Bath field spread in G")->capture_default_str();
  sub->add_option("--floor", c.linewidth.floor_mhz, "Intrinsic linewidth floor in MHz")->capture_default_str();
  sub->add_option("--reference", c.linewidth.reference_mhz, "Reference linewidth in MHz")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NV-13C spin simulation: levels, transitions, anti-crossings, protected transitions, spectra"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nvdpt_version()));

  RunConfig c;
  nvdpt_linewidth_model_init(&c.linewidth);

  auto* eigen = app.add_subcommand("eigen", "Eigenlevels at one field");
  add_system_flags(eigen, c);
  add_output_flags(eigen, c);
  add_field_flags(eigen, c);

  auto* sweep = app.add_subcommand("sweep", "Tracked eigenlevels over a field range");
  add_system_flags(sweep, c);
  add_output_flags(sweep, c);
  add_field_flags(sweep, c);

  auto* transitions = app.add_subcommand("transitions", "Transition table at one field");
  add_system_flags(transitions, c);
  add_output_flags(transitions, c);
  add_field_flags(transitions, c);
  transitions->add_option("--kappa-min", c.kappa_min, "Keep transitions with kappa above this")->capture_default_str();
  transitions->add_option("--fmin", c.fmin, "Lower frequency bound in MHz");
  transitions->add_option("--fmax", c.fmax, "Upper frequency bound in MHz");
  transitions->add_flag("--tme-squared", c.tme_squared, "Use |TME|^2 in kappa");

  auto* zefoz = app.add_subcommand("zefoz", "Minima of |d nu / dB| over a field range");
  add_system_flags(zefoz, c);
  add_output_flags(zefoz, c);
  add_field_flags(zefoz, c);
  add_linewidth_flags(zefoz, c);
  zefoz->add_option("--kappa-min", c.kappa_min, "Pair filter on kappa")->capture_default_str();
  zefoz->add_option("--refine-tol", c.refine_tol, "Golden-section tolerance in G")->capture_default_str();
  zefoz->add_flag("--observable-only", c.observable_only, "Drop minima whose own kappa is below --kappa-min");
  zefoz->add_flag("--tme-squared", c.tme_squared, "Use |TME|^2 in kappa");

  auto* spectrum = app.add_subcommand("spectrum", "Synthesized CW-ODMR spectrum");
  add_system_flags(spectrum, c);
  add_output_flags(spectrum, c);
  add_field_flags(spectrum, c);
  add_linewidth_flags(spectrum, c);
  spectrum->add_option("--transitions", c.transitions_path, "Transition table to read instead of --field");
  spectrum->add_option("--kappa-min", c.kappa_min, "Lines with kappa below this are dropped")->capture_default_str();
  spectrum->add_option("--fmin", c.fmin, "Axis start in MHz")->capture_default_str();
  spectrum->add_option("--fmax", c.fmax, "Axis end in MHz (default 100)");
  spectrum->add_option("--fstep", c.fstep, "Axis step in MHz")->capture_default_str();
  spectrum->add_flag("--tme-squared", c.tme_squared, "Use |TME|^2 in kappa");
  spectrum->add_option("--peaks", c.peaks_path, "Measured peaks CSV (nu_mhz,fwhm_mhz,amplitude)");
  spectrum->add_option("--window", c.window, "Assignment window in MHz")->capture_default_str();
  spectrum->add_option("--assignments", c.assignments_path, "Assignment JSON output path");

  auto* lac = app.add_subcommand("lac", "Level anti-crossings over a field range");
  add_system_flags(lac, c);
  add_output_flags(lac, c);
  add_field_flags(lac, c);
  lac->add_option("--refine-tol", c.refine_tol, "Golden-section tolerance in G")->capture_default_str();

  auto* fieldcal = app.add_subcommand("fieldcal", "Ensemble field resolution in G");
  fieldcal->add_option("--n-spins", c.n_spins, "Number of spins");
  fieldcal->add_option("--t-meas", c.t_meas, "Measurement time in s");
  fieldcal->add_option("--t2-star", c.t2_star, "Dephasing time in s");
  fieldcal->add_option("--linewidth", c.linewidth_mhz, "Linewidth in MHz; sets t_meas = T2* = 1/linewidth");
  fieldcal->add_option("--gamma", c.gamma, "Gyromagnetic ratio in MHz/G")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*eigen) return cmd_eigen(c);
    if (*sweep) return cmd_sweep(c);
    if (*transitions) return cmd_transitions(c);
    if (*zefoz) return cmd_zefoz(c);
    if (*spectrum) return cmd_spectrum(c);
    if (*lac) return cmd_lac(c);
    if (*fieldcal) return cmd_fieldcal(c);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return kUsage;
  } catch (const ApiError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return exit_code(e.status);
  }
  return kUsage;
}
