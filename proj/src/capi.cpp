#include "nvdpt/nvdpt.h"

#include "nvdpt/error.hpp"
#include "nvdpt/io.hpp"
#include "nvdpt/model.hpp"
#include "nvdpt/spectra.hpp"
#include "nvdpt/sweep.hpp"
#include "nvdpt/transitions.hpp"
#include "nvdpt/zefoz.hpp"

#include <cstdio>
#include <memory>
#include <new>
#include <string>
#include <vector>

struct nvdpt_system {
  nvdpt::SpinSystemSpec spec;
  std::shared_ptr<const nvdpt::SpinSystem> system;
};

struct nvdpt_levels {
  nvdpt::LevelSet levels;
};

struct nvdpt_tracked {
  nvdpt::TrackedSpectrum tracked;
};

struct nvdpt_transitions {
  std::vector<nvdpt::TransitionRecord> records;
};

struct nvdpt_lacs {
  std::vector<nvdpt::LacRecord> records;
};

struct nvdpt_dpts {
  std::vector<nvdpt::DptRecord> records;
};

struct nvdpt_spectrum {
  nvdpt::SpectrumTrace trace;
};

struct nvdpt_peaks {
  std::vector<nvdpt::MeasuredPeak> peaks;
};

struct nvdpt_assignments {
  std::vector<nvdpt::PeakAssignment> assignments;
};

namespace {

thread_local std::string g_last_error;

nvdpt_status to_status(nvdpt::ErrorKind kind) {
  switch (kind) {
    case nvdpt::ErrorKind::InvalidArgument: return NVDPT_ERR_INVALID_ARGUMENT;
    case nvdpt::ErrorKind::Io: return NVDPT_ERR_IO;
    case nvdpt::ErrorKind::Schema: return NVDPT_ERR_SCHEMA;
    case nvdpt::ErrorKind::Numerical: return NVDPT_ERR_NUMERICAL;
    case nvdpt::ErrorKind::Ambiguous: return NVDPT_ERR_AMBIGUOUS;
    case nvdpt::ErrorKind::Degenerate: return NVDPT_ERR_DEGENERATE;
    case nvdpt::ErrorKind::Empty: return NVDPT_ERR_EMPTY;
  }
  return NVDPT_ERR_INTERNAL;
}

nvdpt_status fail(nvdpt_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class F>
nvdpt_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return NVDPT_OK;
  } catch (const nvdpt::Error& e) {
    return fail(to_status(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(NVDPT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NVDPT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NVDPT_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw nvdpt::InvalidArgument(std::string(what) + " must not be null");
}

void require_index(std::size_t k, std::size_t n) {
  if (k >= n)
    throw nvdpt::InvalidArgument("index " + std::to_string(k) + " out of range (size " +
                                 std::to_string(n) + ")");
}

int manifold_code(const nvdpt::Manifold& m) { return m ? *m : NVDPT_MANIFOLD_MIXED; }

nvdpt::Format to_format(nvdpt_format f) {
  switch (f) {
    case NVDPT_FORMAT_CSV: return nvdpt::Format::Csv;
    case NVDPT_FORMAT_JSON: return nvdpt::Format::Json;
  }
  throw nvdpt::InvalidArgument("unknown output format");
}

void emit(const char* path, const std::string& text) {
  if (path == nullptr || std::string(path) == "-" || *path == '\0') {
    if (std::fwrite(text.data(), 1, text.size(), stdout) != text.size() || std::fflush(stdout) != 0)
      throw nvdpt::IoError("error writing to standard output");
    return;
  }
  nvdpt::write_file_atomic(path, text);
}

nvdpt::LinewidthModel to_model(const nvdpt_linewidth_model* m) {
  nvdpt::LinewidthModel out;
  if (m != nullptr) {
    out.bath_field_gauss = m->bath_field_gauss;
    out.floor_mhz = m->floor_mhz;
    out.reference_mhz = m->reference_mhz;
  }
  return out;
}

void rebuild(nvdpt_system& s) { s.system = std::make_shared<const nvdpt::SpinSystem>(s.spec); }

nvdpt_level level_of(const nvdpt::LevelSet& l, int col) {
  const auto i = static_cast<std::size_t>(col);
  return {l.eigen.values[col], l.sz[i], l.kz[i], l.sz2[i], l.slope[i], manifold_code(l.manifold[i])};
}

}  // namespace

extern "C" {

const char* nvdpt_last_error(void) { return g_last_error.c_str(); }

const char* nvdpt_version(void) { return "0.1.0"; }

const char* nvdpt_status_name(nvdpt_status status) {
  switch (status) {
    case NVDPT_OK: return "ok";
    case NVDPT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NVDPT_ERR_IO: return "i/o error";
    case NVDPT_ERR_SCHEMA: return "schema error";
    case NVDPT_ERR_NUMERICAL: return "numerical error";
    case NVDPT_ERR_AMBIGUOUS: return "ambiguous level tracking";
    case NVDPT_ERR_DEGENERATE: return "degenerate level";
    case NVDPT_ERR_EMPTY: return "empty result";
    case NVDPT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

// Spin system

nvdpt_status nvdpt_system_load(const char* path, nvdpt_system** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto s = std::make_unique<nvdpt_system>();
    s->spec = nvdpt::load_system(path);
    rebuild(*s);
    *out = s.release();
  });
}

nvdpt_status nvdpt_system_parse(const char* json_text, nvdpt_system** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    auto s = std::make_unique<nvdpt_system>();
    s->spec = nvdpt::parse_system(json_text);
    rebuild(*s);
    *out = s.release();
  });
}

nvdpt_status nvdpt_system_default(nvdpt_system** out) {
  return guarded([&] {
    require(out, "out");
    auto s = std::make_unique<nvdpt_system>();
    s->spec = nvdpt::nv3c_system();
    rebuild(*s);
    *out = s.release();
  });
}

nvdpt_status nvdpt_system_set_nuclear_zeeman(nvdpt_system* system, int enabled) {
  return guarded([&] {
    require(system, "system");
    system->spec.include_nuclear_zeeman = enabled != 0;
    rebuild(*system);
  });
}

int nvdpt_system_dim(const nvdpt_system* system) {
  return system ? static_cast<int>(system->system->dim()) : 0;
}

void nvdpt_system_free(nvdpt_system* system) { delete system; }

// Levels

nvdpt_status nvdpt_levels_compute(const nvdpt_system* system, double b_gauss, nvdpt_levels** out) {
  return guarded([&] {
    require(system, "system");
    require(out, "out");
    *out = new nvdpt_levels{nvdpt::diagonalize(*system->system, b_gauss)};
  });
}

size_t nvdpt_levels_count(const nvdpt_levels* levels) {
  return levels ? static_cast<size_t>(levels->levels.size()) : 0;
}

nvdpt_status nvdpt_levels_get(const nvdpt_levels* levels, size_t k, nvdpt_level* out) {
  return guarded([&] {
    require(levels, "levels");
    require(out, "out");
    require_index(k, static_cast<std::size_t>(levels->levels.size()));
    *out = level_of(levels->levels, static_cast<int>(k));
  });
}

nvdpt_status nvdpt_levels_write(const nvdpt_levels* levels, const char* path,
                                nvdpt_format format) {
  return guarded([&] {
    require(levels, "levels");
    emit(path, nvdpt::format_levels(levels->levels, to_format(format)));
  });
}

void nvdpt_levels_free(nvdpt_levels* levels) { delete levels; }

// Sweep

nvdpt_status nvdpt_sweep(const nvdpt_system* system, double from_gauss, double to_gauss,
                         double step_gauss, nvdpt_tracked** out) {
  return guarded([&] {
    require(system, "system");
    require(out, "out");
    const nvdpt::FieldGrid grid(from_gauss, to_gauss, step_gauss);
    *out = new nvdpt_tracked{nvdpt::sweep_eigen(system->system, grid)};
  });
}

size_t nvdpt_tracked_points(const nvdpt_tracked* tracked) {
  return tracked ? tracked->tracked.points() : 0;
}

int nvdpt_tracked_levels(const nvdpt_tracked* tracked) {
  return tracked ? tracked->tracked.levels() : 0;
}

double nvdpt_tracked_field(const nvdpt_tracked* tracked, size_t k) {
  if (!tracked || k >= tracked->tracked.points()) return 0.0;
  return tracked->tracked.field(k);
}

nvdpt_status nvdpt_tracked_get(const nvdpt_tracked* tracked, size_t k, int label,
                               nvdpt_level* out) {
  return guarded([&] {
    require(tracked, "tracked");
    require(out, "out");
    const auto& t = tracked->tracked;
    require_index(k, t.points());
    if (label < 0 || label >= t.levels()) throw nvdpt::InvalidArgument("level label out of range");
    const auto& p = t.point(k);
    *out = level_of(p.levels, p.column[static_cast<std::size_t>(label)]);
  });
}

nvdpt_status nvdpt_tracked_write(const nvdpt_tracked* tracked, const char* path,
                                 nvdpt_format format) {
  return guarded([&] {
    require(tracked, "tracked");
    emit(path, nvdpt::format_tracked(tracked->tracked, to_format(format)));
  });
}

void nvdpt_tracked_free(nvdpt_tracked* tracked) { delete tracked; }

// Transitions

void nvdpt_transition_options_init(nvdpt_transition_options* options) {
  if (!options) return;
  const nvdpt::TransitionOptions d;
  *options = {d.kappa_min,
              d.fmin_mhz,
              d.fmax_mhz,
              d.convention.tme_squared ? 1 : 0,
              d.convention.normalize_density ? 1 : 0,
              d.with_curvature ? 1 : 0,
              d.fit_window_gauss,
              d.fit_step_gauss};
}

nvdpt_status nvdpt_transitions_compute(const nvdpt_system* system, double b_gauss,
                                       const nvdpt_transition_options* options,
                                       nvdpt_transitions** out) {
  return guarded([&] {
    require(system, "system");
    require(out, "out");
    nvdpt_transition_options o;
    nvdpt_transition_options_init(&o);
    if (options) o = *options;
    nvdpt::TransitionOptions opts;
    opts.kappa_min = o.kappa_min;
    opts.fmin_mhz = o.fmin_mhz;
    opts.fmax_mhz = o.fmax_mhz;
    opts.convention.tme_squared = o.tme_squared != 0;
    opts.convention.normalize_density = o.normalize_density != 0;
    opts.with_curvature = o.with_curvature != 0;
    opts.fit_window_gauss = o.fit_window_gauss;
    opts.fit_step_gauss = o.fit_step_gauss;
    if (!(opts.kappa_min >= 0.0)) throw nvdpt::InvalidArgument("kappa_min must be non-negative");
    if (!(opts.fmin_mhz <= opts.fmax_mhz)) throw nvdpt::InvalidArgument("fmin must not exceed fmax");
    if (!(opts.fit_window_gauss > 0.0) || !(opts.fit_step_gauss > 0.0))
      throw nvdpt::InvalidArgument("fit window and step must be positive");
    *out = new nvdpt_transitions{nvdpt::enumerate_transitions(system->system, b_gauss, opts)};
  });
}

nvdpt_status nvdpt_transitions_read(const char* path, nvdpt_transitions** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new nvdpt_transitions{nvdpt::parse_transitions(nvdpt::read_text_file(path))};
  });
}

size_t nvdpt_transitions_count(const nvdpt_transitions* transitions) {
  return transitions ? transitions->records.size() : 0;
}

nvdpt_status nvdpt_transitions_get(const nvdpt_transitions* transitions, size_t k,
                                   nvdpt_transition* out) {
  return guarded([&] {
    require(transitions, "transitions");
    require(out, "out");
    require_index(k, transitions->records.size());
    const auto& r = transitions->records[k];
    *out = {r.b_gauss, r.level_i, r.level_f, r.nu_mhz, r.tme, r.d_pop, r.d_sz2, r.kappa,
            r.gamma_eff_khz_per_g, r.curvature_khz_per_g2, manifold_code(r.manifold_i),
            manifold_code(r.manifold_f)};
  });
}

nvdpt_status nvdpt_transitions_write(const nvdpt_transitions* transitions, const char* path,
                                     nvdpt_format format) {
  return guarded([&] {
    require(transitions, "transitions");
    emit(path, nvdpt::format_transitions(transitions->records, to_format(format)));
  });
}

void nvdpt_transitions_free(nvdpt_transitions* transitions) { delete transitions; }

// LACs

nvdpt_status nvdpt_lacs_find(const nvdpt_tracked* tracked, double refine_tol_gauss,
                             nvdpt_lacs** out) {
  return guarded([&] {
    require(tracked, "tracked");
    require(out, "out");
    if (!(refine_tol_gauss > 0.0)) throw nvdpt::InvalidArgument("refine tolerance must be positive");
    nvdpt::LacOptions opts;
    opts.refine_tol = refine_tol_gauss;
    *out = new nvdpt_lacs{nvdpt::find_lacs(tracked->tracked, opts)};
  });
}

size_t nvdpt_lacs_count(const nvdpt_lacs* lacs) { return lacs ? lacs->records.size() : 0; }

nvdpt_status nvdpt_lacs_get(const nvdpt_lacs* lacs, size_t k, nvdpt_lac* out) {
  return guarded([&] {
    require(lacs, "lacs");
    require(out, "out");
    require_index(k, lacs->records.size());
    const auto& r = lacs->records[k];
    *out = {r.b_star, r.min_gap, r.level_a, r.level_b, manifold_code(r.manifold_a),
            manifold_code(r.manifold_b), r.set};
  });
}

nvdpt_status nvdpt_lacs_write(const nvdpt_lacs* lacs, const char* path, nvdpt_format format) {
  return guarded([&] {
    require(lacs, "lacs");
    emit(path, nvdpt::format_lacs(lacs->records, to_format(format)));
  });
}

void nvdpt_lacs_free(nvdpt_lacs* lacs) { delete lacs; }

// Linewidth and DPTs

void nvdpt_linewidth_model_init(nvdpt_linewidth_model* model) {
  if (!model) return;
  const nvdpt::LinewidthModel d;
  *model = {d.bath_field_gauss, d.floor_mhz, d.reference_mhz};
}

nvdpt_status nvdpt_predict_linewidth(double gamma_eff_khz_per_g, double curvature_khz_per_g2,
                                     const nvdpt_linewidth_model* model, double* fwhm_mhz,
                                     double* epsilon) {
  return guarded([&] {
    const auto lw = nvdpt::predict_linewidth(gamma_eff_khz_per_g, curvature_khz_per_g2,
                                             to_model(model));
    if (fwhm_mhz) *fwhm_mhz = lw.fwhm_mhz;
    if (epsilon) *epsilon = lw.epsilon;
  });
}

void nvdpt_dpt_options_init(nvdpt_dpt_options* options) {
  if (!options) return;
  const nvdpt::DptOptions d;
  options->kappa_min = d.kappa_min;
  options->b_min_gauss = d.b_min;
  options->b_max_gauss = d.b_max;
  options->refine_tol_gauss = d.refine_tol;
  options->observable_only = d.observable_only ? 1 : 0;
  options->tme_squared = d.convention.tme_squared ? 1 : 0;
  options->normalize_density = d.convention.normalize_density ? 1 : 0;
  options->fit_window_gauss = d.fit_window_gauss;
  nvdpt_linewidth_model_init(&options->linewidth);
}

nvdpt_status nvdpt_dpts_scan(const nvdpt_tracked* tracked, const nvdpt_dpt_options* options,
                             nvdpt_dpts** out) {
  return guarded([&] {
    require(tracked, "tracked");
    require(out, "out");
    nvdpt_dpt_options o;
    nvdpt_dpt_options_init(&o);
    if (options) o = *options;
    nvdpt::DptOptions opts;
    opts.kappa_min = o.kappa_min;
    opts.b_min = o.b_min_gauss;
    opts.b_max = o.b_max_gauss;
    opts.refine_tol = o.refine_tol_gauss;
    opts.observable_only = o.observable_only != 0;
    opts.convention.tme_squared = o.tme_squared != 0;
    opts.convention.normalize_density = o.normalize_density != 0;
    opts.fit_window_gauss = o.fit_window_gauss;
    opts.linewidth = to_model(&o.linewidth);
    if (!(opts.kappa_min >= 0.0)) throw nvdpt::InvalidArgument("kappa_min must be non-negative");
    if (!(opts.refine_tol > 0.0)) throw nvdpt::InvalidArgument("refine tolerance must be positive");
    *out = new nvdpt_dpts{nvdpt::scan_dpt(tracked->tracked, opts)};
  });
}

size_t nvdpt_dpts_count(const nvdpt_dpts* dpts) { return dpts ? dpts->records.size() : 0; }

nvdpt_status nvdpt_dpts_get(const nvdpt_dpts* dpts, size_t k, nvdpt_dpt* out) {
  return guarded([&] {
    require(dpts, "dpts");
    require(out, "out");
    require_index(k, dpts->records.size());
    const auto& r = dpts->records[k];
    *out = {r.level_i, r.level_f, manifold_code(r.manifold_i), manifold_code(r.manifold_f),
            r.b_opt, r.nu_mhz, r.gamma_eff_khz_per_g, r.curvature_khz_per_g2, r.kappa,
            r.fwhm_mhz, r.epsilon};
  });
}

nvdpt_status nvdpt_dpts_write(const nvdpt_dpts* dpts, const char* path, nvdpt_format format) {
  return guarded([&] {
    require(dpts, "dpts");
    emit(path, nvdpt::format_dpts(dpts->records, to_format(format)));
  });
}

void nvdpt_dpts_free(nvdpt_dpts* dpts) { delete dpts; }

// Spectra

nvdpt_status nvdpt_spectrum_synthesize(const nvdpt_transitions* transitions, double fmin_mhz,
                                       double fmax_mhz, double step_mhz, double kappa_min,
                                       const nvdpt_linewidth_model* model, nvdpt_spectrum** out) {
  return guarded([&] {
    require(transitions, "transitions");
    require(out, "out");
    const nvdpt::SpectrumAxis axis{fmin_mhz, fmax_mhz, step_mhz};
    *out = new nvdpt_spectrum{
        nvdpt::synthesize_spectrum(transitions->records, axis, kappa_min, to_model(model))};
  });
}

size_t nvdpt_spectrum_size(const nvdpt_spectrum* spectrum) {
  return spectrum ? spectrum->trace.freq_mhz.size() : 0;
}

nvdpt_status nvdpt_spectrum_get(const nvdpt_spectrum* spectrum, size_t k, double* freq_mhz,
                                double* intensity) {
  return guarded([&] {
    require(spectrum, "spectrum");
    require_index(k, spectrum->trace.freq_mhz.size());
    if (freq_mhz) *freq_mhz = spectrum->trace.freq_mhz[k];
    if (intensity) *intensity = spectrum->trace.intensity[k];
  });
}

nvdpt_status nvdpt_spectrum_write(const nvdpt_spectrum* spectrum, const char* path,
                                  nvdpt_format format) {
  return guarded([&] {
    require(spectrum, "spectrum");
    emit(path, nvdpt::format_spectrum(spectrum->trace, to_format(format)));
  });
}

void nvdpt_spectrum_free(nvdpt_spectrum* spectrum) { delete spectrum; }

nvdpt_status nvdpt_peaks_read(const char* path, nvdpt_peaks** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new nvdpt_peaks{nvdpt::parse_peaks_csv(nvdpt::read_text_file(path))};
  });
}

size_t nvdpt_peaks_count(const nvdpt_peaks* peaks) { return peaks ? peaks->peaks.size() : 0; }

void nvdpt_peaks_free(nvdpt_peaks* peaks) { delete peaks; }

nvdpt_status nvdpt_assign_peaks(const nvdpt_peaks* peaks, const nvdpt_transitions* transitions,
                                double window_mhz, nvdpt_assignments** out) {
  return guarded([&] {
    require(peaks, "peaks");
    require(transitions, "transitions");
    require(out, "out");
    *out = new nvdpt_assignments{
        nvdpt::assign_peaks(peaks->peaks, transitions->records, window_mhz)};
  });
}

size_t nvdpt_assignments_count(const nvdpt_assignments* assignments) {
  return assignments ? assignments->assignments.size() : 0;
}

nvdpt_status nvdpt_assignments_get(const nvdpt_assignments* assignments, size_t k,
                                   nvdpt_assignment* out) {
  return guarded([&] {
    require(assignments, "assignments");
    require(out, "out");
    require_index(k, assignments->assignments.size());
    const auto& a = assignments->assignments[k];
    *out = {a.peak.nu_mhz, a.peak.fwhm_mhz, a.peak.amplitude, a.assigned() ? 1 : 0, a.level_i,
            a.level_f, a.nu_mhz, a.distance_mhz, a.kappa};
  });
}

nvdpt_status nvdpt_assignments_write(const nvdpt_assignments* assignments, const char* path) {
  return guarded([&] {
    require(assignments, "assignments");
    emit(path, nvdpt::format_assignments(assignments->assignments));
  });
}

void nvdpt_assignments_free(nvdpt_assignments* assignments) { delete assignments; }

// Field calibration

nvdpt_status nvdpt_fieldcal(double n_spins, double t_meas_s, double t2_star_s,
                            double gamma_mhz_per_g, double* out_gauss) {
  return guarded([&] {
    require(out_gauss, "out_gauss");
    *out_gauss = nvdpt::field_resolution(n_spins, t_meas_s, t2_star_s, gamma_mhz_per_g);
  });
}

nvdpt_status nvdpt_fieldcal_linewidth(double n_spins, double linewidth_mhz,
                                      double gamma_mhz_per_g, double* out_gauss) {
  return guarded([&] {
    require(out_gauss, "out_gauss");
    *out_gauss = nvdpt::field_resolution_from_linewidth(n_spins, linewidth_mhz, gamma_mhz_per_g);
  });
}

}  // extern "C"
