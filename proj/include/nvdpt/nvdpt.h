/* C interface to the NV spin simulation engine. All handles are opaque and owned by the
 * caller; free them with the matching *_free function. Functions returning nvdpt_status
 * leave a message retrievable with nvdpt_last_error() on failure. Writers take "-" or NULL
 * as the path for standard output. */
#ifndef NVDPT_H
#define NVDPT_H

#include <stddef.h>

#if defined(NVDPT_BUILDING)
#define NVDPT_API __attribute__((visibility("default")))
#else
#define NVDPT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nvdpt_status {
  NVDPT_OK = 0,
  NVDPT_ERR_INVALID_ARGUMENT = 1,
  NVDPT_ERR_IO = 2,
  NVDPT_ERR_SCHEMA = 3,
  NVDPT_ERR_NUMERICAL = 4,
  NVDPT_ERR_AMBIGUOUS = 5,
  NVDPT_ERR_DEGENERATE = 6,
  NVDPT_ERR_EMPTY = 7,
  NVDPT_ERR_INTERNAL = 8
} nvdpt_status;

typedef enum nvdpt_format { NVDPT_FORMAT_CSV = 0, NVDPT_FORMAT_JSON = 1 } nvdpt_format;

/* Manifold value of a state that is not settled in a single m_S manifold. */
#define NVDPT_MANIFOLD_MIXED 99

typedef struct nvdpt_system nvdpt_system;
typedef struct nvdpt_levels nvdpt_levels;
typedef struct nvdpt_tracked nvdpt_tracked;
typedef struct nvdpt_transitions nvdpt_transitions;
typedef struct nvdpt_lacs nvdpt_lacs;
typedef struct nvdpt_dpts nvdpt_dpts;
typedef struct nvdpt_spectrum nvdpt_spectrum;
typedef struct nvdpt_peaks nvdpt_peaks;
typedef struct nvdpt_assignments nvdpt_assignments;

/* Message of the last failed call on this thread; empty when none. */
NVDPT_API const char* nvdpt_last_error(void);
NVDPT_API const char* nvdpt_version(void);
NVDPT_API const char* nvdpt_status_name(nvdpt_status status);

/* Spin system */

NVDPT_API nvdpt_status nvdpt_system_load(const char* path, nvdpt_system** out);
NVDPT_API nvdpt_status nvdpt_system_parse(const char* json_text, nvdpt_system** out);
/* NV with the three first-shell 13C nuclei and default parameters. */
NVDPT_API nvdpt_status nvdpt_system_default(nvdpt_system** out);
NVDPT_API nvdpt_status nvdpt_system_set_nuclear_zeeman(nvdpt_system* system, int enabled);
NVDPT_API int nvdpt_system_dim(const nvdpt_system* system);
NVDPT_API void nvdpt_system_free(nvdpt_system* system);

/* Eigenlevels at one field */

typedef struct nvdpt_level {
  double energy_mhz;
  double sz_expect;
  double kz_expect;
  double sz2_expect;
  double slope_mhz_per_g;
  int manifold;
} nvdpt_level;

NVDPT_API nvdpt_status nvdpt_levels_compute(const nvdpt_system* system, double b_gauss,
                                            nvdpt_levels** out);
NVDPT_API size_t nvdpt_levels_count(const nvdpt_levels* levels);
NVDPT_API nvdpt_status nvdpt_levels_get(const nvdpt_levels* levels, size_t k, nvdpt_level* out);
NVDPT_API nvdpt_status nvdpt_levels_write(const nvdpt_levels* levels, const char* path,
                                          nvdpt_format format);
NVDPT_API void nvdpt_levels_free(nvdpt_levels* levels);

/* Tracked sweep. A start of exactly 0 G is moved to 0.1 G. */

NVDPT_API nvdpt_status nvdpt_sweep(const nvdpt_system* system, double from_gauss,
                                   double to_gauss, double step_gauss, nvdpt_tracked** out);
NVDPT_API size_t nvdpt_tracked_points(const nvdpt_tracked* tracked);
NVDPT_API int nvdpt_tracked_levels(const nvdpt_tracked* tracked);
NVDPT_API double nvdpt_tracked_field(const nvdpt_tracked* tracked, size_t k);
NVDPT_API nvdpt_status nvdpt_tracked_get(const nvdpt_tracked* tracked, size_t k, int label,
                                         nvdpt_level* out);
NVDPT_API nvdpt_status nvdpt_tracked_write(const nvdpt_tracked* tracked, const char* path,
                                           nvdpt_format format);
NVDPT_API void nvdpt_tracked_free(nvdpt_tracked* tracked);

/* Transitions */

typedef struct nvdpt_transition_options {
  double kappa_min; /* keep kappa > kappa_min; 0 keeps every pair */
  double fmin_mhz;
  double fmax_mhz;
  int tme_squared;
  int normalize_density;
  int with_curvature;
  double fit_window_gauss;
  double fit_step_gauss;
} nvdpt_transition_options;

typedef struct nvdpt_transition {
  double b_gauss;
  int level_i;
  int level_f;
  double nu_mhz;
  double tme;
  double d_pop;
  double d_sz2;
  double kappa;
  double gamma_eff_khz_per_g;
  double curvature_khz_per_g2;
  int manifold_i;
  int manifold_f;
} nvdpt_transition;

NVDPT_API void nvdpt_transition_options_init(nvdpt_transition_options* options);
NVDPT_API nvdpt_status nvdpt_transitions_compute(const nvdpt_system* system, double b_gauss,
                                                 const nvdpt_transition_options* options,
                                                 nvdpt_transitions** out);
/* Reads a table written by nvdpt_transitions_write (CSV or JSON). */
NVDPT_API nvdpt_status nvdpt_transitions_read(const char* path, nvdpt_transitions** out);
NVDPT_API size_t nvdpt_transitions_count(const nvdpt_transitions* transitions);
NVDPT_API nvdpt_status nvdpt_transitions_get(const nvdpt_transitions* transitions, size_t k,
                                             nvdpt_transition* out);
NVDPT_API nvdpt_status nvdpt_transitions_write(const nvdpt_transitions* transitions,
                                               const char* path, nvdpt_format format);
NVDPT_API void nvdpt_transitions_free(nvdpt_transitions* transitions);

/* Level anti-crossings */

typedef struct nvdpt_lac {
  double b_star_gauss;
  double min_gap_mhz;
  int level_a;
  int level_b;
  int manifold_a;
  int manifold_b;
  int set;
} nvdpt_lac;

NVDPT_API nvdpt_status nvdpt_lacs_find(const nvdpt_tracked* tracked, double refine_tol_gauss,
                                       nvdpt_lacs** out);
NVDPT_API size_t nvdpt_lacs_count(const nvdpt_lacs* lacs);
NVDPT_API nvdpt_status nvdpt_lacs_get(const nvdpt_lacs* lacs, size_t k, nvdpt_lac* out);
NVDPT_API nvdpt_status nvdpt_lacs_write(const nvdpt_lacs* lacs, const char* path,
                                        nvdpt_format format);
NVDPT_API void nvdpt_lacs_free(nvdpt_lacs* lacs);

/* Linewidth model and decoherence-protected transitions */

typedef struct nvdpt_linewidth_model {
  double bath_field_gauss;
  double floor_mhz;
  double reference_mhz;
} nvdpt_linewidth_model;

typedef struct nvdpt_dpt_options {
  double kappa_min;
  double b_min_gauss; /* whole tracked range when b_min >= b_max */
  double b_max_gauss;
  double refine_tol_gauss;
  int observable_only;
  int tme_squared;
  int normalize_density;
  double fit_window_gauss;
  nvdpt_linewidth_model linewidth;
} nvdpt_dpt_options;

typedef struct nvdpt_dpt {
  int level_i;
  int level_f;
  int manifold_i;
  int manifold_f;
  double b_opt_gauss;
  double nu_mhz;
  double gamma_eff_khz_per_g;
  double curvature_khz_per_g2;
  double kappa;
  double fwhm_mhz;
  double epsilon;
} nvdpt_dpt;

NVDPT_API void nvdpt_linewidth_model_init(nvdpt_linewidth_model* model);
NVDPT_API nvdpt_status nvdpt_predict_linewidth(double gamma_eff_khz_per_g,
                                               double curvature_khz_per_g2,
                                               const nvdpt_linewidth_model* model,
                                               double* fwhm_mhz, double* epsilon);
NVDPT_API void nvdpt_dpt_options_init(nvdpt_dpt_options* options);
NVDPT_API nvdpt_status nvdpt_dpts_scan(const nvdpt_tracked* tracked,
                                       const nvdpt_dpt_options* options, nvdpt_dpts** out);
NVDPT_API size_t nvdpt_dpts_count(const nvdpt_dpts* dpts);
NVDPT_API nvdpt_status nvdpt_dpts_get(const nvdpt_dpts* dpts, size_t k, nvdpt_dpt* out);
NVDPT_API nvdpt_status nvdpt_dpts_write(const nvdpt_dpts* dpts, const char* path,
                                        nvdpt_format format);
NVDPT_API void nvdpt_dpts_free(nvdpt_dpts* dpts);

/* Spectra and peak assignment */

NVDPT_API nvdpt_status nvdpt_spectrum_synthesize(const nvdpt_transitions* transitions,
                                                 double fmin_mhz, double fmax_mhz,
                                                 double step_mhz, double kappa_min,
                                                 const nvdpt_linewidth_model* model,
                                                 nvdpt_spectrum** out);
NVDPT_API size_t nvdpt_spectrum_size(const nvdpt_spectrum* spectrum);
NVDPT_API nvdpt_status nvdpt_spectrum_get(const nvdpt_spectrum* spectrum, size_t k,
                                          double* freq_mhz, double* intensity);
NVDPT_API nvdpt_status nvdpt_spectrum_write(const nvdpt_spectrum* spectrum, const char* path,
                                            nvdpt_format format);
NVDPT_API void nvdpt_spectrum_free(nvdpt_spectrum* spectrum);

/* Measured peaks: CSV with columns nu_mhz, fwhm_mhz, amplitude. */
NVDPT_API nvdpt_status nvdpt_peaks_read(const char* path, nvdpt_peaks** out);
NVDPT_API size_t nvdpt_peaks_count(const nvdpt_peaks* peaks);
NVDPT_API void nvdpt_peaks_free(nvdpt_peaks* peaks);

typedef struct nvdpt_assignment {
  double nu_mhz;
  double fwhm_mhz;
  double amplitude;
  int assigned;
  int level_i;
  int level_f;
  double predicted_nu_mhz;
  double distance_mhz;
  double kappa;
} nvdpt_assignment;

NVDPT_API nvdpt_status nvdpt_assign_peaks(const nvdpt_peaks* peaks,
                                          const nvdpt_transitions* transitions, double window_mhz,
                                          nvdpt_assignments** out);
NVDPT_API size_t nvdpt_assignments_count(const nvdpt_assignments* assignments);
NVDPT_API nvdpt_status nvdpt_assignments_get(const nvdpt_assignments* assignments, size_t k,
                                             nvdpt_assignment* out);
/* Always JSON. */
NVDPT_API nvdpt_status nvdpt_assignments_write(const nvdpt_assignments* assignments,
                                               const char* path);
NVDPT_API void nvdpt_assignments_free(nvdpt_assignments* assignments);

/* Field calibration, result in G. */

NVDPT_API nvdpt_status nvdpt_fieldcal(double n_spins, double t_meas_s, double t2_star_s,
                                      double gamma_mhz_per_g, double* out_gauss);
NVDPT_API nvdpt_status nvdpt_fieldcal_linewidth(double n_spins, double linewidth_mhz,
                                                double gamma_mhz_per_g, double* out_gauss);

#ifdef __cplusplus
}
#endif

#endif
