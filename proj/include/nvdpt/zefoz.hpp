#pragma once

#include "nvdpt/transitions.hpp"

#include <span>
#include <vector>

namespace nvdpt {

// First-order inhomogeneous broadening by a static axial bath field.
struct LinewidthModel {
  // Chosen so that a 2.8 MHz/G electron-type line reproduces the reference width.
  double bath_field_gauss = 65.19 / 2.8;
  double floor_mhz = 0.5;
  double reference_mhz = 65.19;
};

void validate(const LinewidthModel& model);

struct LinewidthPrediction {
  double fwhm_mhz = 0.0;
  double epsilon = 0.0;  // reference / fwhm
};

// fwhm = sqrt((|g| dB)^2 + (|C| dB^2 / 2)^2 + w0^2) with g, C converted to MHz units.
LinewidthPrediction predict_linewidth(double gamma_eff_khz_per_g, double curvature_khz_per_g2,
                                      const LinewidthModel& model = {});

struct ObservedLine {
  double nu_mhz = 0.0;
  double fwhm_mhz = 0.0;
};

// reference / fwhm per line. Throws InvalidArgument for a non-positive width.
std::vector<double> epsilon_table(std::span<const ObservedLine> observed,
                                  const LinewidthModel& model = {});

// Ensemble field resolution dB = 1 / (gamma sqrt(N t_meas T2*)) in G, gamma in MHz/G.
double field_resolution(double n_spins, double t_meas_s, double t2_star_s, double gamma_mhz_per_g);

// Same with t_meas = T2* = 1 / linewidth.
double field_resolution_from_linewidth(double n_spins, double linewidth_mhz,
                                       double gamma_mhz_per_g);

struct DptRecord {
  int level_i = 0;  // trajectory labels, i lower in energy at b_opt
  int level_f = 0;
  Manifold manifold_i, manifold_f;
  double b_opt = 0.0;
  double nu_mhz = 0.0;
  double gamma_eff_khz_per_g = 0.0;
  double curvature_khz_per_g2 = 0.0;
  double kappa = 0.0;
  double fwhm_mhz = 0.0;
  double epsilon = 0.0;
};

struct DptOptions {
  double kappa_min = 1e-6;
  // Search range; defaults to the whole tracked range when b_min >= b_max.
  double b_min = 0.0;
  double b_max = 0.0;
  double refine_tol = 0.01;
  // Also require kappa >= kappa_min at the optimum itself.
  bool observable_only = false;
  KappaConvention convention;
  double fit_window_gauss = 20.0;
  LinewidthModel linewidth;
};

// Hellmann-Feynman d(E_b - E_a)/dB in kHz/G for trajectories a, b at an arbitrary field,
// identified by overlap with the grid point nearest to b_gauss.
double tracked_pair_slope(const TrackedSpectrum& tracked, int label_a, int label_b, double b_gauss);

// Local minima of |gamma_eff(B)| per trajectory pair whose kappa reaches kappa_min
// somewhere in range, refined by golden-section search. Sorted by |gamma_eff|, then labels.
// Throws EmptyResult when no pair passes the kappa filter.
std::vector<DptRecord> scan_dpt(const TrackedSpectrum& tracked, const DptOptions& options = {});

}  // namespace nvdpt
