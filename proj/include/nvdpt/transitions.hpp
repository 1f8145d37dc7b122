#pragma once

#include "nvdpt/sweep.hpp"

#include <memory>
#include <vector>

namespace nvdpt {

// Optical-pumping density matrix: m_S = 0 projector on the electron, identity on the nuclei.
struct PumpedDensity {
  ComplexMatrix rho;
};

// Conventions that only rescale kappa. The defaults are the calibrated ones.
struct KappaConvention {
  bool tme_squared = false;
  bool normalize_density = true;  // unit-trace rho
};

// Throws InvalidArgument unless the electron spin is 1.
PumpedDensity pumped_density(const SpinSystem& system, bool normalize = true);

// |<f| gamma_e (Sx+Sy+Sz) + sum_n gamma_n (Inx+Iny+Inz) |i>|, MHz/G.
double transition_matrix_element(const SpinSystem& system, const ComplexVector& f,
                                  const ComplexVector& i);

struct TransitionIntensity {
  double tme = 0.0;
  double d_pop = 0.0;  // <f|rho|f> - <i|rho|i>
  double d_sz2 = 0.0;  // <f|Sz^2|f> - <i|Sz^2|i>
  double kappa = 0.0;  // tme^(1 or 2) * |d_pop| * |d_sz2|
};

TransitionIntensity transition_intensity(const SpinSystem& system, const ComplexVector& f,
                                         const ComplexVector& i, const PumpedDensity& rho,
                                         bool tme_squared = false);

// All-pairs intensities for one diagonalization; entry (i, f) for every i != f.
class PairIntensities {
 public:
  PairIntensities(const SpinSystem& system, const LevelSet& levels, const PumpedDensity& rho,
                  bool tme_squared);
  TransitionIntensity operator()(int i, int f) const;

 private:
  Eigen::MatrixXd tme_;
  std::vector<double> pop_, sz2_;
  bool squared_;
};

// Hellmann-Feynman slope of E_f - E_i in kHz/G. Throws DegeneracyError when either level
// is within 1e-6 MHz of a neighbour.
double gamma_eff_hellmann_feynman(const LevelSet& levels, int i, int f);

struct TransitionCurve {
  double nu_mhz = 0.0;
  double gamma_eff_khz_per_g = 0.0;
  double curvature_khz_per_g2 = 0.0;
};

// Quadratic least-squares fit of nu(B) = E_hi - E_lo over the grid points within window/2
// of b; lo/hi are ordered by energy at the grid point nearest b. Throws InvalidArgument
// when the window leaves the tracked range or holds fewer than 5 points.
TransitionCurve transition_curve(const TrackedSpectrum& tracked, int level_a, int level_b,
                                 double b_gauss, double window_gauss);

struct TransitionRecord {
  double b_gauss = 0.0;
  int level_i = 0;  // lower energy
  int level_f = 0;  // higher energy
  double nu_mhz = 0.0;
  double tme = 0.0;
  double d_pop = 0.0;
  double d_sz2 = 0.0;
  double kappa = 0.0;
  double gamma_eff_khz_per_g = 0.0;
  double curvature_khz_per_g2 = 0.0;  // NaN when no fit window fits
  Manifold manifold_i, manifold_f;
};

struct TransitionOptions {
  double kappa_min = 0.0;  // keep kappa > kappa_min; 0 keeps all pairs
  double fmin_mhz = 0.0;
  double fmax_mhz = 1e12;
  KappaConvention convention;
  bool with_curvature = true;
  double fit_window_gauss = 20.0;
  double fit_step_gauss = 0.5;
};

// Every level pair at one field, ordered by (level_i, level_f). Level labels are the
// ascending-energy ranks at b.
std::vector<TransitionRecord> enumerate_transitions(std::shared_ptr<const SpinSystem> system,
                                                    double b_gauss,
                                                    const TransitionOptions& options = {});

}  // namespace nvdpt
