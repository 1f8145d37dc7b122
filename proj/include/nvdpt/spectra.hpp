#pragma once

#include "nvdpt/transitions.hpp"
#include "nvdpt/zefoz.hpp"

#include <optional>
#include <span>
#include <vector>

namespace nvdpt {

// Uniform frequency axis fmin, fmin + step, ... up to fmax inclusive.
struct SpectrumAxis {
  double fmin_mhz = 0.0;
  double fmax_mhz = 100.0;
  double step_mhz = 0.01;

  std::size_t size() const;
  double at(std::size_t k) const { return fmin_mhz + static_cast<double>(k) * step_mhz; }
};

void validate(const SpectrumAxis& axis);

struct SpectralLine {
  double nu_mhz = 0.0;
  double fwhm_mhz = 0.0;
  double amplitude = 0.0;
};

struct SpectrumTrace {
  std::vector<double> freq_mhz;
  std::vector<double> intensity;
  double b_gauss = 0.0;
  double kappa_min = 0.0;
  LinewidthModel model;
};

// Sum of Gaussians with sigma = fwhm / (2 sqrt(2 ln 2)) and peak height = amplitude.
std::vector<double> synthesize_lines(std::span<const SpectralLine> lines, const SpectrumAxis& axis);

// One line per record with kappa >= kappa_min; width from predict_linewidth.
std::vector<SpectralLine> lines_from_records(std::span<const TransitionRecord> records,
                                             double kappa_min, const LinewidthModel& model);

SpectrumTrace synthesize_spectrum(std::span<const TransitionRecord> records,
                                  const SpectrumAxis& axis, double kappa_min = 1e-6,
                                  const LinewidthModel& model = {});

struct MeasuredPeak {
  double nu_mhz = 0.0;
  double fwhm_mhz = 0.0;
  double amplitude = 0.0;
};

struct PeakAssignment {
  MeasuredPeak peak;
  std::optional<std::size_t> record;  // index into the predicted list
  int level_i = -1;
  int level_f = -1;
  double nu_mhz = 0.0;
  double distance_mhz = 0.0;
  double kappa = 0.0;
  double gamma_eff_khz_per_g = 0.0;

  bool assigned() const { return record.has_value(); }
};

// Greedy in descending measured amplitude; each peak takes the unused prediction within
// the window maximizing kappa / (1 + |distance|). Output follows the measured order.
std::vector<PeakAssignment> assign_peaks(std::span<const MeasuredPeak> measured,
                                         std::span<const TransitionRecord> predicted,
                                         double window_mhz = 5.0);

}  // namespace nvdpt
