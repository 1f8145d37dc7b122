#include "nvdpt/spectra.hpp"

#include "nvdpt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nvdpt {

std::size_t SpectrumAxis::size() const {
  return static_cast<std::size_t>(std::floor((fmax_mhz - fmin_mhz) / step_mhz + 1e-9)) + 1;
}

void validate(const SpectrumAxis& axis) {
  if (!std::isfinite(axis.fmin_mhz) || !std::isfinite(axis.fmax_mhz) || !std::isfinite(axis.step_mhz))
    throw InvalidArgument("spectrum axis must be finite");
  if (!(axis.step_mhz > 0.0)) throw InvalidArgument("spectrum axis step must be positive");
  if (!(axis.fmin_mhz < axis.fmax_mhz)) throw InvalidArgument("spectrum axis requires fmin < fmax");
}

std::vector<double> synthesize_lines(std::span<const SpectralLine> lines, const SpectrumAxis& axis) {
  validate(axis);
  const double to_sigma = 1.0 / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  std::vector<double> out(axis.size(), 0.0);
  for (const auto& line : lines) {
    if (!std::isfinite(line.nu_mhz)) throw InvalidArgument("spectral line frequency is not finite");
    if (!(line.fwhm_mhz > 0.0)) throw InvalidArgument("spectral line width must be positive");
    const double sigma = line.fwhm_mhz * to_sigma;
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double d = (axis.at(k) - line.nu_mhz) / sigma;
      out[k] += std::abs(line.amplitude) * std::exp(-0.5 * d * d);
    }
  }
  return out;
}

std::vector<SpectralLine> lines_from_records(std::span<const TransitionRecord> records,
                                             double kappa_min, const LinewidthModel& model) {
  std::vector<SpectralLine> out;
  for (const auto& r : records) {
    if (r.kappa < kappa_min) continue;
    const LinewidthPrediction lw =
        predict_linewidth(r.gamma_eff_khz_per_g, r.curvature_khz_per_g2, model);
    out.push_back({r.nu_mhz, lw.fwhm_mhz, r.kappa});
  }
  return out;
}

SpectrumTrace synthesize_spectrum(std::span<const TransitionRecord> records,
                                  const SpectrumAxis& axis, double kappa_min,
                                  const LinewidthModel& model) {
  validate(axis);
  SpectrumTrace out;
  out.kappa_min = kappa_min;
  out.model = model;
  out.b_gauss = records.empty() ? 0.0 : records.front().b_gauss;
  const std::vector<SpectralLine> lines = lines_from_records(records, kappa_min, model);
  out.intensity = synthesize_lines(lines, axis);
  out.freq_mhz.resize(out.intensity.size());
  for (std::size_t k = 0; k < out.freq_mhz.size(); ++k) out.freq_mhz[k] = axis.at(k);
  return out;
}

std::vector<PeakAssignment> assign_peaks(std::span<const MeasuredPeak> measured,
                                         std::span<const TransitionRecord> predicted,
                                         double window_mhz) {
  if (!(window_mhz > 0.0)) throw InvalidArgument("assignment window must be positive");

  std::vector<std::size_t> order(measured.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return measured[a].amplitude > measured[b].amplitude;
  });

  // Ties on score go to the smaller distance, then to the lower pair labels, so the
  // result does not depend on the order of the predicted list.
  auto better = [](const TransitionRecord& x, double sx, const TransitionRecord& y, double sy,
                   double dx, double dy) {
    if (sx != sy) return sx > sy;
    if (dx != dy) return dx < dy;
    if (x.level_i != y.level_i) return x.level_i < y.level_i;
    if (x.level_f != y.level_f) return x.level_f < y.level_f;
    return x.nu_mhz < y.nu_mhz;
  };

  std::vector<bool> used(predicted.size(), false);
  std::vector<PeakAssignment> out(measured.size());
  for (std::size_t idx : order) {
    PeakAssignment& a = out[idx];
    a.peak = measured[idx];
    std::optional<std::size_t> best;
    double best_score = 0.0, best_dist = 0.0;
    for (std::size_t r = 0; r < predicted.size(); ++r) {
      if (used[r]) continue;
      const double d = std::abs(predicted[r].nu_mhz - a.peak.nu_mhz);
      if (!(d <= window_mhz)) continue;
      const double score = predicted[r].kappa / (1.0 + d);
      if (!best || better(predicted[r], score, predicted[*best], best_score, d, best_dist)) {
        best = r;
        best_score = score;
        best_dist = d;
      }
    }
    if (!best) continue;
    used[*best] = true;
    const TransitionRecord& rec = predicted[*best];
    a.record = best;
    a.level_i = rec.level_i;
    a.level_f = rec.level_f;
    a.nu_mhz = rec.nu_mhz;
    a.distance_mhz = best_dist;
    a.kappa = rec.kappa;
    a.gamma_eff_khz_per_g = rec.gamma_eff_khz_per_g;
  }
  return out;
}

}  // namespace nvdpt
