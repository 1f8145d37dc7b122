#include "nvdpt/error.hpp"
#include "nvdpt/spectra.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

using namespace nvdpt;

namespace {

TransitionRecord record(int i, int f, double nu, double kappa) {
  TransitionRecord r;
  r.level_i = i;
  r.level_f = f;
  r.nu_mhz = nu;
  r.kappa = kappa;
  return r;
}

}  // namespace

TEST_CASE("empty record list gives a zero trace") {
  const SpectrumTrace t = synthesize_spectrum({}, SpectrumAxis{0.0, 10.0, 0.5});
  CHECK(t.freq_mhz.size() == 21);
  CHECK(std::all_of(t.intensity.begin(), t.intensity.end(), [](double x) { return x == 0.0; }));
  CHECK(t.freq_mhz.back() == 10.0);
}

TEST_CASE("single line: peak position and width") {
  const SpectrumAxis axis{20.0, 35.0, 0.001};
  const std::array<SpectralLine, 1> line = {{{27.25, 0.53, 1.0}}};
  const std::vector<double> y = synthesize_lines(line, axis);
  const auto peak = std::max_element(y.begin(), y.end());
  const auto k = static_cast<std::size_t>(peak - y.begin());
  CHECK(std::abs(axis.at(k) - 27.25) <= axis.step_mhz);
  CHECK(*peak == doctest::Approx(1.0).epsilon(1e-6));
  // Half-maximum crossings.
  std::size_t lo = k, hi = k;
  while (lo > 0 && y[lo] >= 0.5) --lo;
  while (hi + 1 < y.size() && y[hi] >= 0.5) ++hi;
  const double fwhm = axis.at(hi) - axis.at(lo);
  CHECK(std::abs(fwhm - 0.53) <= 2 * axis.step_mhz);
}

TEST_CASE("line integral") {
  const SpectrumAxis axis{0.0, 100.0, 0.01};
  const double kappa = 3e-5, fwhm = 2.8;
  const std::array<SpectralLine, 1> line = {{{50.0, fwhm, kappa}}};
  const std::vector<double> y = synthesize_lines(line, axis);
  double integral = 0.0;
  for (double v : y) integral += v * axis.step_mhz;
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  CHECK(integral == doctest::Approx(kappa * sigma * std::sqrt(2.0 * std::numbers::pi)).epsilon(0.01));
}

TEST_CASE("linearity") {
  const SpectrumAxis axis{0.0, 60.0, 0.05};
  const std::array<SpectralLine, 1> a = {{{15.0, 1.0, 2.0}}};
  const std::array<SpectralLine, 1> b = {{{45.0, 3.0, 0.5}}};
  const std::array<SpectralLine, 2> ab = {{a[0], b[0]}};
  const auto ya = synthesize_lines(a, axis), yb = synthesize_lines(b, axis),
             yab = synthesize_lines(ab, axis);
  for (std::size_t k = 0; k < yab.size(); ++k) CHECK(yab[k] == doctest::Approx(ya[k] + yb[k]));
}

TEST_CASE("kappa threshold and axis validation") {
  std::vector<TransitionRecord> records = {record(0, 1, 10.0, 1e-7), record(0, 2, 20.0, 1e-3)};
  records[1].gamma_eff_khz_per_g = 10.0;
  records[1].curvature_khz_per_g2 = 0.5;
  const auto lines = lines_from_records(records, 1e-6, LinewidthModel{});
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].nu_mhz == 20.0);
  CHECK(lines[0].fwhm_mhz == predict_linewidth(10.0, 0.5).fwhm_mhz);
  CHECK_THROWS_AS(synthesize_spectrum(records, SpectrumAxis{5.0, 5.0, 0.1}), InvalidArgument);
  CHECK_THROWS_AS(synthesize_spectrum(records, SpectrumAxis{0.0, 5.0, 0.0}), InvalidArgument);
  records[1].nu_mhz = NAN;
  CHECK_THROWS_AS(synthesize_spectrum(records, SpectrumAxis{0.0, 5.0, 0.1}), InvalidArgument);
}

TEST_CASE("assign_peaks: exact and scoring rules") {
  const std::vector<TransitionRecord> predicted = {record(0, 3, 22.0, 1e-4), record(1, 4, 30.0, 1e-4),
                                                  record(2, 5, 31.0, 1e-6), record(3, 6, 29.0, 1e-4)};
  const std::array<MeasuredPeak, 1> exact = {{{22.0, 1.0, 1.0}}};
  const auto a = assign_peaks(exact, predicted, 5.0);
  REQUIRE(a[0].assigned());
  CHECK(a[0].distance_mhz == 0.0);
  CHECK(a[0].level_i == 0);
  CHECK(a[0].level_f == 3);

  // Equal distance, kappa ratio 100:1.
  const std::array<MeasuredPeak, 1> mid = {{{30.0, 1.0, 1.0}}};
  const std::vector<TransitionRecord> two = {record(2, 5, 31.0, 1e-6), record(1, 4, 29.0, 1e-4)};
  const auto b = assign_peaks(mid, two, 5.0);
  REQUIRE(b[0].assigned());
  CHECK(b[0].level_i == 1);

  // No reuse: the larger peak takes the best line first.
  const std::array<MeasuredPeak, 2> pair = {{{30.0, 1.0, 0.2}, {30.1, 1.0, 0.9}}};
  const auto c = assign_peaks(pair, two, 5.0);
  CHECK(c[1].level_i == 1);
  CHECK(c[0].level_i == 2);

  // Out of window.
  const std::array<MeasuredPeak, 1> far = {{{100.0, 1.0, 1.0}}};
  CHECK_FALSE(assign_peaks(far, predicted, 5.0)[0].assigned());
  CHECK_THROWS_AS(assign_peaks(far, predicted, 0.0), InvalidArgument);
}

TEST_CASE("assign_peaks is stable under permutation of predictions") {
  std::vector<TransitionRecord> predicted = {record(0, 3, 22.0, 1e-4), record(1, 4, 30.0, 1e-4),
                                             record(2, 5, 31.0, 1e-6), record(3, 6, 29.0, 1e-4),
                                             record(4, 7, 29.0, 1e-4)};
  const std::array<MeasuredPeak, 3> peaks = {{{29.0, 1.0, 1.0}, {22.5, 1.0, 0.5}, {31.0, 1.0, 0.1}}};
  const auto ref = assign_peaks(peaks, predicted, 5.0);
  std::sort(predicted.begin(), predicted.end(),
            [](const auto& x, const auto& y) { return x.level_i < y.level_i; });
  do {
    const auto got = assign_peaks(peaks, predicted, 5.0);
    for (std::size_t k = 0; k < peaks.size(); ++k) {
      CHECK(got[k].level_i == ref[k].level_i);
      CHECK(got[k].level_f == ref[k].level_f);
      CHECK(got[k].distance_mhz == ref[k].distance_mhz);
    }
  } while (std::next_permutation(predicted.begin(), predicted.end(),
                                 [](const auto& x, const auto& y) { return x.level_i < y.level_i; }));
}

TEST_CASE("608 G spectrum has at least four maxima between 10 and 80 MHz") {
  const auto system = testutil::nv3c();
  TransitionOptions opts;
  opts.kappa_min = 1e-6;
  const auto records = enumerate_transitions(system, 608.0, opts);
  const SpectrumTrace t = synthesize_spectrum(records, SpectrumAxis{10.0, 80.0, 0.01}, 1e-6);
  int maxima = 0;
  for (std::size_t k = 1; k + 1 < t.intensity.size(); ++k)
    if (t.intensity[k] > t.intensity[k - 1] && t.intensity[k] >= t.intensity[k + 1] &&
        t.intensity[k] > 1e-9)
      ++maxima;
  CHECK(maxima >= 4);
  CHECK(t.b_gauss == 608.0);
  CHECK(std::all_of(t.intensity.begin(), t.intensity.end(), [](double x) { return x >= 0.0; }));
}
