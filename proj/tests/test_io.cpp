#include "nvdpt/error.hpp"
#include "nvdpt/io.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace nvdpt;

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "nvdpt_io_tests";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("format_number round-trips") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(2870.0) == "2870");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(std::nan("")) == "nan");
  for (double x : {1.0 / 3.0, -2.5e-17, 6.02214076e23, 27.249999999999996}) {
    const std::string s = format_number(x);
    CHECK(std::stod(s) == x);
  }
}

TEST_CASE("CSV headers") {
  const auto system = testutil::nv3c();
  const LevelSet levels = diagonalize(*system, 100.0);
  const std::string csv = format_levels(levels, Format::Csv);
  CHECK(csv.rfind("b_gauss,level_label,energy_mhz,sz_expect,kz_expect,manifold\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 25);

  const std::string tr = format_transitions({}, Format::Csv);
  CHECK(tr ==
        "b_gauss,level_i,level_f,nu_mhz,tme,d_pop,d_sz2,kappa,gamma_eff_khz_per_g,"
        "curvature_khz_per_g2,manifold_i,manifold_f\n");

  SpectrumTrace trace;
  trace.freq_mhz = {1.0, 2.0};
  trace.intensity = {0.0, 0.5};
  CHECK(format_spectrum(trace, Format::Csv) == "freq_mhz,intensity\n1,0\n2,0.5\n");
}

TEST_CASE("transitions round trip through CSV and JSON") {
  const auto system = testutil::nv3c();
  TransitionOptions opts;
  opts.kappa_min = 1e-6;
  const auto records = enumerate_transitions(system, 608.0, opts);
  REQUIRE_FALSE(records.empty());
  for (Format f : {Format::Csv, Format::Json}) {
    const auto back = parse_transitions(format_transitions(records, f));
    REQUIRE(back.size() == records.size());
    for (std::size_t k = 0; k < records.size(); ++k) {
      const auto& a = records[k];
      const auto& b = back[k];
      CHECK(a.b_gauss == b.b_gauss);
      CHECK(a.level_i == b.level_i);
      CHECK(a.level_f == b.level_f);
      CHECK(a.nu_mhz == b.nu_mhz);
      CHECK(a.tme == b.tme);
      CHECK(a.d_pop == b.d_pop);
      CHECK(a.d_sz2 == b.d_sz2);
      CHECK(a.kappa == b.kappa);
      CHECK(a.gamma_eff_khz_per_g == b.gamma_eff_khz_per_g);
      CHECK(a.curvature_khz_per_g2 == b.curvature_khz_per_g2);
      CHECK(a.manifold_i == b.manifold_i);
      CHECK(a.manifold_f == b.manifold_f);
    }
  }
}

TEST_CASE("parse errors name the field") {
  try {
    parse_transitions("b_gauss,level_i\n1,2\n");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.path() == "$.header");
  }
  try {
    parse_peaks_csv("nu_mhz,fwhm_mhz,amplitude\n1.0,abc,2\n");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.path() == "$[1].fwhm_mhz");
  }
  CHECK_THROWS_AS(parse_transitions("[{\"b_gauss\": 1}]"), SchemaError);
  const auto peaks = parse_peaks_csv("nu_mhz,fwhm_mhz,amplitude\r\n22.3, 1.24, 6.04e-6\r\n");
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].fwhm_mhz == 1.24);
}

TEST_CASE("atomic writes") {
  const fs::path dir = scratch_dir();
  const fs::path target = dir / "out.csv";
  write_file_atomic(target, "first\n");
  write_file_atomic(target, "second\n");
  CHECK(read_text_file(target) == "second\n");
  for (const auto& entry : fs::directory_iterator(dir))
    CHECK(entry.path().filename().string().find(".tmp") == std::string::npos);
  CHECK_THROWS_AS(write_file_atomic(dir / "missing" / "x.csv", "x"), IoError);
  CHECK_THROWS_AS(read_text_file(dir / "does-not-exist"), IoError);
  CHECK_THROWS_AS(parse_format("xml"), InvalidArgument);
}

TEST_CASE("tracked and LAC output") {
  const auto system = testutil::make(bare_nv_system());
  const TrackedSpectrum t = sweep_eigen(system, FieldGrid(1000.0, 1050.0, 1.0));
  const std::string csv = format_tracked(t, Format::Csv);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 51 * 3);
  const auto lacs = find_lacs(t);
  const std::string lcsv = format_lacs(lacs, Format::Csv);
  CHECK(lcsv.rfind("b_star_gauss,level_a,level_b,manifold_a,manifold_b,min_gap_mhz,set\n", 0) == 0);
  const std::string ljson = format_lacs(lacs, Format::Json);
  CHECK(ljson.find("\"set\": 2") != std::string::npos);
}
