#include "nvdpt/error.hpp"
#include "nvdpt/model.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <numbers>
#include <random>

using namespace nvdpt;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::VectorXd eigenvalues(const ComplexMatrix& m) {
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

ComplexMatrix exp_i_diag(const ComplexMatrix& diagonal_op, double phi) {
  // exp(-i phi D) for diagonal D.
  ComplexMatrix u = ComplexMatrix::Zero(diagonal_op.rows(), diagonal_op.cols());
  for (Eigen::Index k = 0; k < u.rows(); ++k)
    u(k, k) = std::exp(Complex(0.0, -phi * diagonal_op(k, k).real()));
  return u;
}

std::string schema_path_of(const std::string& text) {
  try {
    parse_system(text);
  } catch (const SchemaError& e) {
    return e.path();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("parse_system: bundled file and defaults") {
  const SpinSystemSpec spec = load_system(std::string(NVDPT_DATA_DIR) + "/nv3c.json");
  REQUIRE(spec.nuclei.size() == 3);
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK(spec.nuclei[n].azimuth_rad == doctest::Approx(n * kTwoPi / 3.0).epsilon(1e-15));
    CHECK((spec.nuclei[n].hyperfine_mhz - first_shell_tensor()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(spec.nuclei[n].spin == 0.5);
  }
  CHECK(spec.electron.spin == 1.0);
  CHECK(spec.electron.gamma_e_mhz_per_g == 2.8);
  CHECK(spec.electron.zfs_d_mhz == 2870.0);
  CHECK_FALSE(spec.include_nuclear_zeeman);

  const SpinSystemSpec bare = parse_system(R"({"nuclei": []})");
  CHECK(bare.nuclei.empty());
  CHECK(bare.electron.zfs_d_mhz == 2870.0);

  const SpinSystemSpec implicit = parse_system("{}");
  CHECK(implicit.nuclei.size() == 3);
}

TEST_CASE("parse_system: round trip through system_to_json") {
  SpinSystemSpec spec = nv3c_system();
  spec.include_nuclear_zeeman = true;
  spec.electron.zfs_d_mhz = 2877.5;
  const SpinSystemSpec back = parse_system(system_to_json(spec));
  CHECK(back.include_nuclear_zeeman);
  CHECK(back.electron.zfs_d_mhz == 2877.5);
  REQUIRE(back.nuclei.size() == 3);
  CHECK(back.nuclei[2].azimuth_rad == spec.nuclei[2].azimuth_rad);
}

TEST_CASE("parse_system: errors carry the offending path") {
  CHECK(schema_path_of(R"({"nuclei": [{"hyperfine_mhz": [1,0,2, 0,1,0, 0,0,1]}]})") ==
        "nuclei[0].hyperfine_mhz");
  CHECK(schema_path_of(R"({"nuclei": [{"spin": -0.5, "hyperfine_mhz": [1,0,0,0,1,0,0,0,1]}]})") ==
        "nuclei[0].spin");
  CHECK(schema_path_of(R"({"nuclei": [{"spin": 0.5}]})") == "nuclei[0].hyperfine_mhz");
  CHECK(schema_path_of(R"({"nuclei": [{"hyperfine_mhz": [1,0,0,0,1,0,0,0]}]})") ==
        "nuclei[0].hyperfine_mhz");
  CHECK(schema_path_of(R"({"electron": {"zfs_d_mhz": "big"}})") == "electron.zfs_d_mhz");
  CHECK(schema_path_of(R"({"electron": {"g": 2}})") == "electron.g");
  CHECK(schema_path_of(R"({"nucleii": []})") == "nucleii");
  CHECK(schema_path_of(R"({"include_nuclear_zeeman": 1})") == "include_nuclear_zeeman");
  CHECK(schema_path_of(
            R"({"nuclei": [{"azimuth_rad": 7.0, "hyperfine_mhz": [1,0,0,0,1,0,0,0,1]}]})") ==
        "nuclei[0].azimuth_rad");
  CHECK(schema_path_of("{not json") == "$");
  CHECK(schema_path_of("[1, 2]") == "$");
  CHECK_THROWS_AS(load_system("/nonexistent/system.json"), IoError);
}

TEST_CASE("hyperfine_term") {
  const SpinSystem system(nv1c_system());
  const VectorOperator& s = system.electron();
  const VectorOperator& i = system.nucleus(0);

  CHECK(max_abs_entry(hyperfine_term(Tensor3::Zero(), s, i)) == 0.0);

  // Four-term expansion.
  const Tensor3 a = first_shell_tensor();
  const ComplexMatrix expansion = a(0, 0) * s[0] * i[0] + a(1, 1) * s[1] * i[1] +
                                  a(2, 2) * s[2] * i[2] + a(0, 2) * (s[2] * i[0] + s[0] * i[2]);
  CHECK(max_abs_entry(hyperfine_term(a, s, i) - expansion) < 1e-13);

  // Isotropic coupling: F = 3/2 at a/2 (x4), F = 1/2 at -a (x2).
  const double iso = 10.0;
  const Eigen::VectorXd ev = eigenvalues(hyperfine_term(iso * Tensor3::Identity(), s, i));
  REQUIRE(ev.size() == 6);
  for (int k = 0; k < 2; ++k) CHECK(ev[k] == doctest::Approx(-iso));
  for (int k = 2; k < 6; ++k) CHECK(ev[k] == doctest::Approx(iso / 2));
}

TEST_CASE("bare NV zero-field and linear Zeeman") {
  const auto ev0 = eigenvalues(build_hamiltonian(bare_nv_system(), {0.0}));
  CHECK(ev0[0] == doctest::Approx(-2.0 * 2870.0 / 3.0));
  CHECK(ev0[1] == doctest::Approx(2870.0 / 3.0));
  CHECK(ev0[2] == doctest::Approx(2870.0 / 3.0));
  CHECK(ev0[1] - ev0[0] == doctest::Approx(2870.0).epsilon(1e-15));

  const auto ev = eigenvalues(build_hamiltonian(bare_nv_system(), {100.0}));
  CHECK(ev[1] - ev[0] == doctest::Approx(2870.0 - 280.0).epsilon(1e-14));
  CHECK(ev[2] - ev[0] == doctest::Approx(2870.0 + 280.0).epsilon(1e-14));
}

TEST_CASE("single 13C satellites at zero field") {
  const SpinSystem system(nv1c_system());
  const Eigen::VectorXd ev = eigenvalues(system.hamiltonian(0.0));
  // Lowest two are the m_S = 0 doublet; the rest belong to m_S = +-1.
  CHECK(std::abs(ev[1] - ev[0]) < 1e-9);
  std::vector<double> nu;
  for (int k = 2; k < 6; ++k) nu.push_back(ev[k] - ev[0]);
  auto near = [&](double target) {
    return std::any_of(nu.begin(), nu.end(), [&](double x) { return std::abs(x - target) <= 1.0; });
  };
  CHECK(near(2870.0 - 56.9));
  CHECK(near(2870.0 + 70.7));
}

TEST_CASE("field dependence enters only through the Zeeman term") {
  const SpinSystemSpec spec = nv3c_system();
  const SpinSystem system(spec);
  const ComplexMatrix d = build_hamiltonian(spec, {450.0}) - build_hamiltonian(spec, {125.0});
  CHECK(max_abs_entry(d - (325.0 * 2.8) * system.sz()) < 1e-9);
}

TEST_CASE("nuclear Zeeman switch") {
  SpinSystemSpec spec = nv3c_system();
  spec.include_nuclear_zeeman = true;
  const SpinSystem system(spec);
  const ComplexMatrix expected = 2.8 * system.sz() - 1.0705e-3 * system.kz();
  CHECK(max_abs_entry(system.field_derivative() - expected) < 1e-15);
}

TEST_CASE("Hamiltonian is Hermitian over random fields") {
  const SpinSystemSpec spec = nv3c_system();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> field(-2000.0, 2000.0);
  for (int trial = 0; trial < 25; ++trial) {
    const ComplexMatrix h = build_hamiltonian(spec, {field(rng)});
    CHECK(h.rows() == 24);
    CHECK(max_abs_entry(h - h.adjoint()) <= 1e-12 * max_abs_entry(h));
  }
}

TEST_CASE("tensor rotation equals operator conjugation") {
  // Two-spin subsystem: electron-side conjugation of S.A.I versus S.(R A R^T).I.
  const double phi = kTwoPi / 3.0;
  SpinSystemSpec rotated = nv1c_system();
  rotated.nuclei[0].azimuth_rad = phi;
  const SpinSystem sys0(nv1c_system()), sys1(rotated);
  const VectorOperator& s = sys0.electron();
  const VectorOperator& i = sys0.nucleus(0);
  const ComplexMatrix u_e = exp_i_diag(s[2], phi);
  const ComplexMatrix conj_hf = u_e * hyperfine_term(first_shell_tensor(), s, i) * u_e.adjoint();
  const ComplexMatrix zeeman_zfs = sys0.static_part() - hyperfine_term(first_shell_tensor(), s, i);
  for (double b : {0.0, 300.0, 1000.0}) {
    CAPTURE(b);
    const ComplexMatrix h_conj = zeeman_zfs + conj_hf + b * sys0.field_derivative();
    const Eigen::VectorXd a = eigenvalues(h_conj);
    const Eigen::VectorXd t = eigenvalues(sys1.hamiltonian(b));
    CHECK((a - t).cwiseAbs().maxCoeff() < 1e-10);
  }

  // Joint rotation of both spins reproduces the rotated tensor entrywise.
  const ComplexMatrix u = exp_i_diag(s[2] + i[2], phi);
  const ComplexMatrix joint = u * hyperfine_term(first_shell_tensor(), s, i) * u.adjoint();
  const ComplexMatrix tensor = hyperfine_term(rotate_tensor(first_shell_tensor(), phi), s, i);
  CHECK(max_abs_entry(joint - tensor) < 1e-12);
}

TEST_CASE("threefold symmetry: cyclic relabeling of the nuclei") {
  SpinSystemSpec shifted = nv3c_system();
  for (auto& n : shifted.nuclei) n.azimuth_rad = std::fmod(n.azimuth_rad + kTwoPi / 3.0, kTwoPi);
  std::rotate(shifted.nuclei.begin(), shifted.nuclei.begin() + 1, shifted.nuclei.end());
  for (double b : {0.0, 608.0}) {
    const Eigen::VectorXd a = eigenvalues(build_hamiltonian(nv3c_system(), {b}));
    const Eigen::VectorXd c = eigenvalues(build_hamiltonian(shifted, {b}));
    CHECK((a - c).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("zero hyperfine collapses to three eightfold levels") {
  SpinSystemSpec spec = nv3c_system();
  for (auto& n : spec.nuclei) n.hyperfine_mhz.setZero();
  const Eigen::VectorXd ev = eigenvalues(build_hamiltonian(spec, {0.0}));
  for (int k = 0; k < 8; ++k) CHECK(ev[k] == doctest::Approx(-2.0 * 2870.0 / 3.0));
  for (int k = 8; k < 24; ++k) CHECK(ev[k] == doctest::Approx(2870.0 / 3.0));
}

TEST_CASE("SpinSystem dimensions") {
  const SpinSystem system(nv3c_system());
  CHECK(system.dim() == 24);
  CHECK(system.dims() == std::vector<int>{3, 2, 2, 2});
  CHECK(SpinSystem(bare_nv_system()).dim() == 3);
}
