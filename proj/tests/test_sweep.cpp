#include "nvdpt/error.hpp"
#include "nvdpt/sweep.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

using namespace nvdpt;

TEST_CASE("classify_manifold") {
  const SpinSystem system(nv3c_system());
  ComplexVector v = ComplexVector::Zero(24);
  v(8 + 5) = 1.0;  // m_S = 0, nuclear state 5
  CHECK(classify_manifold(system, v) == Manifold(0));
  v.setZero();
  v(3) = 1.0;  // m_S = +1
  CHECK(classify_manifold(system, v) == Manifold(1));
  v.setZero();
  v(8) = v(16) = 1.0 / std::sqrt(2.0);  // m_S = 0 and -1
  CHECK_FALSE(classify_manifold(system, v).has_value());
  CHECK(manifold_name(std::nullopt) == "mixed");
  CHECK(manifold_name(-1) == "-1");
  // Equal m_S = +1 / -1 superposition has <S_z> = 0 but <S_z^2> = 1.
  v.setZero();
  v(0) = v(16) = 1.0 / std::sqrt(2.0);
  CHECK_FALSE(classify_manifold(system, v).has_value());
}

TEST_CASE("eight states per manifold at 300 G") {
  const LevelSet levels = diagonalize(*testutil::nv3c(), 300.0);
  int count[3] = {0, 0, 0};
  for (const auto& m : levels.manifold) {
    REQUIRE(m.has_value());
    ++count[*m + 1];
  }
  CHECK(count[0] == 8);
  CHECK(count[1] == 8);
  CHECK(count[2] == 8);
}

TEST_CASE("FieldGrid validation and size") {
  CHECK(FieldGrid(0.5, 1200.0, 0.5).size() == 2400);
  CHECK(FieldGrid(0.0, 1.0, 0.1).size() == 11);
  CHECK_THROWS_AS(FieldGrid(1.0, 1.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(FieldGrid(0.0, 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(FieldGrid(0.0, 1.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(FieldGrid(0.0, INFINITY, 1.0), InvalidArgument);
}

TEST_CASE("bare NV: m_S=-1 crosses m_S=0 near 1025 G") {
  const auto system = testutil::make(bare_nv_system());
  const TrackedSpectrum t = sweep_eigen(system, FieldGrid(0.0, 1200.0, 0.5));
  CHECK(t.field(0) == doctest::Approx(0.1));
  // Trajectory 1 starts as m_S = -1 (lowest of the upper pair is -1 at positive field).
  const std::vector<LacRecord> lacs = find_lacs(t);
  REQUIRE(lacs.size() == 1);
  CHECK(lacs[0].b_star == doctest::Approx(2870.0 / 2.8).epsilon(1e-3));
  CHECK(std::abs(lacs[0].b_star - 2870.0 / 2.8) < 1.0);
  CHECK(lacs[0].min_gap < 0.1);
  CHECK(lacs[0].set == 2);
  // The crossing is followed diabatically: manifolds are constant along each trajectory.
  for (int label = 0; label < 3; ++label) {
    const Manifold first = t.manifold(0, label);
    for (std::size_t k = 0; k < t.points(); ++k) CHECK(t.manifold(k, label) == first);
  }
}

TEST_CASE("tracked energies are permutations of the eigenvalues") {
  const auto system = testutil::nv3c();
  const TrackedSpectrum t = sweep_eigen(system, FieldGrid(0.0, 100.0, 0.5));
  for (std::size_t k = 0; k < t.points(); k += 7) {
    const Eigen::VectorXd oracle =
        Eigen::SelfAdjointEigenSolver<ComplexMatrix>(system->hamiltonian(t.field(k)),
                                                     Eigen::EigenvaluesOnly)
            .eigenvalues();
    std::vector<double> e;
    for (int label = 0; label < 24; ++label) e.push_back(t.energy(k, label));
    std::sort(e.begin(), e.end());
    for (int r = 0; r < 24; ++r) CHECK(std::abs(e[static_cast<std::size_t>(r)] - oracle[r]) < 1e-8);
    std::vector<int> col = t.point(k).column;
    std::sort(col.begin(), col.end());
    for (int r = 0; r < 24; ++r) CHECK(col[static_cast<std::size_t>(r)] == r);
  }
}

TEST_CASE("m_S=0 trajectories stay near zero projection below 300 G") {
  const TrackedSpectrum t = sweep_eigen(testutil::nv3c(), FieldGrid(0.5, 299.5, 1.0));
  int zero_trajectories = 0;
  for (int label = 0; label < 24; ++label) {
    if (t.manifold(0, label) != Manifold(0)) continue;
    ++zero_trajectories;
    for (std::size_t k = 0; k < t.points(); ++k) CHECK(std::abs(t.sz(k, label)) < 0.1);
  }
  CHECK(zero_trajectories == 8);
}

TEST_CASE("trajectories are smooth and refinement-stable") {
  const auto system = testutil::nv3c();
  const TrackedSpectrum coarse = sweep_eigen(system, FieldGrid(500.0, 700.0, 1.0));
  const TrackedSpectrum fine = sweep_eigen(system, FieldGrid(500.0, 700.0, 0.5));
  for (std::size_t k = 0; k < coarse.points(); ++k)
    for (int label = 0; label < 24; ++label)
      CHECK(coarse.energy(k, label) == fine.energy(2 * k, label));

  // Second differences stay small compared with the neighbouring ones (no label swaps).
  for (int label = 0; label < 24; ++label) {
    for (std::size_t k = 2; k + 2 < fine.points(); ++k) {
      auto d2 = [&](std::size_t j) {
        return fine.energy(j + 1, label) - 2 * fine.energy(j, label) + fine.energy(j - 1, label);
      };
      const double bound = 4.0 * std::max({std::abs(d2(k - 1)), std::abs(d2(k + 1)), 1e-3});
      CHECK(std::abs(d2(k)) <= bound);
    }
  }
}

TEST_CASE("sweep output is deterministic") {
  const auto system = testutil::nv3c();
  const TrackedSpectrum a = sweep_eigen(system, FieldGrid(10.0, 60.0, 0.5));
  const TrackedSpectrum b = sweep_eigen(system, FieldGrid(10.0, 60.0, 0.5));
  for (std::size_t k = 0; k < a.points(); ++k) {
    CHECK(a.point(k).column == b.point(k).column);
    CHECK((a.point(k).levels.eigen.values - b.point(k).levels.eigen.values).norm() == 0.0);
  }
}

TEST_CASE("ambiguous tracking is reported") {
  // Every state of a 5x5 discrete Fourier basis overlaps each basis vector by 1/sqrt(5).
  const int n = 5;
  ComplexMatrix dft(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      dft(r, c) = std::polar(1.0 / std::sqrt(double(n)), 2.0 * std::numbers::pi * r * c / n);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  CHECK_THROWS_AS(match_levels(id, dft, 0.5, 1.0, 2.0), AmbiguityError);
  try {
    match_levels(id, dft, 0.5, 1.0, 2.0);
  } catch (const AmbiguityError& e) {
    CHECK(std::string(e.what()).find("halve the field step") != std::string::npos);
  }
  CHECK(match_levels(id, dft, 0.4, 1.0, 2.0).size() == 5);
}

TEST_CASE("LAC sets for the three-nucleus system") {
  const auto system = testutil::nv3c();
  const TrackedSpectrum low = sweep_eigen(system, FieldGrid(0.0, 100.0, 0.5));
  const std::vector<LacRecord> set1 = find_lacs(low);
  int n1 = 0;
  for (const auto& r : set1) {
    CHECK(r.min_gap >= 0.0);
    CHECK(r.b_star >= low.field(0));
    CHECK(r.b_star <= 100.0);
    if (r.set == 1) {
      ++n1;
      CHECK(r.b_star >= 0.5);
      CHECK(r.b_star <= 80.0);
    }
  }
  CHECK(n1 > 0);

  const TrackedSpectrum high = sweep_eigen(system, FieldGrid(700.0, 1200.0, 0.5));
  int n2 = 0;
  for (const auto& r : find_lacs(high)) {
    if (r.set != 2) continue;
    ++n2;
    CHECK(r.b_star >= 800.0);
    CHECK(r.b_star <= 1200.0);
  }
  CHECK(n2 > 0);
}

TEST_CASE("LAC positions are stable under step halving") {
  const auto system = testutil::make(bare_nv_system());
  const auto a = find_lacs(sweep_eigen(system, FieldGrid(900.0, 1100.0, 1.0)));
  const auto b = find_lacs(sweep_eigen(system, FieldGrid(900.0, 1100.0, 0.5)));
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k].b_star - b[k].b_star) < 0.1);
}
