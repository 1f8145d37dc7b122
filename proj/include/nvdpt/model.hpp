#pragma once

#include "nvdpt/spin_algebra.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nvdpt {

struct ElectronSpec {
  double spin = 1.0;
  double gamma_e_mhz_per_g = 2.8;
  double zfs_d_mhz = 2870.0;
};

struct NucleusSpec {
  double spin = 0.5;
  double gamma_n_khz_per_g = 1.0705;
  Tensor3 hyperfine_mhz = Tensor3::Zero();  // unrotated tensor; rotated by azimuth_rad about z
  double azimuth_rad = 0.0;
};

struct SpinSystemSpec {
  ElectronSpec electron;
  std::vector<NucleusSpec> nuclei;
  bool include_nuclear_zeeman = false;
};

// Axial field projection on the defect axis.
struct FieldPoint {
  double b_gauss = 0.0;
};

// First-shell 13C hyperfine tensor with the nucleus in the xz plane.
Tensor3 first_shell_tensor();

SpinSystemSpec bare_nv_system();
// NV with one first-shell 13C at azimuth 0.
SpinSystemSpec nv1c_system();
// NV with three first-shell 13C at azimuths 0, 2pi/3, 4pi/3.
SpinSystemSpec nv3c_system();

// Parses and validates a spin-system JSON document. Throws SchemaError with the path of
// the offending field.
SpinSystemSpec parse_system(std::string_view json_text);
SpinSystemSpec load_system(const std::filesystem::path& path);
std::string system_to_json(const SpinSystemSpec& spec);

using VectorOperator = std::array<ComplexMatrix, 3>;

// sum_ab A_ab S_a I_b.
ComplexMatrix hyperfine_term(const Tensor3& a, const VectorOperator& s, const VectorOperator& i);

// Spin operators of a spec embedded in the composite space, plus the Hamiltonian split
// into its field-independent part and dH/dB. Immutable after construction.
class SpinSystem {
 public:
  explicit SpinSystem(SpinSystemSpec spec);

  const SpinSystemSpec& spec() const { return spec_; }
  int dim() const { return static_cast<int>(static_part_.rows()); }
  const std::vector<int>& dims() const { return dims_; }

  const VectorOperator& electron() const { return s_; }
  const ComplexMatrix& sz() const { return s_[2]; }
  const ComplexMatrix& sz2() const { return sz2_; }
  const VectorOperator& nucleus(std::size_t n) const { return i_.at(n); }
  // Total nuclear spin K.
  const VectorOperator& total_nuclear() const { return k_; }
  const ComplexMatrix& kz() const { return k_[2]; }

  // H(B) = static_part + B * field_derivative, MHz.
  ComplexMatrix hamiltonian(double b_gauss) const;
  const ComplexMatrix& static_part() const { return static_part_; }
  // dH/dB in MHz/G.
  const ComplexMatrix& field_derivative() const { return dh_db_; }
  // gamma_e (Sx+Sy+Sz) + sum_n gamma_n (Inx+Iny+Inz), MHz/G.
  const ComplexMatrix& drive_operator() const { return drive_; }

 private:
  SpinSystemSpec spec_;
  std::vector<int> dims_;
  VectorOperator s_;
  ComplexMatrix sz2_;
  std::vector<VectorOperator> i_;
  VectorOperator k_;
  ComplexMatrix static_part_;
  ComplexMatrix dh_db_;
  ComplexMatrix drive_;
};

ComplexMatrix build_hamiltonian(const SpinSystemSpec& spec, FieldPoint field);

}  // namespace nvdpt
