#include "nvdpt/model.hpp"

#include "nvdpt/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace nvdpt {

namespace {

using json = nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string index_path(const std::string& base, std::size_t k) {
  return base + "[" + std::to_string(k) + "]";
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key))
      throw SchemaError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double read_number(const json& obj, const std::string& path, const std::string& key,
                   double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw SchemaError(child(path, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(child(path, key), "must be finite");
  return x;
}

void check_spin(double s, const std::string& path) {
  if (s < 0.0) throw SchemaError(path, "spin must be non-negative");
  if (std::abs(2.0 * s - std::round(2.0 * s)) > 1e-12)
    throw SchemaError(path, "spin must be a half-integer");
}

Tensor3 read_tensor(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 9)
    throw SchemaError(path, "expected an array of 9 numbers (row-major 3x3)");
  Tensor3 a;
  for (std::size_t k = 0; k < 9; ++k) {
    if (!v[k].is_number()) throw SchemaError(index_path(path, k), "expected a number");
    a(static_cast<int>(k / 3), static_cast<int>(k % 3)) = v[k].get<double>();
  }
  if (!a.allFinite()) throw SchemaError(path, "entries must be finite");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int r = 0; r < 3; ++r)
    for (int c = r + 1; c < 3; ++c)
      if (std::abs(a(r, c) - a(c, r)) > 1e-9 * scale)
        throw SchemaError(path, "tensor is not symmetric (element " + std::to_string(r) +
                                    std::to_string(c) + " != " + std::to_string(c) +
                                    std::to_string(r) + ")");
  return a;
}

NucleusSpec read_nucleus(const json& v, const std::string& path) {
  if (!v.is_object()) throw SchemaError(path, "expected an object");
  reject_unknown_keys(v, path, {"spin", "gamma_n_khz_per_g", "hyperfine_mhz", "azimuth_rad"});
  NucleusSpec n;
  n.spin = read_number(v, path, "spin", n.spin);
  check_spin(n.spin, child(path, "spin"));
  n.gamma_n_khz_per_g = read_number(v, path, "gamma_n_khz_per_g", n.gamma_n_khz_per_g);
  if (!v.contains("hyperfine_mhz")) throw SchemaError(child(path, "hyperfine_mhz"), "missing");
  n.hyperfine_mhz = read_tensor(v.at("hyperfine_mhz"), child(path, "hyperfine_mhz"));
  n.azimuth_rad = read_number(v, path, "azimuth_rad", n.azimuth_rad);
  if (n.azimuth_rad < 0.0 || n.azimuth_rad >= kTwoPi)
    throw SchemaError(child(path, "azimuth_rad"), "must lie in [0, 2pi)");
  return n;
}

}  // namespace

Tensor3 first_shell_tensor() {
  Tensor3 a;
  a << 166.9, 0.0, -90.0,
       0.0, 122.9, 0.0,
       -90.0, 0.0, 90.0;
  return a;
}

SpinSystemSpec bare_nv_system() { return SpinSystemSpec{}; }

SpinSystemSpec nv1c_system() {
  SpinSystemSpec spec;
  spec.nuclei.push_back(NucleusSpec{.hyperfine_mhz = first_shell_tensor(), .azimuth_rad = 0.0});
  return spec;
}

SpinSystemSpec nv3c_system() {
  SpinSystemSpec spec;
  for (int n = 0; n < 3; ++n)
    spec.nuclei.push_back(
        NucleusSpec{.hyperfine_mhz = first_shell_tensor(), .azimuth_rad = n * kTwoPi / 3.0});
  return spec;
}

SpinSystemSpec parse_system(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("$", "expected a JSON object");
  reject_unknown_keys(doc, "", {"electron", "nuclei", "include_nuclear_zeeman"});

  SpinSystemSpec spec;
  if (doc.contains("electron")) {
    const json& e = doc.at("electron");
    if (!e.is_object()) throw SchemaError("electron", "expected an object");
    reject_unknown_keys(e, "electron", {"spin", "gamma_e_mhz_per_g", "zfs_d_mhz"});
    spec.electron.spin = read_number(e, "electron", "spin", spec.electron.spin);
    check_spin(spec.electron.spin, "electron.spin");
    if (spec.electron.spin == 0.0) throw SchemaError("electron.spin", "must be positive");
    spec.electron.gamma_e_mhz_per_g =
        read_number(e, "electron", "gamma_e_mhz_per_g", spec.electron.gamma_e_mhz_per_g);
    spec.electron.zfs_d_mhz = read_number(e, "electron", "zfs_d_mhz", spec.electron.zfs_d_mhz);
  }

  if (doc.contains("nuclei")) {
    const json& list = doc.at("nuclei");
    if (!list.is_array()) throw SchemaError("nuclei", "expected an array");
    for (std::size_t k = 0; k < list.size(); ++k)
      spec.nuclei.push_back(read_nucleus(list[k], index_path("nuclei", k)));
  } else {
    spec.nuclei = nv3c_system().nuclei;
  }

  if (doc.contains("include_nuclear_zeeman")) {
    const json& z = doc.at("include_nuclear_zeeman");
    if (!z.is_boolean()) throw SchemaError("include_nuclear_zeeman", "expected a boolean");
    spec.include_nuclear_zeeman = z.get<bool>();
  }
  return spec;
}

SpinSystemSpec load_system(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open system file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str());
}

std::string system_to_json(const SpinSystemSpec& spec) {
  json doc;
  doc["electron"] = {{"spin", spec.electron.spin},
                     {"gamma_e_mhz_per_g", spec.electron.gamma_e_mhz_per_g},
                     {"zfs_d_mhz", spec.electron.zfs_d_mhz}};
  doc["nuclei"] = json::array();
  for (const auto& n : spec.nuclei) {
    json a = json::array();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a.push_back(n.hyperfine_mhz(r, c));
    doc["nuclei"].push_back({{"spin", n.spin},
                             {"gamma_n_khz_per_g", n.gamma_n_khz_per_g},
                             {"hyperfine_mhz", a},
                             {"azimuth_rad", n.azimuth_rad}});
  }
  doc["include_nuclear_zeeman"] = spec.include_nuclear_zeeman;
  return doc.dump(2) + "\n";
}

ComplexMatrix hyperfine_term(const Tensor3& a, const VectorOperator& s, const VectorOperator& i) {
  ComplexMatrix h = ComplexMatrix::Zero(s[0].rows(), s[0].cols());
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      if (a(p, q) != 0.0) h += a(p, q) * (s[static_cast<std::size_t>(p)] * i[static_cast<std::size_t>(q)]);
  return h;
}

SpinSystem::SpinSystem(SpinSystemSpec spec) : spec_(std::move(spec)) {
  const SpinOperators e = spin_matrices(spec_.electron.spin);
  dims_.push_back(e.dim());
  std::vector<SpinOperators> nuc;
  for (const auto& n : spec_.nuclei) {
    nuc.push_back(spin_matrices(n.spin));
    dims_.push_back(nuc.back().dim());
  }

  s_ = {embed(e.sx, 0, dims_), embed(e.sy, 0, dims_), embed(e.sz, 0, dims_)};
  sz2_ = s_[2] * s_[2];
  const Eigen::Index d = s_[0].rows();
  const ComplexMatrix s2 = embed(e.s2, 0, dims_);

  for (auto& k : k_) k = ComplexMatrix::Zero(d, d);
  const double gamma_e = spec_.electron.gamma_e_mhz_per_g;
  static_part_ = spec_.electron.zfs_d_mhz * (sz2_ - s2 / 3.0);
  dh_db_ = gamma_e * s_[2];
  drive_ = gamma_e * (s_[0] + s_[1] + s_[2]);

  for (std::size_t n = 0; n < nuc.size(); ++n) {
    const std::size_t slot = n + 1;
    VectorOperator in = {embed(nuc[n].sx, slot, dims_), embed(nuc[n].sy, slot, dims_),
                         embed(nuc[n].sz, slot, dims_)};
    for (std::size_t c = 0; c < 3; ++c) k_[c] += in[c];
    const NucleusSpec& ns = spec_.nuclei[n];
    const Tensor3 a = rotate_tensor(ns.hyperfine_mhz, ns.azimuth_rad);
    static_part_ += hyperfine_term(a, s_, in);
    const double gamma_n = ns.gamma_n_khz_per_g * 1e-3;
    drive_ += gamma_n * (in[0] + in[1] + in[2]);
    if (spec_.include_nuclear_zeeman) dh_db_ -= gamma_n * in[2];
    i_.push_back(std::move(in));
  }
}

ComplexMatrix SpinSystem::hamiltonian(double b_gauss) const {
  return static_part_ + b_gauss * dh_db_;
}

ComplexMatrix build_hamiltonian(const SpinSystemSpec& spec, FieldPoint field) {
  return SpinSystem(spec).hamiltonian(field.b_gauss);
}

}  // namespace nvdpt
