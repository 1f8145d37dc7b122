#include "nvdpt/io.hpp"

#include "nvdpt/error.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace nvdpt {

using nlohmann::ordered_json;

namespace {

constexpr std::array<const char*, 12> kTransitionColumns = {
    "b_gauss", "level_i", "level_f", "nu_mhz", "tme", "d_pop", "d_sz2", "kappa",
    "gamma_eff_khz_per_g", "curvature_khz_per_g2", "manifold_i", "manifold_f"};

ordered_json number_or_null(double x) {
  return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr);
}

ordered_json manifold_json(const Manifold& m) {
  return m ? ordered_json(*m) : ordered_json("mixed");
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// Appends one CSV row; doubles go through format_number.
class Row {
 public:
  explicit Row(std::string& out) : out_(out) {}
  ~Row() { out_ += '\n'; }
  Row& operator<<(double x) { return put(format_number(x)); }
  Row& operator<<(int x) { return put(std::to_string(x)); }
  Row& operator<<(std::size_t x) { return put(std::to_string(x)); }
  Row& operator<<(const std::string& s) { return put(s); }
  Row& operator<<(const char* s) { return put(s); }

 private:
  Row& put(std::string_view s) {
    if (!first_) out_ += ',';
    out_ += s;
    first_ = false;
    return *this;
  }
  std::string& out_;
  bool first_ = true;
};

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& field : out) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n'))
    if (!line.empty()) out.push_back(line);
  return out;
}

double parse_double(std::string_view s, const std::string& where) {
  if (s == "nan" || s == "NaN" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw SchemaError(where, "expected a number, got '" + std::string(s) + "'");
  return x;
}

int parse_int(std::string_view s, const std::string& where) {
  int x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw SchemaError(where, "expected an integer, got '" + std::string(s) + "'");
  return x;
}

Manifold parse_manifold(std::string_view s, const std::string& where) {
  if (s == "mixed") return std::nullopt;
  return parse_int(s, where);
}

std::vector<TransitionRecord> parse_transitions_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw SchemaError("$", "empty transitions file");
  const auto header = split(lines.front(), ',');
  if (header.size() != kTransitionColumns.size())
    throw SchemaError("$.header", "expected " + std::to_string(kTransitionColumns.size()) + " columns");
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] != kTransitionColumns[c])
      throw SchemaError("$.header[" + std::to_string(c) + "]",
                        "expected column '" + std::string(kTransitionColumns[c]) + "'");
  std::vector<TransitionRecord> out;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto f = split(lines[l], ',');
    const std::string row = "$[" + std::to_string(l) + "]";
    if (f.size() != kTransitionColumns.size()) throw SchemaError(row, "wrong number of columns");
    auto at = [&](std::size_t c) { return row + "." + kTransitionColumns[c]; };
    TransitionRecord r;
    r.b_gauss = parse_double(f[0], at(0));
    r.level_i = parse_int(f[1], at(1));
    r.level_f = parse_int(f[2], at(2));
    r.nu_mhz = parse_double(f[3], at(3));
    r.tme = parse_double(f[4], at(4));
    r.d_pop = parse_double(f[5], at(5));
    r.d_sz2 = parse_double(f[6], at(6));
    r.kappa = parse_double(f[7], at(7));
    r.gamma_eff_khz_per_g = parse_double(f[8], at(8));
    r.curvature_khz_per_g2 = parse_double(f[9], at(9));
    r.manifold_i = parse_manifold(f[10], at(10));
    r.manifold_f = parse_manifold(f[11], at(11));
    out.push_back(r);
  }
  return out;
}

double json_number(const ordered_json& j, const std::string& where) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) throw SchemaError(where, "expected a number");
  return j.get<double>();
}

int json_int(const ordered_json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where, "expected an integer");
  return j.get<int>();
}

Manifold json_manifold(const ordered_json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "mixed") return std::nullopt;
  return json_int(j, where);
}

std::vector<TransitionRecord> parse_transitions_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("$", e.what());
  }
  if (!doc.is_array()) throw SchemaError("$", "expected an array of transition records");
  std::vector<TransitionRecord> out;
  for (std::size_t k = 0; k < doc.size(); ++k) {
    const auto& o = doc[k];
    const std::string row = "$[" + std::to_string(k) + "]";
    if (!o.is_object()) throw SchemaError(row, "expected an object");
    for (const auto& [key, value] : o.items()) {
      bool known = false;
      for (const char* c : kTransitionColumns) known = known || key == c;
      if (!known) throw SchemaError(row + "." + key, "unknown key");
    }
    auto field = [&](const char* key) -> const ordered_json& {
      if (!o.contains(key)) throw SchemaError(row + "." + key, "missing key");
      return o.at(key);
    };
    auto at = [&](const char* key) { return row + "." + key; };
    TransitionRecord r;
    r.b_gauss = json_number(field("b_gauss"), at("b_gauss"));
    r.level_i = json_int(field("level_i"), at("level_i"));
    r.level_f = json_int(field("level_f"), at("level_f"));
    r.nu_mhz = json_number(field("nu_mhz"), at("nu_mhz"));
    r.tme = json_number(field("tme"), at("tme"));
    r.d_pop = json_number(field("d_pop"), at("d_pop"));
    r.d_sz2 = json_number(field("d_sz2"), at("d_sz2"));
    r.kappa = json_number(field("kappa"), at("kappa"));
    r.gamma_eff_khz_per_g = json_number(field("gamma_eff_khz_per_g"), at("gamma_eff_khz_per_g"));
    r.curvature_khz_per_g2 =
        json_number(field("curvature_khz_per_g2"), at("curvature_khz_per_g2"));
    r.manifold_i = json_manifold(field("manifold_i"), at("manifold_i"));
    r.manifold_f = json_manifold(field("manifold_f"), at("manifold_f"));
    out.push_back(r);
  }
  return out;
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw InvalidArgument("--format must be csv or json, got '" + std::string(name) + "'");
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

std::string format_levels(const LevelSet& levels, Format format) {
  const int n = levels.size();
  if (format == Format::Json) {
    ordered_json arr = ordered_json::array();
    for (int k = 0; k < n; ++k) {
      const auto i = static_cast<std::size_t>(k);
      arr.push_back({{"b_gauss", levels.b_gauss},
                     {"level_label", k},
                     {"energy_mhz", levels.eigen.values[k]},
                     {"sz_expect", levels.sz[i]},
                     {"kz_expect", levels.kz[i]},
                     {"manifold", manifold_json(levels.manifold[i])}});
    }
    return dump(arr);
  }
  std::string out = "b_gauss,level_label,energy_mhz,sz_expect,kz_expect,manifold\n";
  for (int k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    Row(out) << levels.b_gauss << k << levels.eigen.values[k] << levels.sz[i] << levels.kz[i]
             << manifold_name(levels.manifold[i]);
  }
  return out;
}

std::string format_tracked(const TrackedSpectrum& tracked, Format format) {
  const int n = tracked.levels();
  if (format == Format::Json) {
    ordered_json arr = ordered_json::array();
    for (std::size_t k = 0; k < tracked.points(); ++k)
      for (int t = 0; t < n; ++t)
        arr.push_back({{"b_gauss", tracked.field(k)},
                       {"level_label", t},
                       {"energy_mhz", tracked.energy(k, t)},
                       {"sz_expect", tracked.sz(k, t)},
                       {"kz_expect", tracked.kz(k, t)},
                       {"manifold", manifold_json(tracked.manifold(k, t))}});
    return dump(arr);
  }
  std::string out = "b_gauss,level_label,energy_mhz,sz_expect,kz_expect,manifold\n";
  for (std::size_t k = 0; k < tracked.points(); ++k)
    for (int t = 0; t < n; ++t)
      Row(out) << tracked.field(k) << t << tracked.energy(k, t) << tracked.sz(k, t)
               << tracked.kz(k, t) << manifold_name(tracked.manifold(k, t));
  return out;
}

std::string format_transitions(std::span<const TransitionRecord> records, Format format) {
  if (format == Format::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : records)
      arr.push_back({{"b_gauss", r.b_gauss},
                     {"level_i", r.level_i},
                     {"level_f", r.level_f},
                     {"nu_mhz", r.nu_mhz},
                     {"tme", r.tme},
                     {"d_pop", r.d_pop},
                     {"d_sz2", r.d_sz2},
                     {"kappa", r.kappa},
                     {"gamma_eff_khz_per_g", number_or_null(r.gamma_eff_khz_per_g)},
                     {"curvature_khz_per_g2", number_or_null(r.curvature_khz_per_g2)},
                     {"manifold_i", manifold_json(r.manifold_i)},
                     {"manifold_f", manifold_json(r.manifold_f)}});
    return dump(arr);
  }
  std::string out;
  {
    Row header(out);
    for (const char* c : kTransitionColumns) header << c;
  }
  for (const auto& r : records)
    Row(out) << r.b_gauss << r.level_i << r.level_f << r.nu_mhz << r.tme << r.d_pop << r.d_sz2
             << r.kappa << r.gamma_eff_khz_per_g << r.curvature_khz_per_g2
             << manifold_name(r.manifold_i) << manifold_name(r.manifold_f);
  return out;
}

std::string format_lacs(std::span<const LacRecord> lacs, Format format) {
  if (format == Format::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : lacs)
      arr.push_back({{"b_star_gauss", r.b_star},
                     {"level_a", r.level_a},
                     {"level_b", r.level_b},
                     {"manifold_a", manifold_json(r.manifold_a)},
                     {"manifold_b", manifold_json(r.manifold_b)},
                     {"min_gap_mhz", r.min_gap},
                     {"set", r.set}});
    return dump(arr);
  }
  std::string out = "b_star_gauss,level_a,level_b,manifold_a,manifold_b,min_gap_mhz,set\n";
  for (const auto& r : lacs)
    Row(out) << r.b_star << r.level_a << r.level_b << manifold_name(r.manifold_a)
             << manifold_name(r.manifold_b) << r.min_gap << r.set;
  return out;
}

std::string format_dpts(std::span<const DptRecord> dpts, Format format) {
  if (format == Format::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : dpts)
      arr.push_back({{"level_i", r.level_i},
                     {"level_f", r.level_f},
                     {"manifold_i", manifold_json(r.manifold_i)},
                     {"manifold_f", manifold_json(r.manifold_f)},
                     {"b_opt_gauss", r.b_opt},
                     {"nu_mhz", r.nu_mhz},
                     {"gamma_eff_khz_per_g", r.gamma_eff_khz_per_g},
                     {"curvature_khz_per_g2", number_or_null(r.curvature_khz_per_g2)},
                     {"kappa", r.kappa},
                     {"fwhm_mhz", r.fwhm_mhz},
                     {"epsilon", r.epsilon}});
    return dump(arr);
  }
  std::string out =
      "level_i,level_f,manifold_i,manifold_f,b_opt_gauss,nu_mhz,gamma_eff_khz_per_g,"
      "curvature_khz_per_g2,kappa,fwhm_mhz,epsilon\n";
  for (const auto& r : dpts)
    Row(out) << r.level_i << r.level_f << manifold_name(r.manifold_i) << manifold_name(r.manifold_f)
             << r.b_opt << r.nu_mhz << r.gamma_eff_khz_per_g << r.curvature_khz_per_g2 << r.kappa
             << r.fwhm_mhz << r.epsilon;
  return out;
}

std::string format_spectrum(const SpectrumTrace& trace, Format format) {
  if (format == Format::Json) {
    ordered_json j;
    j["b_gauss"] = trace.b_gauss;
    j["kappa_min"] = trace.kappa_min;
    j["linewidth_model"] = {{"bath_field_gauss", trace.model.bath_field_gauss},
                            {"floor_mhz", trace.model.floor_mhz},
                            {"reference_mhz", trace.model.reference_mhz}};
    j["freq_mhz"] = trace.freq_mhz;
    j["intensity"] = trace.intensity;
    return dump(j);
  }
  std::string out = "freq_mhz,intensity\n";
  for (std::size_t k = 0; k < trace.freq_mhz.size(); ++k)
    Row(out) << trace.freq_mhz[k] << trace.intensity[k];
  return out;
}

std::string format_assignments(std::span<const PeakAssignment> assignments) {
  ordered_json arr = ordered_json::array();
  for (const auto& a : assignments) {
    ordered_json j = {{"nu_mhz", a.peak.nu_mhz},
                      {"fwhm_mhz", a.peak.fwhm_mhz},
                      {"amplitude", a.peak.amplitude},
                      {"assigned", a.assigned()}};
    if (a.assigned()) {
      j["level_i"] = a.level_i;
      j["level_f"] = a.level_f;
      j["predicted_nu_mhz"] = a.nu_mhz;
      j["distance_mhz"] = a.distance_mhz;
      j["kappa"] = a.kappa;
      j["gamma_eff_khz_per_g"] = number_or_null(a.gamma_eff_khz_per_g);
    }
    arr.push_back(std::move(j));
  }
  return dump(arr);
}

std::vector<TransitionRecord> parse_transitions(std::string_view text) {
  std::size_t k = 0;
  while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
  if (k < text.size() && text[k] == '[') return parse_transitions_json(text);
  return parse_transitions_csv(text);
}

std::vector<MeasuredPeak> parse_peaks_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw SchemaError("$", "empty peaks file");
  const auto header = split(lines.front(), ',');
  const std::array<std::string_view, 3> expected = {"nu_mhz", "fwhm_mhz", "amplitude"};
  if (header.size() != expected.size() || !std::equal(header.begin(), header.end(), expected.begin()))
    throw SchemaError("$.header", "expected columns nu_mhz,fwhm_mhz,amplitude");
  std::vector<MeasuredPeak> out;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto f = split(lines[l], ',');
    const std::string row = "$[" + std::to_string(l) + "]";
    if (f.size() != 3) throw SchemaError(row, "wrong number of columns");
    MeasuredPeak p;
    p.nu_mhz = parse_double(f[0], row + ".nu_mhz");
    p.fwhm_mhz = parse_double(f[1], row + ".fwhm_mhz");
    p.amplitude = parse_double(f[2], row + ".amplitude");
    if (!std::isfinite(p.nu_mhz)) throw SchemaError(row + ".nu_mhz", "must be finite");
    out.push_back(p);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  if (!fs::is_directory(dir))
    throw IoError("output directory '" + dir.string() + "' does not exist");
  const fs::path tmp =
      dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("error writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw IoError("cannot move output into '" + path.string() + "': " + ec.message());
  }
}

}  // namespace nvdpt
