#include "mtom/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mtom {

namespace {

constexpr int kConstellationFormatVersion = 1;

std::string label_string(std::uint32_t label, int m) {
  std::string s(static_cast<std::size_t>(m), '0');
  for (int p = 0; p < m; ++p)
    if ((label >> (m - 1 - p)) & 1u) s[static_cast<std::size_t>(p)] = '1';
  return s;
}

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

}  // namespace

std::string format_g17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_constellation_file(const std::string& path, const Constellation& c,
                              const std::vector<double>* pmf) {
  if (pmf != nullptr && pmf->size() != c.points.size())
    throw std::invalid_argument("constellation file: pmf size mismatch");
  const Moments mo = moments(c);
  std::ostringstream out;
  out << "mtomshape-constellation\n";
  out << "format_version " << kConstellationFormatVersion << "\n";
  out << "m " << c.m << "\n";
  out << "power_normalized " << (std::abs(mo.mu2 - 1.0) < 1e-9 ? 1 : 0) << "\n";
  out << "has_pmf " << (pmf != nullptr ? 1 : 0) << "\n";
  for (int i = 0; i < c.size(); ++i) {
    out << i << " " << label_string(c.labels[static_cast<std::size_t>(i)], c.m) << " "
        << format_g17(c.points[static_cast<std::size_t>(i)].real()) << " "
        << format_g17(c.points[static_cast<std::size_t>(i)].imag());
    if (pmf != nullptr) out << " " << format_g17((*pmf)[static_cast<std::size_t>(i)]);
    out << "\n";
  }
  write_text_file(path, out.str());
}

ConstellationFile read_constellation_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "mtomshape-constellation")
    parse_fail(path, "not a constellation file");
  int version = 0, m = 0, normalized = 0, has_pmf = 0;
  std::string key;
  for (int h = 0; h < 4; ++h) {
    if (!std::getline(in, line)) parse_fail(path, "truncated header");
    std::istringstream ls(line);
    int value;
    if (!(ls >> key >> value)) parse_fail(path, "bad header line: " + line);
    if (key == "format_version")
      version = value;
    else if (key == "m")
      m = value;
    else if (key == "power_normalized")
      normalized = value;
    else if (key == "has_pmf")
      has_pmf = value;
    else
      parse_fail(path, "unknown header key: " + key);
  }
  if (version != kConstellationFormatVersion) parse_fail(path, "unsupported format version");
  if (m < 2 || m > 20) parse_fail(path, "bad modulation order");
  ConstellationFile cf;
  cf.constellation.m = m;
  const int n = 1 << m;
  cf.constellation.points.resize(static_cast<std::size_t>(n));
  cf.constellation.labels.resize(static_cast<std::size_t>(n));
  if (has_pmf) cf.pmf.resize(static_cast<std::size_t>(n));
  cf.power_normalized = normalized != 0;
  std::vector<bool> seen_index(static_cast<std::size_t>(n), false);
  std::vector<bool> seen_label(static_cast<std::size_t>(n), false);
  for (int r = 0; r < n; ++r) {
    if (!std::getline(in, line)) parse_fail(path, "truncated records");
    std::istringstream ls(line);
    int index;
    std::string bits;
    double re, im;
    if (!(ls >> index >> bits >> re >> im)) parse_fail(path, "bad record: " + line);
    if (index < 0 || index >= n || seen_index[static_cast<std::size_t>(index)])
      parse_fail(path, "bad or duplicate index: " + line);
    if (static_cast<int>(bits.size()) != m) parse_fail(path, "label length mismatch: " + line);
    std::uint32_t label = 0;
    for (char ch : bits) {
      if (ch != '0' && ch != '1') parse_fail(path, "bad label bits: " + line);
      label = (label << 1) | static_cast<std::uint32_t>(ch - '0');
    }
    if (seen_label[static_cast<std::size_t>(label)]) parse_fail(path, "duplicate label: " + line);
    seen_index[static_cast<std::size_t>(index)] = true;
    seen_label[static_cast<std::size_t>(label)] = true;
    cf.constellation.points[static_cast<std::size_t>(index)] = cplx(re, im);
    cf.constellation.labels[static_cast<std::size_t>(index)] = label;
    if (has_pmf) {
      double p;
      if (!(ls >> p)) parse_fail(path, "missing pmf column: " + line);
      cf.pmf[static_cast<std::size_t>(index)] = p;
    }
  }
  return cf;
}

void write_link_config(const std::string& path, const LinkModel& link, bool include_nli) {
  std::ostringstream out;
  out << "alpha_db_per_km " << format_g17(link.fiber.alpha_db_per_km) << "\n";
  out << "dispersion_ps_nm_km " << format_g17(link.fiber.dispersion_ps_nm_km) << "\n";
  out << "gamma_per_w_km " << format_g17(link.fiber.gamma_per_w_km) << "\n";
  out << "span_length_km " << format_g17(link.fiber.span_length_km) << "\n";
  out << "n_spans " << link.fiber.n_spans << "\n";
  out << "amp_nf_db " << format_g17(link.fiber.amp_nf_db) << "\n";
  out << "center_frequency_thz " << format_g17(link.fiber.center_frequency_thz) << "\n";
  out << "n_channels " << link.fiber.n_channels << "\n";
  out << "symbol_rate_gbd " << format_g17(link.fiber.symbol_rate_gbd) << "\n";
  out << "channel_spacing_ghz " << format_g17(link.fiber.channel_spacing_ghz) << "\n";
  out << "snr_trx_db " << (std::isfinite(link.trx.snr_trx_db) ? format_g17(link.trx.snr_trx_db) : "inf") << "\n";
  out << "n_qbits " << link.trx.n_qbits << "\n";
  out << "headroom " << format_g17(link.trx.headroom) << "\n";
  out << "launch_power_dbm " << format_g17(link.launch_power_dbm) << "\n";
  if (include_nli) {
    out << "[nli]\n";
    out << "c0 " << format_g17(link.nli.c0) << "\n";
    out << "c1 " << format_g17(link.nli.c1) << "\n";
    out << "c2 " << format_g17(link.nli.c2) << "\n";
  }
  write_text_file(path, out.str());
}

LinkModel read_link_config(const std::string& path) {
  std::istringstream in(read_text_file(path));
  LinkModel link;
  bool nli_section = false;
  bool have_nli = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "[nli]") {
      nli_section = true;
      continue;
    }
    std::istringstream ls(line);
    std::string key, value;
    if (!(ls >> key >> value)) parse_fail(path, "bad config line: " + line);
    const double v = value == "inf" ? std::numeric_limits<double>::infinity() : std::stod(value);
    if (nli_section) {
      have_nli = true;
      if (key == "c0")
        link.nli.c0 = v;
      else if (key == "c1")
        link.nli.c1 = v;
      else if (key == "c2")
        link.nli.c2 = v;
      else
        parse_fail(path, "unknown nli key: " + key);
      continue;
    }
    if (key == "alpha_db_per_km")
      link.fiber.alpha_db_per_km = v;
    else if (key == "dispersion_ps_nm_km")
      link.fiber.dispersion_ps_nm_km = v;
    else if (key == "gamma_per_w_km")
      link.fiber.gamma_per_w_km = v;
    else if (key == "span_length_km")
      link.fiber.span_length_km = v;
    else if (key == "n_spans")
      link.fiber.n_spans = static_cast<int>(v);
    else if (key == "amp_nf_db")
      link.fiber.amp_nf_db = v;
    else if (key == "center_frequency_thz")
      link.fiber.center_frequency_thz = v;
    else if (key == "n_channels")
      link.fiber.n_channels = static_cast<int>(v);
    else if (key == "symbol_rate_gbd")
      link.fiber.symbol_rate_gbd = v;
    else if (key == "channel_spacing_ghz")
      link.fiber.channel_spacing_ghz = v;
    else if (key == "snr_trx_db")
      link.trx.snr_trx_db = v;
    else if (key == "n_qbits")
      link.trx.n_qbits = static_cast<int>(v);
    else if (key == "headroom")
      link.trx.headroom = v;
    else if (key == "launch_power_dbm")
      link.launch_power_dbm = v;
    else
      parse_fail(path, "unknown config key: " + key);
  }
  link.fiber.validate();
  link.trx.validate();
  if (!have_nli && link.fiber.n_spans > 0) link.nli = gn_default_coeffs(link.fiber);
  return link;
}

void write_snr_grid_csv(const std::string& path, const std::vector<SnrMeasurement>& records) {
  std::ostringstream out;
  out << "distance_km,power_dbm,snr_db\n";
  for (const auto& r : records)
    out << format_g17(r.distance_km) << "," << format_g17(r.power_dbm) << ","
        << format_g17(r.snr_db) << "\n";
  write_text_file(path, out.str());
}

std::vector<SnrMeasurement> read_snr_grid_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) parse_fail(path, "empty grid csv");
  if (line != "distance_km,power_dbm,snr_db") parse_fail(path, "unexpected csv header: " + line);
  std::vector<SnrMeasurement> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SnrMeasurement rec;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &rec.distance_km, &rec.power_dbm, &rec.snr_db) != 3)
      parse_fail(path, "bad csv row: " + line);
    out.push_back(rec);
  }
  return out;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

std::string file_digest(const std::string& path) { return fnv1a_hex(read_text_file(path)); }

}  // namespace mtom
