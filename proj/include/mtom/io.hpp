#pragma once

#include <string>
#include <vector>

#include "mtom/channel.hpp"
#include "mtom/constellation.hpp"
#include "mtom/fit.hpp"

namespace mtom {

// Doubles are written with 17 significant digits so round-trips are exact.
std::string format_g17(double v);

// Versioned text constellation format, the interchange contract between the
// CLI subcommands: header lines (format_version, m, power_normalized, has_pmf)
// followed by one record per point: index, label bits, re, im [, prob].
void write_constellation_file(const std::string& path, const Constellation& c,
                              const std::vector<double>* pmf = nullptr);

struct ConstellationFile {
  Constellation constellation;
  std::vector<double> pmf;  // empty unless has_pmf
  bool power_normalized = false;
};

ConstellationFile read_constellation_file(const std::string& path);

// Link configuration: "key value" lines with the units encoded in the key
// names, plus an optional [nli] section overriding the GN-model coefficients.
void write_link_config(const std::string& path, const LinkModel& link, bool include_nli);
LinkModel read_link_config(const std::string& path);

void write_snr_grid_csv(const std::string& path, const std::vector<SnrMeasurement>& records);
std::vector<SnrMeasurement> read_snr_grid_csv(const std::string& path);

// RFC-4180 style quoting for CSV fields.
std::string csv_field(const std::string& value);

// FNV-1a 64-bit content digest, hex encoded.
std::string fnv1a_hex(const std::string& bytes);
std::string file_digest(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace mtom
