#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "mtom/io.hpp"
#include "mtom/pas.hpp"
#include "mtom/rng.hpp"

using namespace mtom;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("constellation files round-trip bit exactly") {
  Constellation c = brgc_qam(5);
  // perturb to non-trivial digits
  Rng rng(8);
  for (auto& p : c.points) p += cplx(rng.gaussian() * 1e-3, rng.gaussian() * 1e-3);
  c = normalize_power(c);
  const std::string path = temp_path("roundtrip.const");
  write_constellation_file(path, c);
  const ConstellationFile cf = read_constellation_file(path);
  CHECK(cf.constellation.m == 5);
  CHECK(cf.power_normalized);
  CHECK(cf.pmf.empty());
  for (int i = 0; i < c.size(); ++i) {
    CHECK(cf.constellation.points[static_cast<std::size_t>(i)] == c.points[static_cast<std::size_t>(i)]);
    CHECK(cf.constellation.labels[static_cast<std::size_t>(i)] == c.labels[static_cast<std::size_t>(i)]);
  }
  // writing the parsed copy reproduces the file byte for byte
  const std::string path2 = temp_path("roundtrip2.const");
  write_constellation_file(path2, cf.constellation);
  CHECK(read_text_file(path) == read_text_file(path2));
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("constellation files carry an optional pmf column") {
  const Constellation c = brgc_qam(4);
  const MBPmf pmf = mb_for_entropy(c, 3.2);
  const std::string path = temp_path("pmf.const");
  write_constellation_file(path, c, &pmf.probs);
  const ConstellationFile cf = read_constellation_file(path);
  REQUIRE(cf.pmf.size() == 16);
  for (std::size_t i = 0; i < 16; ++i) CHECK(cf.pmf[i] == pmf.probs[i]);
  std::remove(path.c_str());
}

TEST_CASE("corrupt constellation files are rejected") {
  const std::string path = temp_path("bad.const");
  write_text_file(path, "mtomshape-constellation\nformat_version 1\nm 2\npower_normalized 1\nhas_pmf 0\n"
                        "0 00 0.1 0.2\n0 01 0.3 0.4\n2 10 0.5 0.6\n3 11 0.7 0.8\n");
  CHECK_THROWS(read_constellation_file(path));  // duplicate index
  write_text_file(path, "not-a-constellation\n");
  CHECK_THROWS(read_constellation_file(path));
  std::remove(path.c_str());
}

TEST_CASE("link config round-trips including the nli override") {
  LinkModel l;
  l.fiber.alpha_db_per_km = 0.183;
  l.fiber.gamma_per_w_km = 0.986;
  l.fiber.dispersion_ps_nm_km = 22.0;
  l.fiber.n_spans = 15;
  l.fiber.amp_nf_db = 6.17;
  l.trx.snr_trx_db = 20.78;
  l.trx.n_qbits = 8;
  l.launch_power_dbm = 0.5;
  l.nli = NliCoeffs{123.456789012345678, 24.0, 2.4};
  const std::string path = temp_path("link.cfg");
  write_link_config(path, l, true);
  const LinkModel r = read_link_config(path);
  CHECK(r.fiber.alpha_db_per_km == l.fiber.alpha_db_per_km);
  CHECK(r.fiber.n_spans == 15);
  CHECK(r.trx.snr_trx_db == l.trx.snr_trx_db);
  CHECK(r.nli.c0 == l.nli.c0);
  CHECK(r.nli.c1 == l.nli.c1);

  // without the [nli] section the GN defaults kick in
  write_link_config(path, l, false);
  const LinkModel d = read_link_config(path);
  const NliCoeffs gn = gn_default_coeffs(d.fiber);
  CHECK(d.nli.c0 == gn.c0);
  std::remove(path.c_str());
}

TEST_CASE("snr grid csv round-trips") {
  std::vector<SnrMeasurement> recs = {{200.0, -0.9, 17.25}, {400.0, 0.1, 16.5}};
  const std::string path = temp_path("grid.csv");
  write_snr_grid_csv(path, recs);
  const auto back = read_snr_grid_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].distance_km == 200.0);
  CHECK(back[1].snr_db == 16.5);
  std::remove(path.c_str());
}

TEST_CASE("csv quoting and digests") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("abc") != fnv1a_hex("abd"));
}

}  // TEST_SUITE
