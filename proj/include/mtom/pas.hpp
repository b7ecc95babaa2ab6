#pragma once

#include <cstdint>
#include <vector>

#include "mtom/channel.hpp"
#include "mtom/constellation.hpp"

namespace mtom {

// Maxwell-Boltzmann pmf p_i ~ exp(-nu |x_i|^2) over a constellation's points
// (evaluated on the grid as given, before any pmf-power renormalization).
struct MBPmf {
  double nu = 0.0;
  std::vector<double> probs;
  double entropy = 0.0;  // bits
};

MBPmf mb_pmf(const Constellation& c, double nu);

// Bisection on nu until |H - h_target| < 1e-6 bits.
MBPmf mb_for_entropy(const Constellation& c, double h_target);

// Rescales the points to unit average power under the pmf.
Constellation renormalize_power(const Constellation& c, const std::vector<double>& pmf);

// Idealized PAS net rate H(X) - m (1 - R).
double pas_net_rate(double h_bits, int m, double fec_rate);

// i.i.d. point indices from the pmf, deterministic per seed.
std::vector<int> sample_pmf(const MBPmf& pmf, long long n, std::uint64_t seed);

struct PasSweepRow {
  double h = 0.0;
  double nu = 0.0;
  double net_rate = 0.0;
  double air = 0.0;
  double snr_db = 0.0;
  bool feasible = false;
};

// For each entropy target: build the MB pmf, renormalize power, evaluate the
// PAS achievable rate on the link (the NLI variance uses pmf moments).
std::vector<PasSweepRow> pas_sweep(const Constellation& c, const LinkModel& link,
                                   const std::vector<double>& h_grid, double fec_rate,
                                   long long n_symbols, int n_blocks, std::uint64_t seed,
                                   double feasible_margin = 0.0);

}  // namespace mtom
