#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace mtom {

using cplx = std::complex<double>;

struct LinkModel;

// 2-D constellation with a fixed integer-to-bit labeling LUT. Labels are
// always bijective; coordinates may coincide (that is the many-to-one
// property). labels[i] holds the m-bit word of point i, printed bit order
// position 0 first, i.e. bit p of point i is (labels[i] >> (m-1-p)) & 1.
struct Constellation {
  int m = 0;
  std::vector<cplx> points;
  std::vector<std::uint32_t> labels;

  int size() const { return 1 << m; }
  int label_bit(int index, int pos) const {
    return static_cast<int>((labels[static_cast<std::size_t>(index)] >> (m - 1 - pos)) & 1u);
  }
};

// First-quadrant representative set used by the optimizer. Index j is the
// (m-2)-bit word left after removing the two sign bits from the full label.
struct QuadrantSet {
  int m = 0;
  std::vector<cplx> reduced_points;
  std::pair<int, int> sign_positions{0, 0};  // label positions of the Re / Im sign bits

  int size() const { return 1 << (m - 2); }
};

// Label positions sorted most reliable first (per-position MI, descending;
// ties go to the lower position index).
struct ReliabilityOrder {
  std::vector<int> order;
};

struct Moments {
  double mu2 = 0.0;
  double mu4 = 0.0;
  double mu6 = 0.0;
  double papr = 0.0;
};

// Conventional QAM with the standard labeling: even m is the product of two
// BRGC PAMs (I bits first, MSB first), odd m (5 or 7) is a cross constellation
// labeled by folding a Gray-labeled rectangle, shipped as LUT files under
// data/ as well. m=2 is QPSK.
Constellation brgc_qam(int m);

Constellation normalize_power(const Constellation& c);
QuadrantSet normalize_power(const QuadrantSet& q);

// Label positions carrying the Re/Im signs for brgc_qam(m).
std::pair<int, int> default_sign_positions(int m);

// Full m-bit label from an (m-2)-bit reduced word plus the two sign bits
// (bit = 1 encodes a positive part).
std::uint32_t compose_quadrant_label(std::uint32_t reduced, int m,
                                     std::pair<int, int> sign_positions, int s_re, int s_im);

Constellation expand_quadrant(const QuadrantSet& q, std::pair<int, int> sign_positions);
QuadrantSet reduce_quadrant(const Constellation& c, std::pair<int, int> sign_positions);

// mu_k = sum_i p_i |x_i|^k, papr = max_i |x_i|^2 / mu2. pmf defaults to
// uniform; must be non-negative and sum to 1 within 1e-9.
Moments moments(const Constellation& c, const std::vector<double>* pmf = nullptr);

// Monte Carlo per-position MI ranking at the link's effective noise variance.
ReliabilityOrder reliability_order(const Constellation& c, const LinkModel& link, int n_mc,
                                   std::uint64_t seed);

// Groups of point indices lying within `threshold` of each other (single-link
// clustering), used to report MTOM merge groups.
std::vector<std::vector<int>> merge_groups(const Constellation& c, double threshold = 1e-2);

}  // namespace mtom
