#include "mtom/rate_plan.hpp"

#include <cmath>
#include <stdexcept>

#include "mtom/rng.hpp"

namespace mtom {

void RatePlan::validate() const {
  if (K <= 0 || N <= 0 || K > N) throw std::invalid_argument("rate plan: need 0 < K <= N");
  if (m < 2) throw std::invalid_argument("rate plan: m must be >= 2");
  if (N_D < 0) throw std::invalid_argument("rate plan: N_D must be >= 0");
  if ((N + N_D) % m != 0) throw std::invalid_argument("rate plan: (N + N_D) not divisible by m");
  const Rational nd = n_d();
  if (Rational(m - 2) < nd)
    throw std::invalid_argument("rate plan: n_d > m - 2 (sign bits cannot carry dummies)");
}

RatePlan plan_for_target(long long K, long long N, int m, double eta_target) {
  if (!(eta_target > 0.0)) throw std::invalid_argument("plan: eta_target must be > 0");
  const double eta_max = static_cast<double>(K) * m / static_cast<double>(N);
  if (eta_target > eta_max + 1e-12)
    throw std::invalid_argument("plan: eta_target exceeds R*m");
  const double raw = static_cast<double>(K) * m / eta_target - static_cast<double>(N);
  // N_D must satisfy (N + N_D) % m == 0: an arithmetic progression with step m.
  const long long r = ((m - N % m) % m);
  long long k = static_cast<long long>(std::floor((raw - static_cast<double>(r)) / m));
  long long best = -1;
  double best_dist = 0.0;
  for (long long kk = k; kk <= k + 1; ++kk) {
    const long long cand = r + kk * m;
    if (cand < 0) continue;
    const double d = std::abs(static_cast<double>(cand) - raw);
    if (best < 0 || d < best_dist) best = cand, best_dist = d;
  }
  if (best < 0) best = r;  // raw below zero: smallest aligned N_D
  RatePlan plan{K, N, m, best};
  plan.validate();
  return plan;
}

std::vector<RateStepRow> rate_step_table(long long K, long long N, int m, double nd_max) {
  if (nd_max < 0.0) throw std::invalid_argument("rate table: nd_max must be >= 0");
  std::vector<RateStepRow> rows;
  for (long long nd_bits = 0;; ++nd_bits) {
    const Rational nd(static_cast<std::int64_t>(m) * nd_bits, N + nd_bits);
    if (static_cast<double>(nd.num) > nd_max * static_cast<double>(nd.den)) break;
    RateStepRow row;
    row.N_D = nd_bits;
    row.eta = Rational(K * m, N + nd_bits);
    row.eta_step = Rational(K * m, (N + nd_bits) * (N + nd_bits + 1));
    rows.push_back(row);
  }
  return rows;
}

namespace {

struct LayoutCounts {
  int ceil_nd = 0;
  long long shared_coded = 0;  // coded slots on the shared rank (0 if integer n_d)
  bool fractional = false;
};

LayoutCounts layout_counts(const RatePlan& plan) {
  LayoutCounts lc;
  const long long total = plan.N + plan.N_D;
  const long long num = static_cast<long long>(plan.m) * plan.N_D;  // n_d = num/total
  lc.ceil_nd = static_cast<int>((num + total - 1) / total);
  lc.fractional = (num % total) != 0;
  if (lc.fractional) {
    lc.shared_coded = plan.N - (plan.m - lc.ceil_nd) * plan.n_symbols();
  }
  return lc;
}

}  // namespace

long long FrameLayout::coded_slots() const {
  long long n = 0;
  for (long long s : slot_source)
    if (s >= 0) ++n;
  return n;
}

long long FrameLayout::dummy_slots() const {
  return static_cast<long long>(slot_source.size()) - coded_slots();
}

FrameLayout frame_layout(const RatePlan& plan, const ReliabilityOrder& order) {
  plan.validate();
  if (static_cast<int>(order.order.size()) != plan.m)
    throw std::invalid_argument("frame layout: reliability order has wrong length");
  const LayoutCounts lc = layout_counts(plan);
  FrameLayout fl;
  fl.n_symbols = plan.n_symbols();
  fl.m = plan.m;
  fl.rank_to_position = order.order;
  fl.slot_source.assign(static_cast<std::size_t>(fl.n_symbols) * plan.m, -1);
  fl.shared_rank = lc.fractional ? plan.m - lc.ceil_nd : -1;
  fl.shared_coded_symbols = lc.shared_coded;
  long long next = 0;
  for (long long sym = 0; sym < fl.n_symbols; ++sym) {
    for (int rank = 0; rank < plan.m; ++rank) {
      const bool coded = rank < plan.m - lc.ceil_nd ||
                         (lc.fractional && rank == fl.shared_rank && sym < lc.shared_coded);
      if (coded) fl.slot_source[static_cast<std::size_t>(sym) * plan.m + rank] = next++;
    }
  }
  if (next != plan.N) throw std::logic_error("frame layout: coded slot count mismatch");
  return fl;
}

std::vector<std::uint32_t> mux_frame(const std::vector<std::uint8_t>& coded_bits, DummyFill fill,
                                     std::uint64_t fill_seed, const RatePlan& plan,
                                     const ReliabilityOrder& order) {
  if (static_cast<long long>(coded_bits.size()) != plan.N)
    throw std::invalid_argument("mux_frame: expected exactly N coded bits");
  const FrameLayout fl = frame_layout(plan, order);
  Rng rng(fill_seed);
  std::vector<std::uint32_t> words(static_cast<std::size_t>(fl.n_symbols), 0);
  for (long long sym = 0; sym < fl.n_symbols; ++sym) {
    std::uint32_t w = 0;
    for (int rank = 0; rank < plan.m; ++rank) {
      const long long src = fl.slot_source[static_cast<std::size_t>(sym) * plan.m + rank];
      int bit;
      if (src >= 0)
        bit = coded_bits[static_cast<std::size_t>(src)] ? 1 : 0;
      else
        bit = fill == DummyFill::Zeros ? 0 : static_cast<int>(rng.next_u64() & 1u);
      const int pos = fl.rank_to_position[static_cast<std::size_t>(rank)];
      w |= static_cast<std::uint32_t>(bit) << (plan.m - 1 - pos);
    }
    words[static_cast<std::size_t>(sym)] = w;
  }
  return words;
}

std::vector<double> demux_llrs(const std::vector<double>& llrs, const RatePlan& plan,
                               const ReliabilityOrder& order) {
  const FrameLayout fl = frame_layout(plan, order);
  if (static_cast<long long>(llrs.size()) != fl.n_symbols * plan.m)
    throw std::invalid_argument("demux_llrs: llr array shape mismatch");
  std::vector<double> out(static_cast<std::size_t>(plan.N));
  for (long long sym = 0; sym < fl.n_symbols; ++sym) {
    for (int rank = 0; rank < plan.m; ++rank) {
      const long long src = fl.slot_source[static_cast<std::size_t>(sym) * plan.m + rank];
      if (src < 0) continue;
      const int pos = fl.rank_to_position[static_cast<std::size_t>(rank)];
      out[static_cast<std::size_t>(src)] = llrs[static_cast<std::size_t>(sym) * plan.m + pos];
    }
  }
  return out;
}

}  // namespace mtom
