#pragma once

#include <cstdint>
#include <vector>

#include "mtom/constellation.hpp"
#include "mtom/rational.hpp"

namespace mtom {

// Frame arithmetic for a fixed FEC (K info bits, N coded bits) carrying N_D
// dummy bits per frame on an m-bit constellation. All derived quantities are
// exact rationals; eta = R * (m - n_d) holds identically.
struct RatePlan {
  long long K = 0;
  long long N = 0;
  int m = 0;
  long long N_D = 0;

  Rational fec_rate() const { return Rational(K, N); }
  Rational n_d() const { return Rational(static_cast<std::int64_t>(m) * N_D, N + N_D); }
  Rational eta() const { return Rational(K * m, N + N_D); }
  long long n_symbols() const { return (N + N_D) / m; }

  void validate() const;
};

// Smallest-|N_D - ideal| plan hitting eta_target subject to frame alignment
// (N + N_D) % m == 0.
RatePlan plan_for_target(long long K, long long N, int m, double eta_target);

struct RateStepRow {
  long long N_D = 0;
  Rational eta;
  Rational eta_step;  // eta(N_D) - eta(N_D + 1)
};

// The rate/step table over all integer N_D with n_d <= nd_max.
std::vector<RateStepRow> rate_step_table(long long K, long long N, int m, double nd_max);

enum class DummyFill { Zeros, SeededRandom };

// Deterministic MUX layout. Slot (symbol, rank) is indexed by reliability rank
// (0 = most reliable). slot_source holds the coded-bit index or -1 for dummy.
struct FrameLayout {
  long long n_symbols = 0;
  int m = 0;
  std::vector<int> rank_to_position;   // from the reliability order
  std::vector<long long> slot_source;  // n_symbols * m
  long long shared_rank = -1;          // -1 when n_d is integer
  long long shared_coded_symbols = 0;  // first symbols whose shared slot is coded

  long long coded_slots() const;
  long long dummy_slots() const;
};

FrameLayout frame_layout(const RatePlan& plan, const ReliabilityOrder& order);

// Packs one codeword plus dummy bits onto n_symbols label words (constellation
// label convention: position 0 is the printed leftmost bit).
std::vector<std::uint32_t> mux_frame(const std::vector<std::uint8_t>& coded_bits, DummyFill fill,
                                     std::uint64_t fill_seed, const RatePlan& plan,
                                     const ReliabilityOrder& order);

// Drops dummy-position LLRs and returns coded LLRs in codeword order. llrs is
// row-major n_symbols x m indexed by label position.
std::vector<double> demux_llrs(const std::vector<double>& llrs, const RatePlan& plan,
                               const ReliabilityOrder& order);

}  // namespace mtom
