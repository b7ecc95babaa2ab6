#pragma once

#include <cstdint>
#include <vector>

#include "mtom/channel.hpp"
#include "mtom/constellation.hpp"

namespace mtom {

// Mismatched-Gaussian demapper settings: p(y|x) ~ exp(-|y-x|^2 / noise_variance),
// optionally weighted by a prior over point indices (uniform when null).
struct DemapperConfig {
  double noise_variance = 0.0;
  const std::vector<double>* prior = nullptr;
};

double entropy_bits(const std::vector<double>& probs);

// LLR(k,p) = log p(u_p=0|y_k) - log p(u_p=1|y_k), row-major n x m,
// exact log-sum-exp over all points.
std::vector<double> bit_llrs(const Constellation& c, const std::vector<cplx>& y,
                             const DemapperConfig& cfg);

// Raw accumulation of per-symbol log2 posteriors of the transmitted bits,
// mergeable across blocks in a fixed order.
struct BitStats {
  int m = 0;
  long long n = 0;
  std::vector<double> sum_logp;   // per label position, sum of log2 p(u_p|y)
  std::vector<double> sum_prod;   // m x m, sums of products for the covariance
  std::vector<double> bit_one_mass;  // prior mass of bit=1 per position (for H(u_p))

  explicit BitStats(int m_ = 0)
      : m(m_), sum_logp(static_cast<std::size_t>(m_), 0.0),
        sum_prod(static_cast<std::size_t>(m_) * m_, 0.0),
        bit_one_mass(static_cast<std::size_t>(m_), 0.0) {}
  void merge(const BitStats& other);
  std::vector<double> mean_logp() const;
  // Covariance of the per-symbol vector (log2 p(u_1|y), ..., log2 p(u_m|y)).
  std::vector<double> covariance() const;
};

BitStats demap_bit_stats(const Constellation& c, const std::vector<int>& x_indices,
                         const std::vector<cplx>& y, const DemapperConfig& cfg);

// MI_p = H(u_p) + E[log2 p(u_p|y)] per label position, reported unclamped
// (slightly negative Monte Carlo estimates are possible under mismatch).
std::vector<double> per_bit_mi(const Constellation& c, const std::vector<int>& x_indices,
                               const std::vector<cplx>& y, const DemapperConfig& cfg);

// AIR of the MTOM scheme with the dummy positions discarded. bce_ordered[i] is
// E[log2 p(u|y)] of the (i+1)-th most reliable position.
double air_mtom(const std::vector<double>& bce_ordered, double n_d, int m);

// Time-sharing AIR: fraction (n_d - floor) on the ceil-optimized constellation
// and (ceil - n_d) on the floor-optimized one; integer n_d degenerates to the
// single constellation.
double air_th(const std::vector<double>& bce_low_ordered, const std::vector<double>& bce_high_ordered,
              double n_d, int m);

// PAS achievable rate H(X) - sum_p BCE_p with prior-weighted posteriors.
double air_pas(const std::vector<double>& pmf, const Constellation& c,
               const std::vector<int>& x_indices, const std::vector<cplx>& y,
               const DemapperConfig& cfg);

// One Monte Carlo sampling pass over (constellation, link), reusable across
// n_d values: per-position posterior means, their covariance, and the
// reliability ranking measured on the same samples.
struct AirEvaluation {
  int m = 0;
  long long n = 0;
  std::vector<double> mean_logp;  // per label position, E[log2 p(u_p|y)]
  std::vector<double> cov;        // m x m covariance of the per-symbol vector
  std::vector<double> per_bit_mi;
  ReliabilityOrder order;
  double prior_entropy = 0.0;

  double air_at(double n_d) const;
  double halfwidth_at(double n_d) const;  // 95% normal approximation
  double gmi() const;                     // n_d = 0 reduction, uniform-prior normalization
  double pas_rate() const;                // prior_entropy - sum of BCEs
};

AirEvaluation evaluate_bits_mc(const Constellation& c, const LinkModel& link, long long n_symbols,
                               int n_blocks, std::uint64_t seed,
                               const std::vector<double>* pmf = nullptr);

struct AirReport {
  int m = 0;
  double n_d = 0.0;
  std::vector<double> per_bit_mi;  // by label position
  ReliabilityOrder order;          // computed on the evaluation samples
  double gmi = 0.0;                // n_d = 0 reduction
  double air_mtom = 0.0;
  double air_pas = 0.0;            // H(X) - sum BCE (equals gmi for a uniform prior)
  double confidence_halfwidth = 0.0;  // 95% normal approximation on air_mtom
  long long n_symbols = 0;
  std::uint64_t seed = 0;
};

// End-to-end Monte Carlo AIR estimate: draw symbols (uniform or pmf), push them
// through the link, demap with the Eq-style mismatched variance
// sigma2_awgn + q_variance, and assemble the report. Work is sharded into
// n_blocks with per-block derived seeds and merged in block order, so results
// do not depend on the worker count.
AirReport evaluate_air(const Constellation& c, const LinkModel& link, double n_d,
                       long long n_symbols, int n_blocks, std::uint64_t seed,
                       const std::vector<double>* pmf = nullptr);

// Reliability ranking from per-position MI values (descending, ties to the
// lower label position).
ReliabilityOrder rank_positions(const std::vector<double>& mi);

}  // namespace mtom
