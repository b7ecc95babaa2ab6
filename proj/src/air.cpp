#include "mtom/air.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mtom/parallel.hpp"
#include "mtom/rng.hpp"

namespace mtom {

namespace {

constexpr double kLn2 = 0.6931471805599453;
// Floor keeps the noiseless limit well-defined: weights collapse to 0 / -inf
// and posteriors become exact indicators of the merged subsets.
constexpr double kSigma2Floor = 1e-300;

std::vector<double> log_prior_weights(const Constellation& c, const std::vector<double>* prior) {
  std::vector<double> lw(c.points.size(), 0.0);
  if (prior != nullptr) {
    if (prior->size() != c.points.size())
      throw std::invalid_argument("demapper: prior size mismatch");
    for (std::size_t t = 0; t < lw.size(); ++t)
      lw[t] = (*prior)[t] > 0.0 ? std::log((*prior)[t]) : -std::numeric_limits<double>::infinity();
  }
  return lw;
}

// Accumulates exp-weights of one received sample into den and per-position
// bit sums, all scaled by the common max weight.
struct SymbolDemap {
  double den = 0.0;
  double num1[32];  // bit = 1 subsets
  double wmax = 0.0;

  void run(const Constellation& c, const std::vector<double>& log_prior, double inv_sigma2,
           cplx y, std::vector<double>& w) {
    const std::size_t n = c.points.size();
    const int m = c.m;
    wmax = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double d = std::norm(y - c.points[t]);
      const double wt = log_prior[t] - d * inv_sigma2;
      w[t] = wt;
      if (wt > wmax) wmax = wt;
    }
    den = 0.0;
    std::fill(num1, num1 + m, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      // exp(-40) relative to the max weight is below double rounding of the
      // accumulated sums; skipping keeps the demapper exact in practice.
      if (w[t] - wmax < -40.0) continue;
      const double e = std::exp(w[t] - wmax);
      den += e;
      std::uint32_t lab = c.labels[t];
      while (lab) {
        const int p = m - 1 - __builtin_ctz(lab);
        num1[p] += e;
        lab &= lab - 1;
      }
    }
  }

  double log_posterior(int bit, int p) const {
    const double num = bit ? num1[p] : den - num1[p];
    return std::log(num) - std::log(den);
  }
};

}  // namespace

double entropy_bits(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

std::vector<double> bit_llrs(const Constellation& c, const std::vector<cplx>& y,
                             const DemapperConfig& cfg) {
  if (!(cfg.noise_variance >= 0.0)) throw std::invalid_argument("bit_llrs: negative noise variance");
  const double inv_sigma2 = 1.0 / std::max(cfg.noise_variance, kSigma2Floor);
  const std::vector<double> lp = log_prior_weights(c, cfg.prior);
  std::vector<double> w(c.points.size());
  std::vector<double> out(y.size() * static_cast<std::size_t>(c.m));
  SymbolDemap d;
  for (std::size_t k = 0; k < y.size(); ++k) {
    d.run(c, lp, inv_sigma2, y[k], w);
    for (int p = 0; p < c.m; ++p)
      out[k * c.m + static_cast<std::size_t>(p)] =
          std::log(d.den - d.num1[p]) - std::log(d.num1[p]);
  }
  return out;
}

void BitStats::merge(const BitStats& other) {
  if (m != other.m) throw std::invalid_argument("BitStats: position count mismatch");
  n += other.n;
  for (std::size_t i = 0; i < sum_logp.size(); ++i) sum_logp[i] += other.sum_logp[i];
  for (std::size_t i = 0; i < sum_prod.size(); ++i) sum_prod[i] += other.sum_prod[i];
  bit_one_mass = other.bit_one_mass;
}

std::vector<double> BitStats::mean_logp() const {
  std::vector<double> out(sum_logp.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sum_logp[i] / static_cast<double>(n);
  return out;
}

std::vector<double> BitStats::covariance() const {
  const auto mean = mean_logp();
  std::vector<double> cov(sum_prod.size());
  const double nn = static_cast<double>(n);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      const std::size_t i = static_cast<std::size_t>(p) * m + q;
      cov[i] = (sum_prod[i] / nn - mean[static_cast<std::size_t>(p)] * mean[static_cast<std::size_t>(q)]) *
               nn / std::max(nn - 1.0, 1.0);
    }
  return cov;
}

BitStats demap_bit_stats(const Constellation& c, const std::vector<int>& x_indices,
                         const std::vector<cplx>& y, const DemapperConfig& cfg) {
  if (x_indices.size() != y.size())
    throw std::invalid_argument("demap_bit_stats: index/sample count mismatch");
  const double inv_sigma2 = 1.0 / std::max(cfg.noise_variance, kSigma2Floor);
  const std::vector<double> lp = log_prior_weights(c, cfg.prior);
  BitStats stats(c.m);
  stats.n = static_cast<long long>(y.size());
  // Prior mass of bit = 1 per position (exact, not sampled).
  for (std::size_t t = 0; t < c.points.size(); ++t) {
    const double pw = cfg.prior ? (*cfg.prior)[t] : 1.0 / static_cast<double>(c.points.size());
    for (int p = 0; p < c.m; ++p)
      if ((c.labels[t] >> (c.m - 1 - p)) & 1u) stats.bit_one_mass[static_cast<std::size_t>(p)] += pw;
  }
  std::vector<double> w(c.points.size());
  double v[32];
  SymbolDemap d;
  for (std::size_t k = 0; k < y.size(); ++k) {
    d.run(c, lp, inv_sigma2, y[k], w);
    const std::uint32_t lab = c.labels[static_cast<std::size_t>(x_indices[k])];
    for (int p = 0; p < c.m; ++p) {
      const int bit = static_cast<int>((lab >> (c.m - 1 - p)) & 1u);
      v[p] = d.log_posterior(bit, p) / kLn2;
      stats.sum_logp[static_cast<std::size_t>(p)] += v[p];
    }
    for (int p = 0; p < c.m; ++p)
      for (int q = 0; q < c.m; ++q)
        stats.sum_prod[static_cast<std::size_t>(p) * c.m + q] += v[p] * v[q];
  }
  return stats;
}

std::vector<double> per_bit_mi(const Constellation& c, const std::vector<int>& x_indices,
                               const std::vector<cplx>& y, const DemapperConfig& cfg) {
  const BitStats stats = demap_bit_stats(c, x_indices, y, cfg);
  const auto mean = stats.mean_logp();
  std::vector<double> mi(static_cast<std::size_t>(c.m));
  for (int p = 0; p < c.m; ++p) {
    const double q = stats.bit_one_mass[static_cast<std::size_t>(p)];
    const double h = entropy_bits({q, 1.0 - q});
    mi[static_cast<std::size_t>(p)] = h + mean[static_cast<std::size_t>(p)];
  }
  return mi;
}

ReliabilityOrder rank_positions(const std::vector<double>& mi) {
  ReliabilityOrder ro;
  ro.order.resize(mi.size());
  std::iota(ro.order.begin(), ro.order.end(), 0);
  std::stable_sort(ro.order.begin(), ro.order.end(), [&](int a, int b) {
    return mi[static_cast<std::size_t>(a)] > mi[static_cast<std::size_t>(b)];
  });
  return ro;
}

double air_mtom(const std::vector<double>& bce_ordered, double n_d, int m) {
  if (n_d < 0.0 || n_d > m - 2)
    throw std::invalid_argument("air_mtom: n_d outside [0, m-2]");
  if (static_cast<int>(bce_ordered.size()) != m)
    throw std::invalid_argument("air_mtom: expected one BCE term per label position");
  const int ceil_nd = static_cast<int>(std::ceil(n_d));
  const int floor_nd = static_cast<int>(std::floor(n_d));
  double air = m - ceil_nd;
  for (int i = 0; i < m - ceil_nd; ++i) air += bce_ordered[static_cast<std::size_t>(i)];
  if (ceil_nd != floor_nd)
    air += (ceil_nd - n_d) * (1.0 + bce_ordered[static_cast<std::size_t>(m - floor_nd - 1)]);
  return air;
}

double air_th(const std::vector<double>& bce_low_ordered, const std::vector<double>& bce_high_ordered,
              double n_d, int m) {
  if (static_cast<int>(bce_low_ordered.size()) != m || static_cast<int>(bce_high_ordered.size()) != m)
    throw std::invalid_argument("air_th: constellation order mismatch");
  const double frac = n_d - std::floor(n_d);
  if (frac == 0.0) return air_mtom(bce_low_ordered, n_d, m);
  const int ceil_nd = static_cast<int>(std::ceil(n_d));
  const int floor_nd = static_cast<int>(std::floor(n_d));
  double air_hi = m - ceil_nd;
  for (int i = 0; i < m - ceil_nd; ++i) air_hi += bce_high_ordered[static_cast<std::size_t>(i)];
  double air_lo = m - floor_nd;
  for (int i = 0; i < m - floor_nd; ++i) air_lo += bce_low_ordered[static_cast<std::size_t>(i)];
  return frac * air_hi + (1.0 - frac) * air_lo;
}

double air_pas(const std::vector<double>& pmf, const Constellation& c,
               const std::vector<int>& x_indices, const std::vector<cplx>& y,
               const DemapperConfig& cfg) {
  if (cfg.prior == nullptr || *cfg.prior != pmf)
    throw std::invalid_argument("air_pas: demapper prior must equal the source pmf");
  const BitStats stats = demap_bit_stats(c, x_indices, y, cfg);
  const auto mean = stats.mean_logp();
  return entropy_bits(pmf) + std::accumulate(mean.begin(), mean.end(), 0.0);
}

namespace {

std::vector<int> draw_indices(int n_points, const std::vector<double>* pmf, long long n, Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  if (pmf == nullptr) {
    for (auto& i : idx) i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_points)));
    return idx;
  }
  std::vector<double> cdf(pmf->size());
  std::partial_sum(pmf->begin(), pmf->end(), cdf.begin());
  cdf.back() = 1.0;
  for (auto& i : idx) {
    const double u = rng.uniform();
    i = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  }
  return idx;
}

}  // namespace

AirEvaluation evaluate_bits_mc(const Constellation& c, const LinkModel& link, long long n_symbols,
                               int n_blocks, std::uint64_t seed, const std::vector<double>* pmf) {
  if (n_symbols < 1) throw std::invalid_argument("evaluate_bits_mc: need at least one symbol");
  if (n_blocks < 1) n_blocks = 1;

  const Moments mo = moments(c, pmf);
  const EffectiveSnr snr = effective_snr(link, mo.mu4, mo.mu6);
  const QuantizerSpec q = quantizer_spec(c, link.trx);
  DemapperConfig cfg;
  cfg.noise_variance = snr.sigma2_awgn + q.q_variance;
  cfg.prior = pmf;

  std::vector<BitStats> block_stats(static_cast<std::size_t>(n_blocks), BitStats(c.m));
  const long long base = n_symbols / n_blocks;
  const long long rem = n_symbols % n_blocks;
  parallel_for_blocks(static_cast<std::size_t>(n_blocks), [&](std::size_t b) {
    const long long nb = base + (static_cast<long long>(b) < rem ? 1 : 0);
    if (nb == 0) return;
    Rng rng(mix_seed(seed, 2 * b));
    const std::vector<int> idx = draw_indices(c.size(), pmf, nb, rng);
    const std::vector<cplx> y = simulate(link, c, idx, mix_seed(seed, 2 * b + 1), pmf);
    block_stats[b] = demap_bit_stats(c, idx, y, cfg);
  });
  BitStats total(c.m);
  total.bit_one_mass = block_stats.front().bit_one_mass;
  for (const auto& s : block_stats)
    if (s.n > 0) total.merge(s);

  AirEvaluation ev;
  ev.m = c.m;
  ev.n = total.n;
  ev.mean_logp = total.mean_logp();
  ev.cov = total.covariance();
  ev.prior_entropy = pmf != nullptr ? entropy_bits(*pmf) : static_cast<double>(c.m);
  ev.per_bit_mi.resize(static_cast<std::size_t>(c.m));
  for (int p = 0; p < c.m; ++p) {
    const double q1 = total.bit_one_mass[static_cast<std::size_t>(p)];
    ev.per_bit_mi[static_cast<std::size_t>(p)] =
        entropy_bits({q1, 1.0 - q1}) + ev.mean_logp[static_cast<std::size_t>(p)];
  }
  ev.order = rank_positions(ev.per_bit_mi);
  return ev;
}

double AirEvaluation::air_at(double n_d) const {
  std::vector<double> bce(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    bce[static_cast<std::size_t>(i)] = mean_logp[static_cast<std::size_t>(order.order[static_cast<std::size_t>(i)])];
  return air_mtom(bce, n_d, m);
}

double AirEvaluation::halfwidth_at(double n_d) const {
  std::vector<double> coeff(static_cast<std::size_t>(m), 0.0);
  const int ceil_nd = static_cast<int>(std::ceil(n_d));
  const int floor_nd = static_cast<int>(std::floor(n_d));
  for (int i = 0; i < m - ceil_nd; ++i)
    coeff[static_cast<std::size_t>(order.order[static_cast<std::size_t>(i)])] = 1.0;
  if (ceil_nd != floor_nd)
    coeff[static_cast<std::size_t>(order.order[static_cast<std::size_t>(m - floor_nd - 1)])] = ceil_nd - n_d;
  double var = 0.0;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      var += coeff[static_cast<std::size_t>(p)] * coeff[static_cast<std::size_t>(q)] *
             cov[static_cast<std::size_t>(p) * m + q];
  return 1.96 * std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
}

double AirEvaluation::gmi() const {
  return m + std::accumulate(mean_logp.begin(), mean_logp.end(), 0.0);
}

double AirEvaluation::pas_rate() const {
  return prior_entropy + std::accumulate(mean_logp.begin(), mean_logp.end(), 0.0);
}

AirReport evaluate_air(const Constellation& c, const LinkModel& link, double n_d,
                       long long n_symbols, int n_blocks, std::uint64_t seed,
                       const std::vector<double>* pmf) {
  if (n_d < 0.0 || n_d > c.m - 2) throw std::invalid_argument("evaluate_air: n_d outside [0, m-2]");
  const AirEvaluation ev = evaluate_bits_mc(c, link, n_symbols, n_blocks, seed, pmf);
  AirReport rep;
  rep.m = c.m;
  rep.n_d = n_d;
  rep.n_symbols = n_symbols;
  rep.seed = seed;
  rep.per_bit_mi = ev.per_bit_mi;
  rep.order = ev.order;
  rep.air_mtom = ev.air_at(n_d);
  rep.gmi = ev.gmi();
  rep.air_pas = ev.pas_rate();
  rep.confidence_halfwidth = ev.halfwidth_at(n_d);
  return rep;
}

ReliabilityOrder reliability_order(const Constellation& c, const LinkModel& link, int n_mc,
                                   std::uint64_t seed) {
  if (n_mc < 10000) throw std::invalid_argument("reliability_order: n_mc must be >= 10^4");
  const AirReport rep = evaluate_air(c, link, 0.0, n_mc, 8, seed);
  return rep.order;
}

}  // namespace mtom
