#include "mtom/pas.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mtom/air.hpp"
#include "mtom/rng.hpp"

namespace mtom {

MBPmf mb_pmf(const Constellation& c, double nu) {
  if (nu < 0.0) throw std::invalid_argument("mb_pmf: nu must be >= 0");
  MBPmf out;
  out.nu = nu;
  out.probs.resize(c.points.size());
  // Subtract the minimum energy before exponentiating so large nu stays finite.
  double emin = std::norm(c.points.front());
  for (const auto& p : c.points) emin = std::min(emin, std::norm(p));
  double z = 0.0;
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    out.probs[i] = std::exp(-nu * (std::norm(c.points[i]) - emin));
    z += out.probs[i];
  }
  for (auto& p : out.probs) p /= z;
  out.entropy = entropy_bits(out.probs);
  return out;
}

MBPmf mb_for_entropy(const Constellation& c, double h_target) {
  if (!(h_target > 0.0) || h_target > c.m + 1e-12)
    throw std::invalid_argument("mb_for_entropy: entropy target outside (0, m]");
  MBPmf at_zero = mb_pmf(c, 0.0);
  if (std::abs(at_zero.entropy - h_target) < 1e-9) return at_zero;

  double lo = 0.0, hi = 1.0;
  MBPmf at_hi = mb_pmf(c, hi);
  int guard = 0;
  while (at_hi.entropy > h_target) {
    hi *= 2.0;
    at_hi = mb_pmf(c, hi);
    if (++guard > 60) throw std::invalid_argument("mb_for_entropy: entropy target unreachable");
  }
  MBPmf mid;
  for (int it = 0; it < 200; ++it) {
    const double nu = 0.5 * (lo + hi);
    mid = mb_pmf(c, nu);
    if (std::abs(mid.entropy - h_target) < 1e-6) return mid;
    if (mid.entropy > h_target)
      lo = nu;
    else
      hi = nu;
  }
  if (std::abs(mid.entropy - h_target) > 1e-6)
    throw std::invalid_argument("mb_for_entropy: bisection failed to reach target");
  return mid;
}

Constellation renormalize_power(const Constellation& c, const std::vector<double>& pmf) {
  if (pmf.size() != c.points.size())
    throw std::invalid_argument("renormalize_power: pmf size mismatch");
  double e = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) e += pmf[i] * std::norm(c.points[i]);
  if (!(e > 0.0)) throw std::invalid_argument("renormalize_power: zero power under pmf");
  Constellation out = c;
  const double s = 1.0 / std::sqrt(e);
  for (auto& p : out.points) p *= s;
  return out;
}

double pas_net_rate(double h_bits, int m, double fec_rate) {
  if (!(fec_rate > 0.0) || fec_rate > 1.0)
    throw std::invalid_argument("pas_net_rate: fec rate outside (0, 1]");
  const double ir = h_bits - m * (1.0 - fec_rate);
  if (ir < 0.0) throw std::invalid_argument("pas_net_rate: negative net rate (invalid operating point)");
  return ir;
}

std::vector<int> sample_pmf(const MBPmf& pmf, long long n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_pmf: n must be >= 1");
  std::vector<double> cdf(pmf.probs.size());
  std::partial_sum(pmf.probs.begin(), pmf.probs.end(), cdf.begin());
  cdf.back() = 1.0;
  std::vector<int> idx(static_cast<std::size_t>(n));
  Rng rng(seed);
  for (auto& i : idx) {
    const double u = rng.uniform();
    i = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  }
  return idx;
}

std::vector<PasSweepRow> pas_sweep(const Constellation& c, const LinkModel& link,
                                   const std::vector<double>& h_grid, double fec_rate,
                                   long long n_symbols, int n_blocks, std::uint64_t seed,
                                   double feasible_margin) {
  std::vector<PasSweepRow> rows;
  rows.reserve(h_grid.size());
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    const double h = h_grid[i];
    const MBPmf pmf = mb_for_entropy(c, h);
    const Constellation cs = renormalize_power(c, pmf.probs);
    const AirReport rep =
        evaluate_air(cs, link, 0.0, n_symbols, n_blocks, mix_seed(seed, i), &pmf.probs);
    PasSweepRow row;
    row.h = h;
    row.nu = pmf.nu;
    row.net_rate = pas_net_rate(h, c.m, fec_rate);
    row.air = rep.air_pas;
    const Moments mo = moments(cs, &pmf.probs);
    row.snr_db = effective_snr(link, mo.mu4, mo.mu6).snr_db;
    row.feasible = row.air >= row.net_rate + feasible_margin;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mtom
