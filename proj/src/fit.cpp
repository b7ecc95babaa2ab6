#include "mtom/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "mtom/rng.hpp"

namespace mtom {

void SnrMeasurementGrid::set_constellation(const Constellation& c) {
  const Moments mo = moments(c);
  mu4 = mo.mu4;
  mu6 = mo.mu6;
  peak_coord = 0.0;
  for (const auto& p : c.points)
    peak_coord = std::max(peak_coord, std::max(std::abs(p.real()), std::abs(p.imag())));
}

void SnrMeasurementGrid::validate() const {
  if (records.empty()) throw std::invalid_argument("fit grid: empty");
  std::set<std::pair<double, double>> keys;
  for (const auto& r : records) {
    if (!std::isfinite(r.snr_db)) throw std::invalid_argument("fit grid: non-finite SNR");
    if (!keys.insert({r.distance_km, r.power_dbm}).second)
      throw std::invalid_argument("fit grid: duplicate (distance, power) key");
  }
  if (!(mu4 >= 1.0) || !(peak_coord > 0.0))
    throw std::invalid_argument("fit grid: constellation metadata not set");
}

double model_snr_db(const FitParams& params, const FiberParams& skeleton,
                    const SnrMeasurementGrid& meta, double distance_km, double power_dbm) {
  FiberParams fiber = skeleton;
  fiber.alpha_db_per_km = params.alpha_db_per_km;
  fiber.gamma_per_w_km = params.gamma_per_w_km;
  fiber.amp_nf_db = params.nf_db;
  fiber.n_spans = static_cast<int>(std::lround(distance_km / skeleton.span_length_km));
  LinkModel link;
  link.fiber = fiber;
  link.trx.snr_trx_db = params.snr_trx_db;
  link.trx.n_qbits = meta.n_qbits;
  link.trx.headroom = meta.headroom;
  link.launch_power_dbm = power_dbm;
  link.nli = gn_default_coeffs(fiber);
  const EffectiveSnr snr = effective_snr(link, meta.mu4, meta.mu6);
  double sigma2 = snr.sigma2_awgn;
  if (meta.n_qbits > 0) {
    const double delta = meta.headroom * meta.peak_coord;
    const double step = delta / std::pow(2.0, meta.n_qbits);
    sigma2 += step * step / 12.0;
  }
  return lin_to_db(1.0 / sigma2);
}

double fit_objective(const FitParams& params, const SnrMeasurementGrid& grid,
                     const FiberParams& skeleton) {
  grid.validate();
  if (!(params.nf_db > 0.0) || !(params.alpha_db_per_km > 0.0) ||
      !(params.gamma_per_w_km > 0.0) || !std::isfinite(params.snr_trx_db))
    return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const auto& r : grid.records) {
    const double pred = model_snr_db(params, skeleton, grid, r.distance_km, r.power_dbm);
    worst = std::max(worst, std::abs(pred - r.snr_db));
  }
  return worst;
}

namespace {

constexpr int kDim = 4;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

FitParams warp(const double* z, const FitBounds& b) {
  FitParams p;
  p.nf_db = b.lo.nf_db + (b.hi.nf_db - b.lo.nf_db) * sigmoid(z[0]);
  p.snr_trx_db = b.lo.snr_trx_db + (b.hi.snr_trx_db - b.lo.snr_trx_db) * sigmoid(z[1]);
  p.alpha_db_per_km = b.lo.alpha_db_per_km + (b.hi.alpha_db_per_km - b.lo.alpha_db_per_km) * sigmoid(z[2]);
  p.gamma_per_w_km = b.lo.gamma_per_w_km + (b.hi.gamma_per_w_km - b.lo.gamma_per_w_km) * sigmoid(z[3]);
  return p;
}

// Cyclic Jacobi eigendecomposition for the tiny covariance matrix.
void jacobi_eigen(double a[kDim][kDim], double evec[kDim][kDim], double eval[kDim]) {
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) evec[i][j] = i == j ? 1.0 : 0.0;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < kDim; ++p)
      for (int q = p + 1; q < kDim; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-26) break;
    for (int p = 0; p < kDim; ++p) {
      for (int q = p + 1; q < kDim; ++q) {
        if (std::abs(a[p][q]) < 1e-18) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < kDim; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < kDim; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < kDim; ++k) {
          const double vkp = evec[k][p], vkq = evec[k][q];
          evec[k][p] = c * vkp - s * vkq;
          evec[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  for (int i = 0; i < kDim; ++i) eval[i] = std::max(a[i][i], 1e-30);
}

}  // namespace

FitResult cmaes_fit(const SnrMeasurementGrid& grid, const FiberParams& skeleton,
                    const FitBounds& bounds, std::uint64_t seed, long long budget) {
  grid.validate();
  if (budget < 8) throw std::invalid_argument("cmaes_fit: budget too small");
  const int n = kDim;
  const int lambda = 4 + static_cast<int>(std::floor(3.0 * std::log(n)));
  const int mu = lambda / 2;
  std::vector<double> weights(static_cast<std::size_t>(mu));
  for (int i = 0; i < mu; ++i) weights[static_cast<std::size_t>(i)] = std::log(mu + 0.5) - std::log(i + 1.0);
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (auto& w : weights) w /= wsum;
  double mueff = 0.0;
  for (double w : weights) mueff += w * w;
  mueff = 1.0 / mueff;

  const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
  const double cs = (mueff + 2.0) / (n + mueff + 5.0);
  const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
  const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((n + 2.0) * (n + 2.0) + mueff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(static_cast<double>(n)) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  double mean[kDim] = {0.0, 0.0, 0.0, 0.0};
  double sigma = 1.0;
  double C[kDim][kDim] = {};
  for (int i = 0; i < n; ++i) C[i][i] = 1.0;
  double ps[kDim] = {}, pc[kDim] = {};

  Rng rng(seed);
  FitResult best;
  best.max_abs_error_db = std::numeric_limits<double>::infinity();
  long long evals = 0;
  std::vector<std::array<double, kDim>> xs(static_cast<std::size_t>(lambda));
  std::vector<double> fs(static_cast<std::size_t>(lambda));
  std::vector<int> rank(static_cast<std::size_t>(lambda));
  int generation = 0;
  bool any_feasible = false;

  while (evals + lambda <= budget) {
    ++generation;
    double A[kDim][kDim];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A[i][j] = C[i][j];
    double B[kDim][kDim], D[kDim];
    jacobi_eigen(A, B, D);
    double Dsqrt[kDim];
    for (int i = 0; i < n; ++i) Dsqrt[i] = std::sqrt(D[i]);

    for (int k = 0; k < lambda; ++k) {
      double zn[kDim];
      for (int i = 0; i < n; i += 2) rng.gaussian_pair(zn[i], zn[i + 1]);
      for (int i = 0; i < n; ++i) {
        double v = 0.0;
        for (int j = 0; j < n; ++j) v += B[i][j] * Dsqrt[j] * zn[j];
        xs[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = mean[i] + sigma * v;
      }
      const FitParams cand = warp(xs[static_cast<std::size_t>(k)].data(), bounds);
      fs[static_cast<std::size_t>(k)] = fit_objective(cand, grid, skeleton);
      ++evals;
      if (std::isfinite(fs[static_cast<std::size_t>(k)])) any_feasible = true;
      if (fs[static_cast<std::size_t>(k)] < best.max_abs_error_db) {
        best.max_abs_error_db = fs[static_cast<std::size_t>(k)];
        best.params = cand;
      }
    }
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(),
                     [&](int a, int b) { return fs[static_cast<std::size_t>(a)] < fs[static_cast<std::size_t>(b)]; });

    double mean_new[kDim] = {};
    for (int i = 0; i < mu; ++i)
      for (int d = 0; d < n; ++d)
        mean_new[d] += weights[static_cast<std::size_t>(i)] *
                       xs[static_cast<std::size_t>(rank[static_cast<std::size_t>(i)])][static_cast<std::size_t>(d)];

    double delta[kDim];
    for (int d = 0; d < n; ++d) delta[d] = (mean_new[d] - mean[d]) / sigma;
    // C^(-1/2) * delta
    double cinv_delta[kDim] = {};
    for (int i = 0; i < n; ++i) {
      double proj = 0.0;
      for (int k = 0; k < n; ++k) proj += B[k][i] * delta[k];
      proj /= Dsqrt[i];
      for (int k = 0; k < n; ++k) cinv_delta[k] += B[k][i] * proj;
    }
    double ps_norm2 = 0.0;
    for (int d = 0; d < n; ++d) {
      ps[d] = (1.0 - cs) * ps[d] + std::sqrt(cs * (2.0 - cs) * mueff) * cinv_delta[d];
      ps_norm2 += ps[d] * ps[d];
    }
    const double hsig_rhs = (1.4 + 2.0 / (n + 1.0)) * chi_n *
                            std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * generation));
    const bool hsig = std::sqrt(ps_norm2) < hsig_rhs;
    for (int d = 0; d < n; ++d)
      pc[d] = (1.0 - cc) * pc[d] + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) * delta[d] : 0.0);

    double wsum_used = 0.0;
    for (double w : weights) wsum_used += w;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double rank_mu = 0.0;
        for (int k = 0; k < mu; ++k) {
          const auto& x = xs[static_cast<std::size_t>(rank[static_cast<std::size_t>(k)])];
          rank_mu += weights[static_cast<std::size_t>(k)] * (x[static_cast<std::size_t>(i)] - mean[i]) *
                     (x[static_cast<std::size_t>(j)] - mean[j]) / (sigma * sigma);
        }
        C[i][j] = (1.0 - c1 - cmu * wsum_used) * C[i][j] +
                  c1 * (pc[i] * pc[j] + (hsig ? 0.0 : cc * (2.0 - cc)) * C[i][j]) + cmu * rank_mu;
      }
    sigma *= std::exp((cs / damps) * (std::sqrt(ps_norm2) / chi_n - 1.0));
    for (int d = 0; d < n; ++d) mean[d] = mean_new[d];

    best.objective_trace.push_back(best.max_abs_error_db);
    if (best.max_abs_error_db < 1e-12) break;
  }
  best.evaluations = evals;
  if (!any_feasible) throw std::runtime_error("cmaes_fit: no feasible evaluation within budget");
  return best;
}

FitResult nelder_mead_fit(const SnrMeasurementGrid& grid, const FiberParams& skeleton,
                          const FitBounds& bounds, long long budget) {
  grid.validate();
  const int n = kDim;
  std::vector<std::array<double, kDim>> simplex(static_cast<std::size_t>(n + 1));
  std::vector<double> f(static_cast<std::size_t>(n + 1));
  long long evals = 0;
  auto eval = [&](const std::array<double, kDim>& z) {
    ++evals;
    return fit_objective(warp(z.data(), bounds), grid, skeleton);
  };
  for (int i = 0; i <= n; ++i) {
    simplex[static_cast<std::size_t>(i)].fill(0.0);
    if (i > 0) simplex[static_cast<std::size_t>(i)][static_cast<std::size_t>(i - 1)] = 0.7;
    f[static_cast<std::size_t>(i)] = eval(simplex[static_cast<std::size_t>(i)]);
  }
  FitResult best;
  best.max_abs_error_db = std::numeric_limits<double>::infinity();
  auto track = [&] {
    const auto it = std::min_element(f.begin(), f.end());
    if (*it < best.max_abs_error_db) {
      best.max_abs_error_db = *it;
      best.params = warp(simplex[static_cast<std::size_t>(it - f.begin())].data(), bounds);
    }
    best.objective_trace.push_back(best.max_abs_error_db);
  };
  track();
  while (evals + 4 <= budget && best.max_abs_error_db > 1e-12) {
    std::vector<int> idx(static_cast<std::size_t>(n + 1));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return f[static_cast<std::size_t>(a)] < f[static_cast<std::size_t>(b)]; });
    std::array<double, kDim> centroid{};
    for (int i = 0; i < n; ++i)
      for (int d = 0; d < n; ++d)
        centroid[static_cast<std::size_t>(d)] += simplex[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])][static_cast<std::size_t>(d)] / n;
    auto& worst = simplex[static_cast<std::size_t>(idx[static_cast<std::size_t>(n)])];
    double& fworst = f[static_cast<std::size_t>(idx[static_cast<std::size_t>(n)])];
    const double fbest = f[static_cast<std::size_t>(idx[0])];
    const double fsecond = f[static_cast<std::size_t>(idx[static_cast<std::size_t>(n - 1)])];

    std::array<double, kDim> refl{};
    for (int d = 0; d < n; ++d) refl[static_cast<std::size_t>(d)] = centroid[static_cast<std::size_t>(d)] * 2.0 - worst[static_cast<std::size_t>(d)];
    const double frefl = eval(refl);
    if (frefl < fbest) {
      std::array<double, kDim> expd{};
      for (int d = 0; d < n; ++d) expd[static_cast<std::size_t>(d)] = centroid[static_cast<std::size_t>(d)] + 2.0 * (refl[static_cast<std::size_t>(d)] - centroid[static_cast<std::size_t>(d)]);
      const double fexp = eval(expd);
      if (fexp < frefl) {
        worst = expd;
        fworst = fexp;
      } else {
        worst = refl;
        fworst = frefl;
      }
    } else if (frefl < fsecond) {
      worst = refl;
      fworst = frefl;
    } else {
      std::array<double, kDim> contr{};
      for (int d = 0; d < n; ++d) contr[static_cast<std::size_t>(d)] = centroid[static_cast<std::size_t>(d)] + 0.5 * (worst[static_cast<std::size_t>(d)] - centroid[static_cast<std::size_t>(d)]);
      const double fcontr = eval(contr);
      if (fcontr < fworst) {
        worst = contr;
        fworst = fcontr;
      } else {
        const auto& xbest = simplex[static_cast<std::size_t>(idx[0])];
        for (int i = 1; i <= n; ++i) {
          auto& x = simplex[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
          for (int d = 0; d < n; ++d)
            x[static_cast<std::size_t>(d)] = xbest[static_cast<std::size_t>(d)] + 0.5 * (x[static_cast<std::size_t>(d)] - xbest[static_cast<std::size_t>(d)]);
          f[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = eval(x);
        }
      }
    }
    track();
  }
  best.evaluations = evals;
  return best;
}

}  // namespace mtom
