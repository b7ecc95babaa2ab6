#include "mtom/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mtom/rng.hpp"

namespace mtom {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kLn10 = 2.302585092994046;
constexpr double kSigma2Floor = 1e-300;

int round_nd(double n_d) { return static_cast<int>(std::lround(n_d)); }

// Static description of the optimization problem: expansion maps, channel
// constants and the data-position mask. Everything that does not change
// between gradient steps lives here.
struct Problem {
  int m = 0;
  int q_size = 0;
  std::pair<int, int> sign_positions;
  std::vector<int> full_of;       // (j*4 + s) -> full label u
  std::vector<int> j_of;          // u -> j
  std::vector<double> si_of;      // u -> Re sign (+-1)
  std::vector<double> sq_of;      // u -> Im sign
  std::vector<std::uint8_t> data_mask;  // per label position
  std::vector<int> data_positions;
  int n_data = 0;

  // channel constants
  double snr_trx_inv = 0.0;
  double n_ase = 0.0;  // ASE noise power (W); sigma2_ase = n_ase / P
  bool ase_on = false;
  bool nli_on = false;
  double n_spans = 0.0;
  NliCoeffs nli;
  bool quant_on = false;
  double headroom = 1.1;
  double pow4_nbits = 1.0;  // 4^n_qbits
  bool power_active = false;
};

Problem make_problem(const QuadrantSet& q, const LinkModel& link,
                     const std::vector<int>& data_positions, bool optimize_power) {
  Problem pb;
  pb.m = q.m;
  pb.q_size = q.size();
  pb.sign_positions = q.sign_positions;
  const int n_full = 1 << q.m;
  pb.full_of.resize(static_cast<std::size_t>(pb.q_size) * 4);
  pb.j_of.resize(static_cast<std::size_t>(n_full));
  pb.si_of.resize(static_cast<std::size_t>(n_full));
  pb.sq_of.resize(static_cast<std::size_t>(n_full));
  for (int j = 0; j < pb.q_size; ++j) {
    for (int s = 0; s < 4; ++s) {
      const int s_re = s & 1;
      const int s_im = (s >> 1) & 1;
      const int u = static_cast<int>(compose_quadrant_label(static_cast<std::uint32_t>(j), q.m,
                                                            q.sign_positions, s_re, s_im));
      pb.full_of[static_cast<std::size_t>(j) * 4 + s] = u;
      pb.j_of[static_cast<std::size_t>(u)] = j;
      pb.si_of[static_cast<std::size_t>(u)] = s_re ? 1.0 : -1.0;
      pb.sq_of[static_cast<std::size_t>(u)] = s_im ? 1.0 : -1.0;
    }
  }
  pb.data_positions = data_positions;
  pb.n_data = static_cast<int>(data_positions.size());
  pb.data_mask.assign(static_cast<std::size_t>(q.m), 0);
  for (int p : data_positions) {
    if (p < 0 || p >= q.m) throw std::invalid_argument("objective: data position out of range");
    pb.data_mask[static_cast<std::size_t>(p)] = 1;
  }

  link.fiber.validate();
  link.trx.validate();
  if (std::isfinite(link.trx.snr_trx_db)) pb.snr_trx_inv = 1.0 / db_to_lin(link.trx.snr_trx_db);
  if (link.fiber.n_spans > 0) {
    const double gain = db_to_lin(link.fiber.alpha_db_per_km * link.fiber.span_length_km);
    pb.n_ase = link.fiber.n_spans * (gain - 1.0) * 6.62607015e-34 *
               (link.fiber.center_frequency_thz * 1e12) * db_to_lin(link.fiber.amp_nf_db) *
               (link.fiber.symbol_rate_gbd * 1e9);
    pb.ase_on = true;
  }
  pb.nli_on = link.nli_active();
  pb.n_spans = link.fiber.n_spans;
  pb.nli = link.nli;
  pb.quant_on = link.trx.n_qbits > 0;
  pb.headroom = link.trx.headroom;
  pb.pow4_nbits = std::pow(4.0, link.trx.n_qbits);
  pb.power_active = optimize_power && (pb.ase_on || pb.nli_on);
  return pb;
}

struct EvalScratch {
  std::vector<double> xre, xim;  // normalized full points
  std::vector<double> w, e;
  std::vector<double> dxre, dxim;  // gradients wrt normalized full coordinates
};

// Forward pass and, when grad != nullptr, the hand-rolled reverse sweep
// through likelihoods, the channel noise scales, moments, the quantizer range
// and the unit-power projection.
double eval_batch(const Problem& pb, const std::vector<double>& are, const std::vector<double>& aim,
                  double rho_dbm, const TrainingBatch& batch, ObjectiveGradient* grad,
                  EvalScratch& sc) {
  const int q_n = pb.q_size;
  const int n_full = q_n * 4;
  const int m = pb.m;
  const double b_size = static_cast<double>(batch.size());

  // power normalization
  double energy = 0.0;
  for (int j = 0; j < q_n; ++j)
    energy += are[static_cast<std::size_t>(j)] * are[static_cast<std::size_t>(j)] +
              aim[static_cast<std::size_t>(j)] * aim[static_cast<std::size_t>(j)];
  energy /= q_n;
  if (!(energy > 0.0)) throw std::invalid_argument("objective: all-zero constellation");
  const double inv_s = 1.0 / std::sqrt(energy);

  // moments and peak on the normalized set
  double mu4 = 0.0, mu6 = 0.0, peak = 0.0;
  int peak_j = 0;
  bool peak_is_re = true;
  for (int j = 0; j < q_n; ++j) {
    const double ar = are[static_cast<std::size_t>(j)] * inv_s;
    const double ai = aim[static_cast<std::size_t>(j)] * inv_s;
    const double r2 = ar * ar + ai * ai;
    mu4 += r2 * r2;
    mu6 += r2 * r2 * r2;
    if (std::abs(ar) > peak) peak = std::abs(ar), peak_j = j, peak_is_re = true;
    if (std::abs(ai) > peak) peak = std::abs(ai), peak_j = j, peak_is_re = false;
  }
  mu4 /= q_n;
  mu6 /= q_n;

  const double p_w = dbm_to_watt(rho_dbm);
  const double nli_m = pb.nli.c0 + pb.nli.c1 * (mu4 - 2.0) + pb.nli.c2 * (mu6 - 6.0);
  double sigma2_ch = pb.snr_trx_inv;
  if (pb.ase_on) sigma2_ch += pb.n_ase / p_w;
  if (pb.nli_on) sigma2_ch += p_w * p_w * pb.n_spans * nli_m;

  const double delta = pb.headroom * peak;
  const double q_var = pb.quant_on ? delta * delta / (pb.pow4_nbits * 12.0) : 0.0;
  const double half_w = q_var > 0.0 ? std::sqrt(3.0 * q_var) / 2.0 : 0.0;
  const double sigma2 = std::max(sigma2_ch + q_var, kSigma2Floor);
  const double s_ch = std::sqrt(sigma2_ch / 2.0);
  const double inv_sigma2 = 1.0 / sigma2;

  sc.xre.resize(static_cast<std::size_t>(n_full));
  sc.xim.resize(static_cast<std::size_t>(n_full));
  for (int u = 0; u < n_full; ++u) {
    const int j = pb.j_of[static_cast<std::size_t>(u)];
    sc.xre[static_cast<std::size_t>(u)] = pb.si_of[static_cast<std::size_t>(u)] * are[static_cast<std::size_t>(j)] * inv_s;
    sc.xim[static_cast<std::size_t>(u)] = pb.sq_of[static_cast<std::size_t>(u)] * aim[static_cast<std::size_t>(j)] * inv_s;
  }

  const bool want_grad = grad != nullptr;
  if (want_grad) {
    sc.dxre.assign(static_cast<std::size_t>(n_full), 0.0);
    sc.dxim.assign(static_cast<std::size_t>(n_full), 0.0);
  }
  sc.w.resize(static_cast<std::size_t>(n_full));
  sc.e.resize(static_cast<std::size_t>(n_full));

  double of_sum = 0.0;          // sum over symbols of sum_p log p(u|y), natural log
  double d_sigma2 = 0.0;        // dOF/d(demapper sigma^2)
  double d_s_ch = 0.0;          // dOF/d(channel noise scale)
  double d_half_w = 0.0;        // dOF/d(uniform noise half width)
  double num_true[32];
  double inv_num[32];
  int true_bit[32];

  for (std::size_t k = 0; k < batch.size(); ++k) {
    const int u_tx =
        pb.full_of[static_cast<std::size_t>(batch.a[k]) * 4 + batch.s[k]];
    const double yre = sc.xre[static_cast<std::size_t>(u_tx)] + s_ch * batch.eps_re[k] +
                       half_w * (batch.dac_re[k] + batch.adc_re[k]);
    const double yim = sc.xim[static_cast<std::size_t>(u_tx)] + s_ch * batch.eps_im[k] +
                       half_w * (batch.dac_im[k] + batch.adc_im[k]);

    double wmax = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < n_full; ++t) {
      const double dre = yre - sc.xre[static_cast<std::size_t>(t)];
      const double dim = yim - sc.xim[static_cast<std::size_t>(t)];
      const double wt = -(dre * dre + dim * dim) * inv_sigma2;
      sc.w[static_cast<std::size_t>(t)] = wt;
      if (wt > wmax) wmax = wt;
    }
    const std::uint32_t lab_tx = static_cast<std::uint32_t>(u_tx);
    for (int i = 0; i < pb.n_data; ++i) {
      const int p = pb.data_positions[static_cast<std::size_t>(i)];
      true_bit[i] = static_cast<int>((lab_tx >> (m - 1 - p)) & 1u);
      num_true[i] = 0.0;
    }
    double den = 0.0;
    for (int t = 0; t < n_full; ++t) {
      if (sc.w[static_cast<std::size_t>(t)] - wmax < -40.0) {
        sc.e[static_cast<std::size_t>(t)] = 0.0;
        continue;
      }
      const double e = std::exp(sc.w[static_cast<std::size_t>(t)] - wmax);
      sc.e[static_cast<std::size_t>(t)] = e;
      den += e;
      const std::uint32_t lab = static_cast<std::uint32_t>(t);
      for (int i = 0; i < pb.n_data; ++i) {
        const int p = pb.data_positions[static_cast<std::size_t>(i)];
        if (static_cast<int>((lab >> (m - 1 - p)) & 1u) == true_bit[i]) num_true[i] += e;
      }
    }
    for (int i = 0; i < pb.n_data; ++i) of_sum += std::log(num_true[i]) - std::log(den);

    if (!want_grad) continue;

    const double scale = 1.0 / (b_size * kLn2);
    for (int i = 0; i < pb.n_data; ++i) inv_num[i] = 1.0 / num_true[i];
    const double base = static_cast<double>(pb.n_data) / den;
    double dyre = 0.0, dyim = 0.0;
    for (int t = 0; t < n_full; ++t) {
      if (sc.e[static_cast<std::size_t>(t)] == 0.0) continue;
      double coef = -base;
      const std::uint32_t lab = static_cast<std::uint32_t>(t);
      for (int i = 0; i < pb.n_data; ++i) {
        const int p = pb.data_positions[static_cast<std::size_t>(i)];
        if (static_cast<int>((lab >> (m - 1 - p)) & 1u) == true_bit[i]) coef += inv_num[i];
      }
      const double g = sc.e[static_cast<std::size_t>(t)] * coef * scale;
      const double dre = yre - sc.xre[static_cast<std::size_t>(t)];
      const double dim = yim - sc.xim[static_cast<std::size_t>(t)];
      const double gre = g * 2.0 * dre * inv_sigma2;
      const double gim = g * 2.0 * dim * inv_sigma2;
      sc.dxre[static_cast<std::size_t>(t)] += gre;
      sc.dxim[static_cast<std::size_t>(t)] += gim;
      dyre -= gre;
      dyim -= gim;
      d_sigma2 += g * (dre * dre + dim * dim) * inv_sigma2 * inv_sigma2;
    }
    sc.dxre[static_cast<std::size_t>(u_tx)] += dyre;
    sc.dxim[static_cast<std::size_t>(u_tx)] += dyim;
    d_s_ch += dyre * batch.eps_re[k] + dyim * batch.eps_im[k];
    d_half_w += dyre * (batch.dac_re[k] + batch.adc_re[k]) + dyim * (batch.dac_im[k] + batch.adc_im[k]);
  }

  const double of = m + of_sum / (b_size * kLn2);
  if (!want_grad) return of;

  // scalar chains
  double d_sigma2_ch = d_sigma2;
  if (s_ch > 0.0) d_sigma2_ch += d_s_ch / (4.0 * s_ch);
  double d_qvar = d_sigma2;
  if (half_w > 0.0) d_qvar += d_half_w * 3.0 / (4.0 * std::sqrt(3.0 * q_var));
  double d_mu4 = 0.0, d_mu6 = 0.0;
  if (pb.nli_on) {
    d_mu4 = d_sigma2_ch * p_w * p_w * pb.n_spans * pb.nli.c1;
    d_mu6 = d_sigma2_ch * p_w * p_w * pb.n_spans * pb.nli.c2;
  }
  grad->d_launch_power_dbm = 0.0;
  if (pb.power_active) {
    double d_pw = 0.0;
    if (pb.ase_on) d_pw -= pb.n_ase / (p_w * p_w);
    if (pb.nli_on) d_pw += 2.0 * p_w * pb.n_spans * nli_m;
    grad->d_launch_power_dbm = d_sigma2_ch * d_pw * p_w * kLn10 / 10.0;
  }

  // gradients wrt normalized reduced coordinates
  std::vector<double> d_ar(static_cast<std::size_t>(q_n), 0.0);
  std::vector<double> d_ai(static_cast<std::size_t>(q_n), 0.0);
  for (int u = 0; u < n_full; ++u) {
    const int j = pb.j_of[static_cast<std::size_t>(u)];
    d_ar[static_cast<std::size_t>(j)] += pb.si_of[static_cast<std::size_t>(u)] * sc.dxre[static_cast<std::size_t>(u)];
    d_ai[static_cast<std::size_t>(j)] += pb.sq_of[static_cast<std::size_t>(u)] * sc.dxim[static_cast<std::size_t>(u)];
  }
  for (int j = 0; j < q_n; ++j) {
    const double ar = are[static_cast<std::size_t>(j)] * inv_s;
    const double ai = aim[static_cast<std::size_t>(j)] * inv_s;
    const double r2 = ar * ar + ai * ai;
    d_ar[static_cast<std::size_t>(j)] += d_mu4 * 4.0 * r2 * ar / q_n + d_mu6 * 6.0 * r2 * r2 * ar / q_n;
    d_ai[static_cast<std::size_t>(j)] += d_mu4 * 4.0 * r2 * ai / q_n + d_mu6 * 6.0 * r2 * r2 * ai / q_n;
  }
  if (pb.quant_on) {
    const double d_delta = d_qvar * delta / (6.0 * pb.pow4_nbits);
    const double coord = peak_is_re ? are[static_cast<std::size_t>(peak_j)] : aim[static_cast<std::size_t>(peak_j)];
    const double d_peak = pb.headroom * d_delta * (coord * inv_s >= 0.0 ? 1.0 : -1.0);
    if (peak_is_re)
      d_ar[static_cast<std::size_t>(peak_j)] += d_peak;
    else
      d_ai[static_cast<std::size_t>(peak_j)] += d_peak;
  }

  // back through the unit-power projection
  double d_energy_dot = 0.0;
  for (int j = 0; j < q_n; ++j)
    d_energy_dot += d_ar[static_cast<std::size_t>(j)] * are[static_cast<std::size_t>(j)] * inv_s +
                    d_ai[static_cast<std::size_t>(j)] * aim[static_cast<std::size_t>(j)] * inv_s;
  const double d_energy = -d_energy_dot / (2.0 * energy);
  grad->d_re.assign(static_cast<std::size_t>(q_n), 0.0);
  grad->d_im.assign(static_cast<std::size_t>(q_n), 0.0);
  for (int j = 0; j < q_n; ++j) {
    grad->d_re[static_cast<std::size_t>(j)] =
        d_ar[static_cast<std::size_t>(j)] * inv_s + d_energy * 2.0 * are[static_cast<std::size_t>(j)] / q_n;
    grad->d_im[static_cast<std::size_t>(j)] =
        d_ai[static_cast<std::size_t>(j)] * inv_s + d_energy * 2.0 * aim[static_cast<std::size_t>(j)] / q_n;
  }
  grad->objective = of;
  return of;
}

void split_coords(const QuadrantSet& q, std::vector<double>& are, std::vector<double>& aim) {
  are.resize(q.reduced_points.size());
  aim.resize(q.reduced_points.size());
  for (std::size_t j = 0; j < q.reduced_points.size(); ++j) {
    are[j] = q.reduced_points[j].real();
    aim[j] = q.reduced_points[j].imag();
  }
}

void check_nd(double n_d, int m) {
  if (n_d < 0.0 || n_d > m - 2) throw std::invalid_argument("n_d outside [0, m-2]");
}

}  // namespace

void OptimizerConfig::validate(int m) const {
  if (batch_size < 1 || n_symbols_total < batch_size)
    throw std::invalid_argument("optimizer: bad batch/symbol budget");
  if (n_symbols_total % batch_size != 0)
    throw std::invalid_argument("optimizer: batch_size must divide n_symbols_total");
  check_nd(n_d_target, m);
  if (max_epochs < 1) throw std::invalid_argument("optimizer: max_epochs must be >= 1");
}

TrainingBatch TrainingBatch::draw(int m, int batch_size, std::uint64_t seed) {
  TrainingBatch b;
  const int q_n = 1 << (m - 2);
  b.a.resize(static_cast<std::size_t>(batch_size));
  b.s.resize(static_cast<std::size_t>(batch_size));
  b.eps_re.resize(b.a.size());
  b.eps_im.resize(b.a.size());
  b.dac_re.resize(b.a.size());
  b.dac_im.resize(b.a.size());
  b.adc_re.resize(b.a.size());
  b.adc_im.resize(b.a.size());
  Rng rng(seed);
  for (std::size_t k = 0; k < b.a.size(); ++k) {
    b.a[k] = static_cast<int>(rng.below(static_cast<std::uint64_t>(q_n)));
    b.s[k] = static_cast<int>(rng.below(4));
    rng.gaussian_pair(b.eps_re[k], b.eps_im[k]);
    b.dac_re[k] = 2.0 * rng.uniform() - 1.0;
    b.dac_im[k] = 2.0 * rng.uniform() - 1.0;
    b.adc_re[k] = 2.0 * rng.uniform() - 1.0;
    b.adc_im[k] = 2.0 * rng.uniform() - 1.0;
  }
  return b;
}

std::vector<int> training_data_positions(const Constellation& c, const LinkModel& link,
                                         double n_d_target, std::uint64_t seed) {
  check_nd(n_d_target, c.m);
  const int nd = round_nd(n_d_target);
  const ReliabilityOrder ro = reliability_order(c, link, 30000, mix_seed(seed, 0x9e37ULL));
  std::vector<int> data(ro.order.begin(), ro.order.end() - nd);
  return data;
}

double objective(const QuadrantSet& q, const LinkModel& link, double n_d_target,
                 const std::vector<int>& data_positions, const TrainingBatch& batch) {
  check_nd(n_d_target, q.m);
  const Problem pb = make_problem(q, link, data_positions, false);
  std::vector<double> are, aim;
  split_coords(q, are, aim);
  EvalScratch sc;
  return eval_batch(pb, are, aim, link.launch_power_dbm, batch, nullptr, sc);
}

ObjectiveGradient gradient(const QuadrantSet& q, const LinkModel& link, double n_d_target,
                           const std::vector<int>& data_positions, const TrainingBatch& batch) {
  check_nd(n_d_target, q.m);
  const Problem pb = make_problem(q, link, data_positions, true);
  std::vector<double> are, aim;
  split_coords(q, are, aim);
  EvalScratch sc;
  ObjectiveGradient g;
  eval_batch(pb, are, aim, link.launch_power_dbm, batch, &g, sc);
  return g;
}

double objective(const QuadrantSet& q, const LinkModel& link, double n_d_target, int batch_size,
                 std::uint64_t seed) {
  const auto data = training_data_positions(expand_quadrant(q, q.sign_positions), link, n_d_target, seed);
  return objective(q, link, n_d_target, data, TrainingBatch::draw(q.m, batch_size, seed));
}

ObjectiveGradient gradient(const QuadrantSet& q, const LinkModel& link, double n_d_target,
                           int batch_size, std::uint64_t seed) {
  const auto data = training_data_positions(expand_quadrant(q, q.sign_positions), link, n_d_target, seed);
  return gradient(q, link, n_d_target, data, TrainingBatch::draw(q.m, batch_size, seed));
}

OptimizeResult optimize(const QuadrantSet& init, const LinkModel& link, const OptimizerConfig& cfg) {
  cfg.validate(init.m);
  QuadrantSet q = normalize_power(init);
  const auto data =
      training_data_positions(expand_quadrant(q, q.sign_positions), link, cfg.n_d_target, cfg.seed);
  const Problem pb = make_problem(q, link, data, cfg.optimize_launch_power);

  std::vector<double> are, aim;
  split_coords(q, are, aim);
  double rho = link.launch_power_dbm;
  const int q_n = q.size();
  const int n_params = 2 * q_n + 1;
  std::vector<double> m1(static_cast<std::size_t>(n_params), 0.0);
  std::vector<double> m2(static_cast<std::size_t>(n_params), 0.0);
  std::vector<double> g(static_cast<std::size_t>(n_params), 0.0);
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  const long long steps_per_epoch = cfg.n_symbols_total / cfg.batch_size;
  const long long max_steps = steps_per_epoch * cfg.max_epochs;

  OptimizeResult res;
  res.trace.objective.reserve(static_cast<std::size_t>(max_steps));
  res.trace.launch_power_dbm.reserve(static_cast<std::size_t>(max_steps));
  EvalScratch sc;
  ObjectiveGradient og;

  // Constant-step Adam leaves the iterates jittering around the optimum; the
  // returned point is the trajectory average over the last completed epoch,
  // reset at each epoch boundary.
  std::vector<double> avg_re(static_cast<std::size_t>(q_n), 0.0);
  std::vector<double> avg_im(static_cast<std::size_t>(q_n), 0.0);
  double avg_rho = 0.0;
  long long avg_count = 0;

  // Early-stop probe: a fixed common-random-number batch makes epoch-to-epoch
  // objective differences measurable at the configured tolerance.
  const TrainingBatch val_batch =
      TrainingBatch::draw(q.m, static_cast<int>(std::min<long long>(cfg.n_symbols_total, 10000)),
                          mix_seed(cfg.seed, 0x5ca1eULL));
  double val_prev = -std::numeric_limits<double>::infinity();
  std::vector<double> cand_re = are, cand_im = aim;
  double cand_rho = rho;
  bool have_candidate = false;

  for (long long step = 0; step < max_steps; ++step) {
    const TrainingBatch batch = TrainingBatch::draw(q.m, cfg.batch_size, mix_seed(cfg.seed, static_cast<std::uint64_t>(step)));
    eval_batch(pb, are, aim, rho, batch, &og, sc);
    if (!std::isfinite(og.objective)) {
      res.trace.diverged = true;
      break;
    }
    res.trace.objective.push_back(og.objective);
    res.trace.launch_power_dbm.push_back(rho);

    // ascent direction with L2 decay on the coordinates
    for (int j = 0; j < q_n; ++j) {
      g[static_cast<std::size_t>(j)] = og.d_re[static_cast<std::size_t>(j)] - cfg.weight_decay * are[static_cast<std::size_t>(j)];
      g[static_cast<std::size_t>(q_n + j)] = og.d_im[static_cast<std::size_t>(j)] - cfg.weight_decay * aim[static_cast<std::size_t>(j)];
    }
    g[static_cast<std::size_t>(2 * q_n)] = pb.power_active ? og.d_launch_power_dbm : 0.0;

    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step + 1));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step + 1));
    for (int i = 0; i < n_params; ++i) {
      m1[static_cast<std::size_t>(i)] = beta1 * m1[static_cast<std::size_t>(i)] + (1.0 - beta1) * g[static_cast<std::size_t>(i)];
      m2[static_cast<std::size_t>(i)] = beta2 * m2[static_cast<std::size_t>(i)] + (1.0 - beta2) * g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
      const double update = cfg.learning_rate * (m1[static_cast<std::size_t>(i)] / bc1) /
                            (std::sqrt(m2[static_cast<std::size_t>(i)] / bc2) + eps);
      if (i < q_n)
        are[static_cast<std::size_t>(i)] += update;
      else if (i < 2 * q_n)
        aim[static_cast<std::size_t>(i - q_n)] += update;
      else if (pb.power_active)
        rho += update;
    }

    for (int j = 0; j < q_n; ++j) {
      avg_re[static_cast<std::size_t>(j)] += are[static_cast<std::size_t>(j)];
      avg_im[static_cast<std::size_t>(j)] += aim[static_cast<std::size_t>(j)];
    }
    avg_rho += rho;
    ++avg_count;

    res.trace.steps = static_cast<int>(step + 1);
    if ((step + 1) % steps_per_epoch == 0) {
      // candidate = tail average of this epoch
      for (int j = 0; j < q_n; ++j) {
        cand_re[static_cast<std::size_t>(j)] = avg_re[static_cast<std::size_t>(j)] / avg_count;
        cand_im[static_cast<std::size_t>(j)] = avg_im[static_cast<std::size_t>(j)] / avg_count;
      }
      cand_rho = avg_rho / avg_count;
      have_candidate = true;
      const double val = eval_batch(pb, cand_re, cand_im, cand_rho, val_batch, nullptr, sc);
      if (val - val_prev < cfg.convergence_tol) break;
      val_prev = val;
      std::fill(avg_re.begin(), avg_re.end(), 0.0);
      std::fill(avg_im.begin(), avg_im.end(), 0.0);
      avg_rho = 0.0;
      avg_count = 0;
    }
  }

  double gn = 0.0;
  for (double v : g) gn += v * v;
  res.trace.final_grad_norm = std::sqrt(gn);
  if (!have_candidate) {
    cand_re = are;
    cand_im = aim;
    cand_rho = rho;
  }
  q.reduced_points.resize(static_cast<std::size_t>(q_n));
  for (int j = 0; j < q_n; ++j)
    q.reduced_points[static_cast<std::size_t>(j)] =
        cplx(cand_re[static_cast<std::size_t>(j)], cand_im[static_cast<std::size_t>(j)]);
  res.shaped = normalize_power(q);
  res.launch_power_dbm = cand_rho;
  return res;
}

std::pair<OptimizeResult, OptimizeResult> optimize_th(const QuadrantSet& init_low,
                                                      const QuadrantSet& init_high,
                                                      const LinkModel& link,
                                                      const OptimizerConfig& cfg) {
  const double frac = cfg.n_d_target - std::floor(cfg.n_d_target);
  if (frac == 0.0)
    throw std::invalid_argument("optimize_th: integer n_d has nothing to time-share");
  OptimizerConfig lo = cfg;
  lo.n_d_target = std::floor(cfg.n_d_target);
  OptimizerConfig hi = cfg;
  hi.n_d_target = std::ceil(cfg.n_d_target);
  return {optimize(init_low, link, lo), optimize(init_high, link, hi)};
}

}  // namespace mtom
