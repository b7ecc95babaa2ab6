#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mtom/air.hpp"
#include "mtom/channel.hpp"
#include "mtom/constellation.hpp"

namespace mtom {

struct OptimizerConfig {
  long long n_symbols_total = 100000;  // symbols per epoch
  int batch_size = 500;
  double learning_rate = 1e-3;
  double weight_decay = 1e-5;  // L2, applied to point coordinates
  double n_d_target = 0.0;
  std::uint64_t seed = 1;
  bool optimize_launch_power = false;
  int max_epochs = 20;
  double convergence_tol = 1e-4;  // bits, on a 20-step moving average of OF

  void validate(int m) const;
};

struct TrainingTrace {
  std::vector<double> objective;          // per step
  std::vector<double> launch_power_dbm;   // per step
  double final_grad_norm = 0.0;
  int steps = 0;
  bool diverged = false;
};

struct OptimizeResult {
  QuadrantSet shaped;        // unit-power normalized
  double launch_power_dbm = 0.0;
  TrainingTrace trace;
};

// One Monte Carlo batch: reduced-point indices a_k, sign indices s_k, and the
// reparameterized noise draws consumed by the channel.
struct TrainingBatch {
  std::vector<int> a;   // in [0, 2^(m-2))
  std::vector<int> s;   // in [0, 4): bit0 = Re sign, bit1 = Im sign
  std::vector<double> eps_re, eps_im;      // unit Gaussians
  std::vector<double> dac_re, dac_im;      // uniform in [-1, 1]
  std::vector<double> adc_re, adc_im;

  static TrainingBatch draw(int m, int batch_size, std::uint64_t seed);
  std::size_t size() const { return a.size(); }
};

struct ObjectiveGradient {
  double objective = 0.0;
  std::vector<double> d_re;  // dOF/dRe(reduced point j)
  std::vector<double> d_im;
  double d_launch_power_dbm = 0.0;
};

// Eq-style MTOM objective OF = m + sum over data positions of E[log2 p(u|y)],
// with n_d_target rounded to the nearest integer, NLI variance and
// quantization recomputed from the current points each call. Deterministic
// in (points, seed). data_positions are the label positions carrying data
// (normally the m - round(n_d) most reliable ones).
double objective(const QuadrantSet& q, const LinkModel& link, double n_d_target,
                 const std::vector<int>& data_positions, const TrainingBatch& batch);

// Exact gradient of the same Monte Carlo objective with reparameterized noise,
// differentiated through point positions, power normalization, moments, the
// quantizer range, the NLI variance and the likelihoods.
ObjectiveGradient gradient(const QuadrantSet& q, const LinkModel& link, double n_d_target,
                           const std::vector<int>& data_positions, const TrainingBatch& batch);

// Convenience forms that draw the batch from the seed and rank positions by
// reliability of the expanded constellation on the link.
double objective(const QuadrantSet& q, const LinkModel& link, double n_d_target, int batch_size,
                 std::uint64_t seed);
ObjectiveGradient gradient(const QuadrantSet& q, const LinkModel& link, double n_d_target,
                           int batch_size, std::uint64_t seed);

// Data positions used for a given rounded dummy-bit count: the m - round(n_d)
// most reliable label positions of c on the link.
std::vector<int> training_data_positions(const Constellation& c, const LinkModel& link,
                                         double n_d_target, std::uint64_t seed);

// Adam-driven stochastic ascent per the block-diagram loop: fresh batch per
// step, per-step projection back to unit power, fixed labels throughout.
OptimizeResult optimize(const QuadrantSet& init, const LinkModel& link, const OptimizerConfig& cfg);

// Time-sharing variant: independent runs at floor(n_d) and ceil(n_d).
// Rejects integer n_d (nothing to time-share).
std::pair<OptimizeResult, OptimizeResult> optimize_th(const QuadrantSet& init_low,
                                                      const QuadrantSet& init_high,
                                                      const LinkModel& link,
                                                      const OptimizerConfig& cfg);

}  // namespace mtom
