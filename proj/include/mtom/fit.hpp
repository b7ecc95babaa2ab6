#pragma once

#include <cstdint>
#include <vector>

#include "mtom/channel.hpp"
#include "mtom/constellation.hpp"

namespace mtom {

struct SnrMeasurement {
  double distance_km = 0.0;
  double power_dbm = 0.0;
  double snr_db = 0.0;
};

// Measured effective-SNR grid plus the metadata needed to run the surrogate
// model at each grid point: moments and peak coordinate of the measurement
// constellation, and the quantizer setting.
struct SnrMeasurementGrid {
  std::vector<SnrMeasurement> records;
  double mu4 = 0.0;
  double mu6 = 0.0;
  double peak_coord = 0.0;  // unit-power scale
  int n_qbits = 8;
  double headroom = 1.1;

  void set_constellation(const Constellation& c);
  void validate() const;
};

struct FitParams {
  double nf_db = 0.0;
  double snr_trx_db = 0.0;
  double alpha_db_per_km = 0.0;
  double gamma_per_w_km = 0.0;
};

struct FitBounds {
  FitParams lo{3.0, 10.0, 0.1, 0.3};
  FitParams hi{12.0, 40.0, 0.3, 2.0};
};

// Surrogate-model SNR prediction at one grid point: Eq-style composition with
// GN-derived NLI coefficients recomputed from the candidate fiber parameters.
double model_snr_db(const FitParams& params, const FiberParams& skeleton,
                    const SnrMeasurementGrid& meta, double distance_km, double power_dbm);

// max over the grid of |model - measured| in dB; +inf for non-physical params.
double fit_objective(const FitParams& params, const SnrMeasurementGrid& grid,
                     const FiberParams& skeleton);

struct FitResult {
  FitParams params;
  double max_abs_error_db = 0.0;
  std::vector<double> objective_trace;  // best-so-far per generation/iteration
  long long evaluations = 0;
};

// (mu/mu_w, lambda) CMA-ES with lambda = 4 + floor(3 ln n), candidates kept
// physical through a logistic box warp. Deterministic per seed.
FitResult cmaes_fit(const SnrMeasurementGrid& grid, const FiberParams& skeleton,
                    const FitBounds& bounds, std::uint64_t seed, long long budget);

// Deterministic Nelder-Mead fallback in the same warped space.
FitResult nelder_mead_fit(const SnrMeasurementGrid& grid, const FiberParams& skeleton,
                          const FitBounds& bounds, long long budget);

}  // namespace mtom
