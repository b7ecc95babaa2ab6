#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtom/channel.hpp"
#include "mtom/constellation.hpp"
#include "mtom/optimizer.hpp"

namespace mtom {

// Monte Carlo sizing for sweep cells. Desk scale trades tightness for turn-
// around; full scale matches the study protocol (5 blocks of 100k symbols,
// n_d step 0.05).
struct SweepScale {
  long long block_symbols = 20000;
  int n_blocks = 5;
  double nd_step = 0.25;

  long long eval_symbols() const { return block_symbols * n_blocks; }
};

inline SweepScale desk_scale() { return SweepScale{20000, 5, 0.25}; }
inline SweepScale full_scale() { return SweepScale{100000, 5, 0.05}; }

struct SweepRecord {
  std::string scenario;
  std::string scheme;  // BRGC | MTOM-unshaped | MTOM-GCS | TH | PAS
  double net_rate = 0.0;
  double n_d = -1.0;     // -1 when not applicable
  double entropy = -1.0; // PAS only
  double knob = 0.0;         // required SNR (dB) or max span count
  double knob_interp = 0.0;  // interpolated SNR crossing, or best power (dBm)
  double air = 0.0;          // AIR at the reported operating point
  bool feasible = false;
  std::uint64_t seed = 0;
  std::string error;  // non-empty when the cell failed; the sweep continues

  bool failed() const { return !error.empty(); }
};

struct SweepResult {
  std::vector<SweepRecord> records;

  bool any_failed() const {
    for (const auto& r : records)
      if (r.failed()) return true;
    return false;
  }
};

struct AwgnSweepConfig {
  int m = 8;
  double fec_rate = 0.75;
  double snr_min_db = 10.0;
  double snr_max_db = 21.4;
  double snr_step_db = 0.6;
  double nd_max = 3.0;
  SweepScale scale = desk_scale();
  OptimizerConfig opt;  // n_d_target is overridden per cell
  std::uint64_t seed = 1;
  std::vector<std::string> schemes = {"BRGC", "MTOM-unshaped", "MTOM-GCS", "TH"};
};

// Minimum grid SNR at which each scheme reaches each target net rate
// (ideal-FEC criterion AIR >= rate). MTOM rates come from the n_d grid,
// conventional QAM rates from the format sizes.
SweepResult awgn_required_snr(const AwgnSweepConfig& cfg);

struct DistanceSweepConfig {
  LinkModel link;  // template; n_spans and launch power are swept
  int m = 8;
  double fec_rate = 5.0 / 6.0;
  int span_min = 1;
  int span_max = 30;
  double power_min_dbm = -4.0;
  double power_max_dbm = 4.0;
  double power_step_dbm = 0.1;
  double nd_max = 3.0;
  SweepScale scale = desk_scale();
  OptimizerConfig opt;
  std::uint64_t seed = 1;
  std::vector<std::string> schemes = {"MTOM-unshaped", "MTOM-GCS"};
};

// Maximum span count at which each scheme keeps AIR above the target rate,
// with a launch-power sweep per distance for the non-optimized schemes and
// power co-optimization for MTOM-GCS.
SweepResult max_distance(const DistanceSweepConfig& cfg);

void write_sweep_csv(const std::string& path, const SweepResult& result);

}  // namespace mtom
