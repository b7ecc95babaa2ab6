#pragma once

#include <cstdint>
#include <vector>

#include "mtom/constellation.hpp"

namespace mtom {

struct FiberParams {
  double alpha_db_per_km = 0.2;
  double dispersion_ps_nm_km = 17.0;
  double gamma_per_w_km = 1.3;
  double span_length_km = 100.0;
  int n_spans = 0;
  double amp_nf_db = 5.0;
  double center_frequency_thz = 192.5;
  int n_channels = 5;
  double symbol_rate_gbd = 32.0;
  double channel_spacing_ghz = 50.0;

  void validate() const;
};

struct TrxParams {
  double snr_trx_db = 35.0;  // implementation penalty; +inf disables it
  int n_qbits = 8;           // quantization bits per real dimension; 0 disables quantization
  double headroom = 1.1;     // dynamic-range factor on the peak coordinate

  void validate() const;
};

// sigma2_nli = P^3 * n_spans * (c0 + c1*(mu4-2) + c2*(mu6-6)), units 1/W^2.
struct NliCoeffs {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

struct LinkModel {
  FiberParams fiber;
  TrxParams trx;
  double launch_power_dbm = 0.0;
  NliCoeffs nli;

  // Memoryless AWGN channel at a fixed SNR: no spans, no NLI, no quantization.
  static LinkModel awgn(double snr_db);

  LinkModel with_launch_power(double dbm) const {
    LinkModel l = *this;
    l.launch_power_dbm = dbm;
    return l;
  }
  bool nli_active() const { return fiber.n_spans > 0 && (nli.c0 != 0.0 || nli.c1 != 0.0 || nli.c2 != 0.0); }
};

struct EffectiveSnr {
  double snr_db = 0.0;
  double sigma2_awgn = 0.0;  // 1/SNR on the unit-power signal scale
};

struct QuantizerSpec {
  double delta = 0.0;       // dynamic range per real dimension
  double q_variance = 0.0;  // total quantization variance per complex sample (demapper term)
};

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return 1e-3 * db_to_lin(dbm); }

// SNR against amplified spontaneous emission noise, in dB. Span gain exactly
// compensates span loss; reference bandwidth is the symbol rate. +inf when
// n_spans = 0.
double ase_snr(const FiberParams& fiber, double launch_power_dbm);

// Incoherent closed-form GN estimate of c0 over the WDM comb, with the
// higher-order moment corrections c1, c2 defaulted to fixed fractions of c0.
NliCoeffs gn_default_coeffs(const FiberParams& fiber);

// Nonlinear interference variance per complex symbol, in W.
double nli_variance(const FiberParams& fiber, const NliCoeffs& coeffs, double mu4, double mu6,
                    double launch_power_w);

// 1/SNR = 1/SNR_TRX + 1/SNR_ASE + 1/SNR_NLI composed in the linear domain.
EffectiveSnr effective_snr(const LinkModel& link, double mu4, double mu6);

QuantizerSpec quantizer_spec(const Constellation& c, const TrxParams& trx);

// y_k = x_k + n_k + w_dac + w_adc, deterministic per seed. The uniform DAC and
// ADC contributions split quantizer_spec().q_variance equally. pmf weights the
// source moments entering the NLI variance (default uniform).
std::vector<cplx> simulate(const LinkModel& link, const Constellation& c,
                           const std::vector<int>& symbol_indices, std::uint64_t seed,
                           const std::vector<double>* pmf = nullptr);

}  // namespace mtom
