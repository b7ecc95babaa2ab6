#pragma once

#include <vector>

#include "mtom/constellation.hpp"

// Test-only numerical-integration oracles, implemented independently of the
// library's Monte Carlo estimators.
namespace mtom_oracle {

// Physicists' Gauss-Hermite rule: integral of exp(-t^2) f(t) dt.
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Per-label-position MI of the mismatched-Gaussian demapper by 2-D quadrature
// over the AWGN channel. channel_sigma2 is the total complex noise variance,
// demap_sigma2 the demapper variance.
std::vector<double> per_bit_mi_quadrature(const mtom::Constellation& c, double channel_sigma2,
                                          double demap_sigma2, int n_nodes = 48,
                                          const std::vector<double>* prior = nullptr);

// Matched-demapper GMI at the given SNR (uniform prior).
double gmi_quadrature(const mtom::Constellation& c, double snr_db, int n_nodes = 48);

// MI of one Gray-labeled PAM bit by 1-D quadrature (real channel, per-dim
// noise variance sigma2_dim), used to cross-check the 2-D path on square QAM.
double pam_bit_mi_quadrature(const std::vector<double>& levels,
                             const std::vector<int>& bit_of_level, double sigma2_dim,
                             int n_nodes = 64);

}  // namespace mtom_oracle
