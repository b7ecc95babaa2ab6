#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mtom/air.hpp"
#include "mtom/channel.hpp"
#include "mtom/constellation.hpp"
#include "mtom/fit.hpp"
#include "mtom/io.hpp"
#include "mtom/optimizer.hpp"
#include "mtom/pas.hpp"
#include "mtom/rate_plan.hpp"
#include "mtom/sweep.hpp"

namespace py = pybind11;
using namespace mtom;

PYBIND11_MODULE(_core, m) {
  m.doc() = "rate-adaptive geometric constellation shaping with many-to-one labeling";

  py::class_<Constellation>(m, "Constellation")
      .def(py::init<>())
      .def_readwrite("m", &Constellation::m)
      .def_readwrite("points", &Constellation::points)
      .def_readwrite("labels", &Constellation::labels)
      .def("label_bit", &Constellation::label_bit)
      .def("__len__", [](const Constellation& c) { return c.size(); });

  py::class_<QuadrantSet>(m, "QuadrantSet")
      .def(py::init<>())
      .def_readwrite("m", &QuadrantSet::m)
      .def_readwrite("reduced_points", &QuadrantSet::reduced_points)
      .def_readwrite("sign_positions", &QuadrantSet::sign_positions);

  py::class_<Moments>(m, "Moments")
      .def_readonly("mu2", &Moments::mu2)
      .def_readonly("mu4", &Moments::mu4)
      .def_readonly("mu6", &Moments::mu6)
      .def_readonly("papr", &Moments::papr);

  py::class_<ReliabilityOrder>(m, "ReliabilityOrder")
      .def_readonly("order", &ReliabilityOrder::order);

  m.def("brgc_qam", &brgc_qam, py::arg("m"));
  m.def("normalize_power", py::overload_cast<const Constellation&>(&normalize_power));
  m.def("default_sign_positions", &default_sign_positions);
  m.def("expand_quadrant", &expand_quadrant);
  m.def("reduce_quadrant", &reduce_quadrant);
  m.def(
      "moments",
      [](const Constellation& c, const std::optional<std::vector<double>>& pmf) {
        return pmf ? moments(c, &*pmf) : moments(c);
      },
      py::arg("constellation"), py::arg("pmf") = std::nullopt);
  m.def("merge_groups", &merge_groups, py::arg("constellation"), py::arg("threshold") = 1e-2);
  m.def("reliability_order", &reliability_order, py::arg("constellation"), py::arg("link"),
        py::arg("n_mc"), py::arg("seed"));

  py::class_<FiberParams>(m, "FiberParams")
      .def(py::init<>())
      .def_readwrite("alpha_db_per_km", &FiberParams::alpha_db_per_km)
      .def_readwrite("dispersion_ps_nm_km", &FiberParams::dispersion_ps_nm_km)
      .def_readwrite("gamma_per_w_km", &FiberParams::gamma_per_w_km)
      .def_readwrite("span_length_km", &FiberParams::span_length_km)
      .def_readwrite("n_spans", &FiberParams::n_spans)
      .def_readwrite("amp_nf_db", &FiberParams::amp_nf_db)
      .def_readwrite("center_frequency_thz", &FiberParams::center_frequency_thz)
      .def_readwrite("n_channels", &FiberParams::n_channels)
      .def_readwrite("symbol_rate_gbd", &FiberParams::symbol_rate_gbd)
      .def_readwrite("channel_spacing_ghz", &FiberParams::channel_spacing_ghz);

  py::class_<TrxParams>(m, "TrxParams")
      .def(py::init<>())
      .def_readwrite("snr_trx_db", &TrxParams::snr_trx_db)
      .def_readwrite("n_qbits", &TrxParams::n_qbits)
      .def_readwrite("headroom", &TrxParams::headroom);

  py::class_<NliCoeffs>(m, "NliCoeffs")
      .def(py::init<>())
      .def_readwrite("c0", &NliCoeffs::c0)
      .def_readwrite("c1", &NliCoeffs::c1)
      .def_readwrite("c2", &NliCoeffs::c2);

  py::class_<LinkModel>(m, "LinkModel")
      .def(py::init<>())
      .def_static("awgn", &LinkModel::awgn)
      .def_readwrite("fiber", &LinkModel::fiber)
      .def_readwrite("trx", &LinkModel::trx)
      .def_readwrite("launch_power_dbm", &LinkModel::launch_power_dbm)
      .def_readwrite("nli", &LinkModel::nli)
      .def("with_launch_power", &LinkModel::with_launch_power);

  py::class_<EffectiveSnr>(m, "EffectiveSnr")
      .def_readonly("snr_db", &EffectiveSnr::snr_db)
      .def_readonly("sigma2_awgn", &EffectiveSnr::sigma2_awgn);

  m.def("ase_snr", &ase_snr);
  m.def("gn_default_coeffs", &gn_default_coeffs);
  m.def("nli_variance", &nli_variance);
  m.def("effective_snr", &effective_snr);
  m.def(
      "simulate",
      [](const LinkModel& link, const Constellation& c, const std::vector<int>& idx,
         std::uint64_t seed, const std::optional<std::vector<double>>& pmf) {
        return simulate(link, c, idx, seed, pmf ? &*pmf : nullptr);
      },
      py::arg("link"), py::arg("constellation"), py::arg("symbol_indices"), py::arg("seed"),
      py::arg("pmf") = std::nullopt);

  py::class_<AirEvaluation>(m, "AirEvaluation")
      .def_readonly("m", &AirEvaluation::m)
      .def_readonly("n", &AirEvaluation::n)
      .def_readonly("mean_logp", &AirEvaluation::mean_logp)
      .def_readonly("per_bit_mi", &AirEvaluation::per_bit_mi)
      .def_readonly("order", &AirEvaluation::order)
      .def("air_at", &AirEvaluation::air_at)
      .def("halfwidth_at", &AirEvaluation::halfwidth_at)
      .def("gmi", &AirEvaluation::gmi)
      .def("pas_rate", &AirEvaluation::pas_rate);

  m.def(
      "evaluate_bits_mc",
      [](const Constellation& c, const LinkModel& link, long long n_symbols, int n_blocks,
         std::uint64_t seed, const std::optional<std::vector<double>>& pmf) {
        return evaluate_bits_mc(c, link, n_symbols, n_blocks, seed, pmf ? &*pmf : nullptr);
      },
      py::arg("constellation"), py::arg("link"), py::arg("n_symbols"), py::arg("n_blocks") = 5,
      py::arg("seed") = 1, py::arg("pmf") = std::nullopt);
  m.def("air_mtom", &air_mtom, py::arg("bce_ordered"), py::arg("n_d"), py::arg("m"));
  m.def("air_th", &air_th);

  py::class_<OptimizerConfig>(m, "OptimizerConfig")
      .def(py::init<>())
      .def_readwrite("n_symbols_total", &OptimizerConfig::n_symbols_total)
      .def_readwrite("batch_size", &OptimizerConfig::batch_size)
      .def_readwrite("learning_rate", &OptimizerConfig::learning_rate)
      .def_readwrite("weight_decay", &OptimizerConfig::weight_decay)
      .def_readwrite("n_d_target", &OptimizerConfig::n_d_target)
      .def_readwrite("seed", &OptimizerConfig::seed)
      .def_readwrite("optimize_launch_power", &OptimizerConfig::optimize_launch_power)
      .def_readwrite("max_epochs", &OptimizerConfig::max_epochs)
      .def_readwrite("convergence_tol", &OptimizerConfig::convergence_tol);

  py::class_<TrainingTrace>(m, "TrainingTrace")
      .def_readonly("objective", &TrainingTrace::objective)
      .def_readonly("launch_power_dbm", &TrainingTrace::launch_power_dbm)
      .def_readonly("final_grad_norm", &TrainingTrace::final_grad_norm)
      .def_readonly("steps", &TrainingTrace::steps)
      .def_readonly("diverged", &TrainingTrace::diverged);

  py::class_<OptimizeResult>(m, "OptimizeResult")
      .def_readonly("shaped", &OptimizeResult::shaped)
      .def_readonly("launch_power_dbm", &OptimizeResult::launch_power_dbm)
      .def_readonly("trace", &OptimizeResult::trace);

  m.def("optimize", &optimize, py::arg("init"), py::arg("link"), py::arg("config"));
  m.def("optimize_th", &optimize_th);

  py::class_<RatePlan>(m, "RatePlan")
      .def(py::init<long long, long long, int, long long>(), py::arg("K"), py::arg("N"),
           py::arg("m"), py::arg("N_D"))
      .def_readonly("K", &RatePlan::K)
      .def_readonly("N", &RatePlan::N)
      .def_readonly("m", &RatePlan::m)
      .def_readonly("N_D", &RatePlan::N_D)
      .def("n_d", [](const RatePlan& p) { return p.n_d().value(); })
      .def("eta", [](const RatePlan& p) { return p.eta().value(); })
      .def("fec_rate", [](const RatePlan& p) { return p.fec_rate().value(); })
      .def("n_symbols", &RatePlan::n_symbols)
      .def("validate", &RatePlan::validate);

  m.def("plan_for_target", &plan_for_target, py::arg("K"), py::arg("N"), py::arg("m"),
        py::arg("eta_target"));

  py::class_<MBPmf>(m, "MBPmf")
      .def_readonly("nu", &MBPmf::nu)
      .def_readonly("probs", &MBPmf::probs)
      .def_readonly("entropy", &MBPmf::entropy);

  m.def("mb_pmf", &mb_pmf);
  m.def("mb_for_entropy", &mb_for_entropy);
  m.def("renormalize_power", &renormalize_power);
  m.def("pas_net_rate", &pas_net_rate, py::arg("h_bits"), py::arg("m"), py::arg("fec_rate"));
  m.def("sample_pmf", &sample_pmf);

  py::class_<FitParams>(m, "FitParams")
      .def(py::init<>())
      .def_readwrite("nf_db", &FitParams::nf_db)
      .def_readwrite("snr_trx_db", &FitParams::snr_trx_db)
      .def_readwrite("alpha_db_per_km", &FitParams::alpha_db_per_km)
      .def_readwrite("gamma_per_w_km", &FitParams::gamma_per_w_km);

  py::class_<SnrMeasurement>(m, "SnrMeasurement")
      .def(py::init<>())
      .def_readwrite("distance_km", &SnrMeasurement::distance_km)
      .def_readwrite("power_dbm", &SnrMeasurement::power_dbm)
      .def_readwrite("snr_db", &SnrMeasurement::snr_db);

  py::class_<SnrMeasurementGrid>(m, "SnrMeasurementGrid")
      .def(py::init<>())
      .def_readwrite("records", &SnrMeasurementGrid::records)
      .def_readwrite("n_qbits", &SnrMeasurementGrid::n_qbits)
      .def("set_constellation", &SnrMeasurementGrid::set_constellation);

  py::class_<FitBounds>(m, "FitBounds").def(py::init<>());

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("params", &FitResult::params)
      .def_readonly("max_abs_error_db", &FitResult::max_abs_error_db)
      .def_readonly("objective_trace", &FitResult::objective_trace)
      .def_readonly("evaluations", &FitResult::evaluations);

  py::class_<ConstellationFile>(m, "ConstellationFile")
      .def_readonly("constellation", &ConstellationFile::constellation)
      .def_readonly("pmf", &ConstellationFile::pmf)
      .def_readonly("power_normalized", &ConstellationFile::power_normalized);

  m.def(
      "write_constellation_file",
      [](const std::string& path, const Constellation& c,
         const std::optional<std::vector<double>>& pmf) {
        write_constellation_file(path, c, pmf ? &*pmf : nullptr);
      },
      py::arg("path"), py::arg("constellation"), py::arg("pmf") = std::nullopt);
  m.def("read_constellation_file", &read_constellation_file);
  m.def("write_link_config", &write_link_config, py::arg("path"), py::arg("link"),
        py::arg("include_nli") = true);
  m.def("read_link_config", &read_link_config);

  m.def("model_snr_db", &model_snr_db);
  m.def("fit_objective", &fit_objective);
  m.def("cmaes_fit", &cmaes_fit, py::arg("grid"), py::arg("skeleton"),
        py::arg("bounds") = FitBounds{}, py::arg("seed") = 1, py::arg("budget") = 4000);
  m.def("nelder_mead_fit", &nelder_mead_fit, py::arg("grid"), py::arg("skeleton"),
        py::arg("bounds") = FitBounds{}, py::arg("budget") = 4000);
}
