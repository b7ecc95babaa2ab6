// mtomshape: rate-adaptive geometric constellation shaping toolkit.
// Subcommands: optimize, plan, evaluate, sweep, fit, pas, replay.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mtom/air.hpp"
#include "mtom/channel.hpp"
#include "mtom/constellation.hpp"
#include "mtom/fit.hpp"
#include "mtom/io.hpp"
#include "mtom/optimizer.hpp"
#include "mtom/parallel.hpp"
#include "mtom/pas.hpp"
#include "mtom/rate_plan.hpp"
#include "mtom/sweep.hpp"

namespace {

constexpr const char* kToolVersion = "mtomshape 0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitDomainError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPartialSweep = 3;

struct RunRecord {
  std::string subcommand;
  std::vector<std::string> argv;
  std::map<std::string, std::string> inputs;   // path -> digest
  std::map<std::string, std::string> outputs;  // path -> digest
  std::string manifest_path;
};

void write_manifest(const RunRecord& rec) {
  if (rec.manifest_path.empty()) return;
  nlohmann::json j;
  j["tool"] = kToolVersion;
  j["subcommand"] = rec.subcommand;
  j["argv"] = rec.argv;
  j["inputs"] = rec.inputs;
  j["outputs"] = rec.outputs;
  mtom::write_text_file(rec.manifest_path, j.dump(2) + "\n");
}

void note_input(RunRecord& rec, const std::string& path) {
  if (!path.empty()) rec.inputs[path] = mtom::file_digest(path);
}

void note_output(RunRecord& rec, const std::string& path) {
  if (!path.empty()) rec.outputs[path] = mtom::file_digest(path);
}

std::string default_manifest(const std::string& primary_output) {
  return primary_output.empty() ? std::string() : primary_output + ".manifest.json";
}

mtom::LinkModel resolve_link(const std::string& link_path, double awgn_snr, bool have_awgn,
                             RunRecord& rec) {
  if (!link_path.empty() && have_awgn)
    throw CLI::ValidationError("--link and --awgn-snr are mutually exclusive");
  if (!link_path.empty()) {
    note_input(rec, link_path);
    return mtom::read_link_config(link_path);
  }
  if (have_awgn) return mtom::LinkModel::awgn(awgn_snr);
  throw CLI::ValidationError("one of --link or --awgn-snr is required");
}

void write_trace_csv(const std::string& path, const mtom::TrainingTrace& trace) {
  std::ostringstream out;
  out << "step,objective,launch_power_dbm\n";
  for (std::size_t i = 0; i < trace.objective.size(); ++i)
    out << i << "," << mtom::format_g17(trace.objective[i]) << ","
        << mtom::format_g17(trace.launch_power_dbm[i]) << "\n";
  mtom::write_text_file(path, out.str());
}

void write_air_report_csv(const std::string& path, const mtom::AirReport& rep,
                          const std::string& const_id, const std::string& link_id) {
  std::ostringstream out;
  out << "constellation,link,n_d,seed,n_symbols";
  for (int p = 0; p < rep.m; ++p) out << ",mi_" << (p + 1);
  out << ",gmi,air_mtom,air_pas,halfwidth,order\n";
  out << mtom::csv_field(const_id) << "," << mtom::csv_field(link_id) << ","
      << mtom::format_g17(rep.n_d) << "," << rep.seed << "," << rep.n_symbols;
  for (double mi : rep.per_bit_mi) out << "," << mtom::format_g17(mi);
  std::ostringstream order;
  for (std::size_t i = 0; i < rep.order.order.size(); ++i) {
    if (i) order << " ";
    order << (rep.order.order[i] + 1);
  }
  out << "," << mtom::format_g17(rep.gmi) << "," << mtom::format_g17(rep.air_mtom) << ","
      << mtom::format_g17(rep.air_pas) << "," << mtom::format_g17(rep.confidence_halfwidth) << ","
      << mtom::csv_field(order.str()) << "\n";
  mtom::write_text_file(path, out.str());
}

int run_command(const std::vector<std::string>& args, RunRecord& rec);

int cmd_replay(const std::string& manifest_path, bool verbose) {
  const nlohmann::json j = nlohmann::json::parse(mtom::read_text_file(manifest_path));
  const std::vector<std::string> argv = j.at("argv").get<std::vector<std::string>>();
  for (const auto& [path, digest] : j.at("inputs").items()) {
    if (mtom::file_digest(path) != digest.get<std::string>()) {
      std::cerr << "replay: input changed since the recorded run: " << path << "\n";
      return kExitDomainError;
    }
  }
  RunRecord rec;
  const int code = run_command(argv, rec);
  if (code != kExitOk) {
    std::cerr << "replay: rerun exited with code " << code << "\n";
    return code;
  }
  bool all_ok = true;
  for (const auto& [path, digest] : j.at("outputs").items()) {
    const std::string now = mtom::file_digest(path);
    const bool ok = now == digest.get<std::string>();
    all_ok = all_ok && ok;
    if (verbose || !ok)
      std::cout << (ok ? "match    " : "MISMATCH ") << path << "\n";
  }
  std::cout << (all_ok ? "replay: outputs reproduced bit-identically\n"
                       : "replay: output digests diverged\n");
  return all_ok ? kExitOk : kExitDomainError;
}

int run_command(const std::vector<std::string>& args, RunRecord& rec) {
  CLI::App app{"rate-adaptive geometric constellation shaping toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  int threads = 0;
  app.add_option("--threads", threads, "cap on worker threads (0 = hardware)");

  // ---- optimize ----
  auto* opt = app.add_subcommand("optimize", "shape a constellation for a link via Alg-style Adam ascent");
  int opt_m = 8;
  double opt_nd = 0.0;
  std::string opt_link, opt_init, opt_out = "shaped.const", opt_trace, opt_manifest;
  double opt_awgn = 0.0;
  bool opt_power = false;
  mtom::OptimizerConfig ocfg;
  opt->add_option("--m", opt_m, "bits per symbol")->check(CLI::Range(2, 10));
  opt->add_option("--nd", opt_nd, "dummy bits per symbol target")->required();
  auto* opt_awgn_opt = opt->add_option("--awgn-snr", opt_awgn, "AWGN channel SNR in dB");
  opt->add_option("--link", opt_link, "link config file");
  opt->add_option("--init", opt_init, "warm-start constellation file");
  opt->add_option("--seed", ocfg.seed, "run seed");
  opt->add_option("--symbols", ocfg.n_symbols_total, "training symbols per epoch");
  opt->add_option("--batch", ocfg.batch_size, "batch size");
  opt->add_option("--lr", ocfg.learning_rate, "Adam learning rate");
  opt->add_option("--weight-decay", ocfg.weight_decay, "L2 weight decay");
  opt->add_option("--epochs", ocfg.max_epochs, "maximum epochs");
  opt->add_option("--tol", ocfg.convergence_tol, "early-stop tolerance on the 20-step average");
  opt->add_flag("--optimize-power", opt_power, "co-optimize the launch power");
  opt->add_option("--out", opt_out, "output constellation file");
  opt->add_option("--trace", opt_trace, "training trace CSV");
  opt->add_option("--manifest", opt_manifest, "manifest path");

  // ---- plan ----
  auto* plan = app.add_subcommand("plan", "dummy-bit budgeting and rate-step tables");
  long long plan_k = 54000, plan_n = 64800, plan_nd_bits = -1;
  int plan_m = 8;
  double plan_eta = -1.0, plan_ndmax = 3.0;
  std::string plan_table, plan_manifest;
  plan->add_option("--K", plan_k, "FEC information bits")->required();
  plan->add_option("--N", plan_n, "FEC coded bits")->required();
  plan->add_option("--m", plan_m, "bits per symbol")->required();
  plan->add_option("--target-eta", plan_eta, "target net rate in bits/2D");
  plan->add_option("--ND", plan_nd_bits, "explicit dummy-bit count");
  plan->add_option("--table", plan_table, "write the (N_D, eta, eta_step) table CSV here");
  plan->add_option("--nd-max", plan_ndmax, "table range in n_d");
  plan->add_option("--manifest", plan_manifest, "manifest path");

  // ---- evaluate ----
  auto* eval = app.add_subcommand("evaluate", "Monte Carlo AIR report for a constellation on a link");
  std::string ev_const, ev_link, ev_out = "air_report.csv", ev_manifest;
  double ev_awgn = 0.0, ev_nd = 0.0;
  long long ev_symbols = 100000;
  int ev_blocks = 5;
  std::uint64_t ev_seed = 1;
  eval->add_option("--const", ev_const, "constellation file")->required();
  auto* ev_awgn_opt = eval->add_option("--awgn-snr", ev_awgn, "AWGN channel SNR in dB");
  eval->add_option("--link", ev_link, "link config file");
  eval->add_option("--nd", ev_nd, "dummy bits per symbol");
  eval->add_option("--symbols", ev_symbols, "Monte Carlo symbols");
  eval->add_option("--blocks", ev_blocks, "independent blocks");
  eval->add_option("--seed", ev_seed, "seed");
  eval->add_option("--out", ev_out, "report CSV");
  eval->add_option("--manifest", ev_manifest, "manifest path");

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "figure-reproduction sweeps");
  std::string sw_kind = "awgn", sw_link, sw_out = "sweep.csv", sw_scale = "desk", sw_manifest;
  std::vector<std::string> sw_schemes;
  double sw_r = 0.75, sw_snr_min = 10.0, sw_snr_max = 21.4, sw_snr_step = 0.6, sw_ndmax = 3.0;
  int sw_span_min = 1, sw_span_max = 30, sw_m = 8;
  double sw_pmin = -4.0, sw_pmax = 4.0, sw_pstep = 0.1;
  std::uint64_t sw_seed = 1;
  int sw_epochs = 12;
  sweep->add_option("--kind", sw_kind, "awgn | distance")->check(CLI::IsMember({"awgn", "distance"}));
  sweep->add_option("--m", sw_m, "bits per symbol");
  sweep->add_option("--R", sw_r, "FEC rate");
  sweep->add_option("--snr-min", sw_snr_min, "grid start (awgn)");
  sweep->add_option("--snr-max", sw_snr_max, "grid end (awgn)");
  sweep->add_option("--snr-step", sw_snr_step, "grid step (awgn)");
  sweep->add_option("--link", sw_link, "link config template (distance)");
  sweep->add_option("--span-min", sw_span_min, "span grid start (distance)");
  sweep->add_option("--span-max", sw_span_max, "span grid end (distance)");
  sweep->add_option("--power-min", sw_pmin, "launch power grid start (distance)");
  sweep->add_option("--power-max", sw_pmax, "launch power grid end (distance)");
  sweep->add_option("--power-step", sw_pstep, "launch power grid step (distance)");
  sweep->add_option("--nd-max", sw_ndmax, "dummy-bit grid end");
  sweep->add_option("--scale", sw_scale, "desk | full")->check(CLI::IsMember({"desk", "full"}));
  sweep->add_option("--schemes", sw_schemes, "subset of BRGC MTOM-unshaped MTOM-GCS TH PAS");
  sweep->add_option("--epochs", sw_epochs, "optimizer epochs per cell");
  sweep->add_option("--seed", sw_seed, "seed");
  sweep->add_option("--out", sw_out, "sweep CSV");
  sweep->add_option("--manifest", sw_manifest, "manifest path");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "calibrate the surrogate channel to a measured SNR grid");
  std::string fit_grid, fit_out = "fit_result.txt", fit_link_out, fit_method = "cmaes", fit_manifest;
  std::uint64_t fit_seed = 1;
  long long fit_budget = 4000;
  int fit_m = 8, fit_qbits = 8;
  double fit_span_length = 100.0, fit_dispersion = 22.0, fit_symbol_rate = 32.0, fit_spacing = 50.0,
         fit_center = 192.5;
  int fit_channels = 5;
  fit->add_option("--grid", fit_grid, "measurement CSV (distance_km,power_dbm,snr_db)")->required();
  fit->add_option("--seed", fit_seed, "seed");
  fit->add_option("--budget", fit_budget, "objective evaluation budget");
  fit->add_option("--method", fit_method, "cmaes | neldermead")
      ->check(CLI::IsMember({"cmaes", "neldermead"}));
  fit->add_option("--grid-m", fit_m, "measurement constellation order");
  fit->add_option("--grid-qbits", fit_qbits, "quantization bits during measurement");
  fit->add_option("--span-length", fit_span_length, "skeleton span length km");
  fit->add_option("--dispersion", fit_dispersion, "skeleton dispersion ps/nm/km");
  fit->add_option("--symbol-rate", fit_symbol_rate, "skeleton symbol rate GBd");
  fit->add_option("--spacing", fit_spacing, "skeleton channel spacing GHz");
  fit->add_option("--center-freq", fit_center, "skeleton center frequency THz");
  fit->add_option("--n-channels", fit_channels, "skeleton WDM channel count");
  fit->add_option("--out", fit_out, "fit result (key value lines)");
  fit->add_option("--emit-link", fit_link_out, "also write a link config with the fitted parameters");
  fit->add_option("--manifest", fit_manifest, "manifest path");

  // ---- pas ----
  auto* pas = app.add_subcommand("pas", "Maxwell-Boltzmann baseline: net rates and sweeps");
  int pas_m = 8;
  double pas_h = 6.4, pas_r = 5.0 / 6.0;
  std::string pas_link, pas_out, pas_manifest, pas_hgrid;
  long long pas_symbols = 100000;
  int pas_blocks = 5;
  std::uint64_t pas_seed = 1;
  pas->add_option("--m", pas_m, "bits per symbol");
  pas->add_option("--H", pas_h, "source entropy in bits");
  pas->add_option("--R", pas_r, "FEC rate");
  pas->add_option("--link", pas_link, "link config for an AIR sweep");
  pas->add_option("--h-grid", pas_hgrid, "entropy grid lo:step:hi for the sweep");
  pas->add_option("--symbols", pas_symbols, "Monte Carlo symbols per grid point");
  pas->add_option("--blocks", pas_blocks, "independent blocks");
  pas->add_option("--seed", pas_seed, "seed");
  pas->add_option("--out", pas_out, "sweep CSV");
  pas->add_option("--manifest", pas_manifest, "manifest path");

  // ---- replay ----
  auto* rep = app.add_subcommand("replay", "re-run a manifest and verify output digests");
  std::string rep_manifest;
  bool rep_verbose = false;
  rep->add_option("--manifest", rep_manifest, "manifest to replay")->required();
  rep->add_flag("--verbose", rep_verbose, "list every output");

  std::vector<const char*> argv_c;
  argv_c.push_back("mtomshape");
  for (const auto& a : args) argv_c.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv_c.size()), argv_c.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  mtom::set_thread_cap(threads);
  rec.argv = args;

  if (opt->parsed()) {
    rec.subcommand = "optimize";
    rec.manifest_path = opt_manifest.empty() ? default_manifest(opt_out) : opt_manifest;
    if (opt_nd < 0.0 || opt_nd > opt_m - 2) {
      std::cerr << "optimize: --nd must lie in [0, m-2]\n";
      return kExitUsage;
    }
    const mtom::LinkModel link = resolve_link(opt_link, opt_awgn, !opt_awgn_opt->empty(), rec);
    mtom::QuadrantSet init;
    if (!opt_init.empty()) {
      note_input(rec, opt_init);
      const mtom::ConstellationFile cf = mtom::read_constellation_file(opt_init);
      if (cf.constellation.m != opt_m) throw std::runtime_error("optimize: --init order mismatch");
      init = mtom::reduce_quadrant(cf.constellation, mtom::default_sign_positions(opt_m));
    } else {
      init = mtom::reduce_quadrant(mtom::brgc_qam(opt_m), mtom::default_sign_positions(opt_m));
    }
    ocfg.n_d_target = opt_nd;
    ocfg.optimize_launch_power = opt_power;
    const mtom::OptimizeResult res = mtom::optimize(init, link, ocfg);
    if (res.trace.diverged) {
      if (!opt_trace.empty()) write_trace_csv(opt_trace, res.trace);
      std::cerr << "optimize: objective diverged (NaN); trace "
                << (opt_trace.empty() ? "not requested" : "written") << "\n";
      return kExitDomainError;
    }
    const mtom::Constellation shaped =
        mtom::expand_quadrant(res.shaped, res.shaped.sign_positions);
    mtom::write_constellation_file(opt_out, shaped);
    note_output(rec, opt_out);
    if (!opt_trace.empty()) {
      write_trace_csv(opt_trace, res.trace);
      note_output(rec, opt_trace);
    }
    std::cout << "optimize: " << res.trace.steps << " steps, final objective "
              << mtom::format_g17(res.trace.objective.back()) << ", launch power "
              << mtom::format_g17(res.launch_power_dbm) << " dBm, wrote " << opt_out << "\n";
    write_manifest(rec);
    return kExitOk;
  }

  if (plan->parsed()) {
    rec.subcommand = "plan";
    rec.manifest_path = plan_manifest.empty() ? default_manifest(plan_table) : plan_manifest;
    mtom::RatePlan p{};
    if (plan_nd_bits >= 0) {
      p = mtom::RatePlan{plan_k, plan_n, plan_m, plan_nd_bits};
      p.validate();
    } else if (plan_eta > 0.0) {
      p = mtom::plan_for_target(plan_k, plan_n, plan_m, plan_eta);
    } else {
      std::cerr << "plan: need --target-eta or --ND\n";
      return kExitUsage;
    }
    std::cout << "N_D=" << p.N_D << " n_d=" << p.n_d().str() << " (" << mtom::format_g17(p.n_d().value())
              << ") eta=" << p.eta().str() << " (" << mtom::format_g17(p.eta().value())
              << ") R=" << p.fec_rate().str() << " n_symbols=" << p.n_symbols() << "\n";
    if (!plan_table.empty()) {
      const auto rows = mtom::rate_step_table(plan_k, plan_n, plan_m, plan_ndmax);
      std::ostringstream out;
      out << "N_D,eta,eta_step\n";
      for (const auto& r : rows)
        out << r.N_D << "," << mtom::format_g17(r.eta.value()) << ","
            << mtom::format_g17(r.eta_step.value()) << "\n";
      mtom::write_text_file(plan_table, out.str());
      note_output(rec, plan_table);
    }
    write_manifest(rec);
    return kExitOk;
  }

  if (eval->parsed()) {
    rec.subcommand = "evaluate";
    rec.manifest_path = ev_manifest.empty() ? default_manifest(ev_out) : ev_manifest;
    note_input(rec, ev_const);
    const mtom::ConstellationFile cf = mtom::read_constellation_file(ev_const);
    const mtom::LinkModel link = resolve_link(ev_link, ev_awgn, !ev_awgn_opt->empty(), rec);
    const std::vector<double>* pmf = cf.pmf.empty() ? nullptr : &cf.pmf;
    const mtom::AirReport rep_air =
        mtom::evaluate_air(cf.constellation, link, ev_nd, ev_symbols, ev_blocks, ev_seed, pmf);
    const std::string link_id =
        ev_link.empty() ? "awgn:" + mtom::format_g17(ev_awgn) + "dB" : ev_link;
    write_air_report_csv(ev_out, rep_air, ev_const, link_id);
    note_output(rec, ev_out);
    std::cout << "evaluate: gmi " << mtom::format_g17(rep_air.gmi) << ", air_mtom "
              << mtom::format_g17(rep_air.air_mtom) << " +/- "
              << mtom::format_g17(rep_air.confidence_halfwidth) << ", wrote " << ev_out << "\n";
    write_manifest(rec);
    return kExitOk;
  }

  if (sweep->parsed()) {
    rec.subcommand = "sweep";
    rec.manifest_path = sw_manifest.empty() ? default_manifest(sw_out) : sw_manifest;
    const mtom::SweepScale scale = sw_scale == "full" ? mtom::full_scale() : mtom::desk_scale();
    mtom::SweepResult result;
    if (sw_kind == "awgn") {
      mtom::AwgnSweepConfig cfg;
      cfg.m = sw_m;
      cfg.fec_rate = sw_r;
      cfg.snr_min_db = sw_snr_min;
      cfg.snr_max_db = sw_snr_max;
      cfg.snr_step_db = sw_snr_step;
      cfg.nd_max = sw_ndmax;
      cfg.scale = scale;
      cfg.seed = sw_seed;
      cfg.opt.max_epochs = sw_epochs;
      if (!sw_schemes.empty()) cfg.schemes = sw_schemes;
      result = mtom::awgn_required_snr(cfg);
    } else {
      if (sw_link.empty()) {
        std::cerr << "sweep: --kind distance requires --link\n";
        return kExitUsage;
      }
      note_input(rec, sw_link);
      mtom::DistanceSweepConfig cfg;
      cfg.link = mtom::read_link_config(sw_link);
      cfg.m = sw_m;
      cfg.fec_rate = sw_r;
      cfg.span_min = sw_span_min;
      cfg.span_max = sw_span_max;
      cfg.power_min_dbm = sw_pmin;
      cfg.power_max_dbm = sw_pmax;
      cfg.power_step_dbm = sw_pstep;
      cfg.nd_max = sw_ndmax;
      cfg.scale = scale;
      cfg.seed = sw_seed;
      cfg.opt.max_epochs = sw_epochs;
      if (!sw_schemes.empty()) cfg.schemes = sw_schemes;
      result = mtom::max_distance(cfg);
    }
    mtom::write_sweep_csv(sw_out, result);
    note_output(rec, sw_out);
    write_manifest(rec);
    int failed = 0;
    for (const auto& r : result.records)
      if (r.failed()) ++failed;
    std::cout << "sweep: " << result.records.size() << " records, " << failed
              << " failed cells, wrote " << sw_out << "\n";
    return failed > 0 ? kExitPartialSweep : kExitOk;
  }

  if (fit->parsed()) {
    rec.subcommand = "fit";
    rec.manifest_path = fit_manifest.empty() ? default_manifest(fit_out) : fit_manifest;
    note_input(rec, fit_grid);
    mtom::SnrMeasurementGrid grid;
    grid.records = mtom::read_snr_grid_csv(fit_grid);
    grid.set_constellation(mtom::brgc_qam(fit_m));
    grid.n_qbits = fit_qbits;
    mtom::FiberParams skeleton;
    skeleton.span_length_km = fit_span_length;
    skeleton.dispersion_ps_nm_km = fit_dispersion;
    skeleton.symbol_rate_gbd = fit_symbol_rate;
    skeleton.channel_spacing_ghz = fit_spacing;
    skeleton.center_frequency_thz = fit_center;
    skeleton.n_channels = fit_channels;
    const mtom::FitResult res =
        fit_method == "cmaes"
            ? mtom::cmaes_fit(grid, skeleton, mtom::FitBounds{}, fit_seed, fit_budget)
            : mtom::nelder_mead_fit(grid, skeleton, mtom::FitBounds{}, fit_budget);
    std::ostringstream out;
    out << "nf_db " << mtom::format_g17(res.params.nf_db) << "\n";
    out << "snr_trx_db " << mtom::format_g17(res.params.snr_trx_db) << "\n";
    out << "alpha_db_per_km " << mtom::format_g17(res.params.alpha_db_per_km) << "\n";
    out << "gamma_per_w_km " << mtom::format_g17(res.params.gamma_per_w_km) << "\n";
    out << "max_abs_error_db " << mtom::format_g17(res.max_abs_error_db) << "\n";
    out << "evaluations " << res.evaluations << "\n";
    mtom::write_text_file(fit_out, out.str());
    note_output(rec, fit_out);
    if (!fit_link_out.empty()) {
      mtom::LinkModel link;
      link.fiber = skeleton;
      link.fiber.alpha_db_per_km = res.params.alpha_db_per_km;
      link.fiber.gamma_per_w_km = res.params.gamma_per_w_km;
      link.fiber.amp_nf_db = res.params.nf_db;
      link.fiber.n_spans = 1;
      link.trx.snr_trx_db = res.params.snr_trx_db;
      link.trx.n_qbits = fit_qbits;
      link.nli = mtom::gn_default_coeffs(link.fiber);
      mtom::write_link_config(fit_link_out, link, true);
      note_output(rec, fit_link_out);
    }
    std::cout << "fit: max |error| " << mtom::format_g17(res.max_abs_error_db) << " dB after "
              << res.evaluations << " evaluations, wrote " << fit_out << "\n";
    write_manifest(rec);
    return kExitOk;
  }

  if (pas->parsed()) {
    rec.subcommand = "pas";
    rec.manifest_path = pas_manifest.empty() ? default_manifest(pas_out) : pas_manifest;
    const double net = mtom::pas_net_rate(pas_h, pas_m, pas_r);
    std::cout << "pas: H=" << mtom::format_g17(pas_h) << " m=" << pas_m
              << " R=" << mtom::format_g17(pas_r) << " net_rate=" << mtom::format_g17(net) << "\n";
    if (!pas_link.empty()) {
      if (pas_out.empty()) {
        std::cerr << "pas: sweeps need --out\n";
        return kExitUsage;
      }
      note_input(rec, pas_link);
      const mtom::LinkModel link = mtom::read_link_config(pas_link);
      std::vector<double> grid;
      if (pas_hgrid.empty()) {
        grid.push_back(pas_h);
      } else {
        double lo, step, hi;
        if (std::sscanf(pas_hgrid.c_str(), "%lf:%lf:%lf", &lo, &step, &hi) != 3) {
          std::cerr << "pas: bad --h-grid, expected lo:step:hi\n";
          return kExitUsage;
        }
        for (double h = lo; h <= hi + 1e-9; h += step) grid.push_back(h);
      }
      const auto rowsv = mtom::pas_sweep(mtom::brgc_qam(pas_m), link, grid, pas_r, pas_symbols,
                                         pas_blocks, pas_seed);
      std::ostringstream out;
      out << "h,nu,net_rate,air,snr_db,feasible\n";
      for (const auto& r : rowsv)
        out << mtom::format_g17(r.h) << "," << mtom::format_g17(r.nu) << ","
            << mtom::format_g17(r.net_rate) << "," << mtom::format_g17(r.air) << ","
            << mtom::format_g17(r.snr_db) << "," << (r.feasible ? 1 : 0) << "\n";
      mtom::write_text_file(pas_out, out.str());
      note_output(rec, pas_out);
    }
    write_manifest(rec);
    return kExitOk;
  }

  if (rep->parsed()) {
    rec.subcommand = "replay";
    return cmd_replay(rep_manifest, rep_verbose);
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  RunRecord rec;
  try {
    return run_command(args, rec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
}
