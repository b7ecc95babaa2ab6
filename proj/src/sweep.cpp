#include "mtom/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "mtom/air.hpp"
#include "mtom/io.hpp"
#include "mtom/parallel.hpp"
#include "mtom/pas.hpp"
#include "mtom/rng.hpp"

namespace mtom {

namespace {

std::vector<double> make_grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (double v = lo; v <= hi + 1e-9; v += step) g.push_back(v);
  return g;
}

double interp_crossing(double knob_prev, double knob_cur, double air_prev, double air_cur,
                       double rate) {
  if (!(air_cur > air_prev)) return knob_cur;
  const double f = (rate - air_prev) / (air_cur - air_prev);
  return knob_prev + f * (knob_cur - knob_prev);
}

// Required-SNR walk over an ascending grid given a feasibility probe
// returning the AIR at each grid point.
template <typename AirFn>
SweepRecord walk_required_snr(const std::vector<double>& snr_grid, double rate, AirFn&& air_fn,
                              SweepRecord rec) {
  double air_prev = std::numeric_limits<double>::quiet_NaN();
  rec.feasible = false;
  for (std::size_t i = 0; i < snr_grid.size(); ++i) {
    // capacity prefilter: no scheme can be feasible above Shannon
    if (std::log2(1.0 + db_to_lin(snr_grid[i])) < rate) continue;
    const double air = air_fn(snr_grid[i], i);
    if (air >= rate) {
      rec.feasible = true;
      rec.knob = snr_grid[i];
      rec.air = air;
      rec.knob_interp = i == 0 || std::isnan(air_prev)
                            ? snr_grid[i]
                            : interp_crossing(snr_grid[i - 1], snr_grid[i], air_prev, air, rate);
      return rec;
    }
    air_prev = air;
  }
  rec.knob = std::numeric_limits<double>::infinity();
  rec.knob_interp = rec.knob;
  rec.air = air_prev;
  return rec;
}

bool has_scheme(const std::vector<std::string>& schemes, const std::string& s) {
  return std::find(schemes.begin(), schemes.end(), s) != schemes.end();
}

// Runs one sweep cell, trapping failures into the record so a sweep continues
// past broken cells.
template <typename Fn>
SweepRecord guarded_cell(SweepRecord rec, Fn&& fn) {
  try {
    return fn(std::move(rec));
  } catch (const std::exception& e) {
    rec.error = e.what();
    return rec;
  }
}

}  // namespace

SweepResult awgn_required_snr(const AwgnSweepConfig& cfg) {
  if (cfg.m < 5) throw std::invalid_argument("awgn sweep: m must be >= 5");
  const std::vector<double> snr_grid = make_grid(cfg.snr_min_db, cfg.snr_max_db, cfg.snr_step_db);
  const std::vector<double> nd_grid = make_grid(0.0, cfg.nd_max, cfg.scale.nd_step);
  if (snr_grid.empty() || nd_grid.empty()) throw std::invalid_argument("awgn sweep: empty grid");
  const double r_fec = cfg.fec_rate;
  SweepResult result;

  // Conventional-QAM GMI cache shared by the BRGC and TH schemes.
  std::vector<int> sizes;
  for (int mc = 5; mc <= cfg.m; ++mc)
    if (mc % 2 == 0 || mc == 5 || mc == 7) sizes.push_back(mc);
  std::map<std::pair<int, std::size_t>, double> gmi_cache;
  std::mutex gmi_mutex;
  auto conventional_gmi = [&](int mc, std::size_t snr_idx) {
    {
      std::lock_guard<std::mutex> lock(gmi_mutex);
      const auto it = gmi_cache.find({mc, snr_idx});
      if (it != gmi_cache.end()) return it->second;
    }
    const Constellation c = brgc_qam(mc);
    const AirEvaluation ev =
        evaluate_bits_mc(c, LinkModel::awgn(snr_grid[snr_idx]), cfg.scale.eval_symbols(),
                         cfg.scale.n_blocks, mix_seed(cfg.seed, 1000 * mc + snr_idx));
    std::lock_guard<std::mutex> lock(gmi_mutex);
    gmi_cache[{mc, snr_idx}] = ev.gmi();
    return ev.gmi();
  };

  if (has_scheme(cfg.schemes, "BRGC")) {
    for (int mc : sizes) {
      SweepRecord rec;
      rec.scenario = "awgn";
      rec.scheme = "BRGC";
      rec.net_rate = r_fec * mc;
      rec.seed = cfg.seed;
      result.records.push_back(guarded_cell(rec, [&](SweepRecord r) {
        return walk_required_snr(
            snr_grid, r.net_rate, [&](double, std::size_t i) { return conventional_gmi(mc, i); }, r);
      }));
    }
  }

  if (has_scheme(cfg.schemes, "MTOM-unshaped")) {
    const Constellation conv = brgc_qam(cfg.m);
    std::vector<AirEvaluation> evals(snr_grid.size());
    std::vector<bool> have(snr_grid.size(), false);
    auto eval_at = [&](std::size_t i) -> const AirEvaluation& {
      if (!have[i]) {
        evals[i] = evaluate_bits_mc(conv, LinkModel::awgn(snr_grid[i]), cfg.scale.eval_symbols(),
                                    cfg.scale.n_blocks, mix_seed(cfg.seed, 777000 + i));
        have[i] = true;
      }
      return evals[i];
    };
    for (double nd : nd_grid) {
      SweepRecord rec;
      rec.scenario = "awgn";
      rec.scheme = "MTOM-unshaped";
      rec.n_d = nd;
      rec.net_rate = r_fec * (cfg.m - nd);
      rec.seed = cfg.seed;
      result.records.push_back(guarded_cell(rec, [&](SweepRecord r) {
        return walk_required_snr(
            snr_grid, r.net_rate, [&](double, std::size_t i) { return eval_at(i).air_at(nd); }, r);
      }));
    }
  }

  if (has_scheme(cfg.schemes, "TH")) {
    for (double nd : nd_grid) {
      const double rate = r_fec * (cfg.m - nd);
      SweepRecord rec;
      rec.scenario = "awgn";
      rec.scheme = "TH";
      rec.n_d = nd;
      rec.net_rate = rate;
      rec.seed = cfg.seed;
      auto th_air = [&](double, std::size_t i) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < sizes.size(); ++a) {
          const double ra = r_fec * sizes[a];
          if (std::abs(ra - rate) < 1e-12) best = std::max(best, conventional_gmi(sizes[a], i));
          for (std::size_t b = a + 1; b < sizes.size(); ++b) {
            const double rb = r_fec * sizes[b];
            if (rate < ra - 1e-12 || rate > rb + 1e-12) continue;
            const double t = (rate - ra) / (rb - ra);
            best = std::max(best, t * conventional_gmi(sizes[b], i) +
                                      (1.0 - t) * conventional_gmi(sizes[a], i));
          }
        }
        return best;
      };
      result.records.push_back(guarded_cell(rec, [&](SweepRecord r) {
        return walk_required_snr(snr_grid, rate, th_air, r);
      }));
    }
  }

  if (has_scheme(cfg.schemes, "MTOM-GCS")) {
    std::vector<SweepRecord> gcs_records(nd_grid.size());
    parallel_for_blocks(nd_grid.size(), [&](std::size_t cell) {
      const double nd = nd_grid[cell];
      const std::uint64_t cell_seed = mix_seed(cfg.seed, 555000 + cell);
      SweepRecord rec;
      rec.scenario = "awgn";
      rec.scheme = "MTOM-GCS";
      rec.n_d = nd;
      rec.net_rate = r_fec * (cfg.m - nd);
      rec.seed = cell_seed;
      QuadrantSet warm = reduce_quadrant(brgc_qam(cfg.m), default_sign_positions(cfg.m));
      auto gcs_air = [&](double snr, std::size_t i) {
        const LinkModel link = LinkModel::awgn(snr);
        OptimizerConfig oc = cfg.opt;
        oc.n_d_target = nd;
        oc.seed = mix_seed(cell_seed, i);
        oc.optimize_launch_power = false;
        const OptimizeResult opt = optimize(warm, link, oc);
        if (!opt.trace.diverged) warm = opt.shaped;
        const Constellation shaped = expand_quadrant(opt.shaped, opt.shaped.sign_positions);
        const AirEvaluation ev = evaluate_bits_mc(shaped, link, cfg.scale.eval_symbols(),
                                                  cfg.scale.n_blocks, mix_seed(cell_seed, 900 + i));
        return ev.air_at(nd);
      };
      gcs_records[cell] = guarded_cell(rec, [&](SweepRecord r) {
        return walk_required_snr(snr_grid, r.net_rate, gcs_air, r);
      });
    });
    for (auto& r : gcs_records) result.records.push_back(std::move(r));
  }

  if (has_scheme(cfg.schemes, "PAS")) {
    const Constellation conv = brgc_qam(cfg.m);
    for (double nd : nd_grid) {
      const double rate = r_fec * (cfg.m - nd);
      const double h = rate + cfg.m * (1.0 - r_fec);
      SweepRecord rec;
      rec.scenario = "awgn";
      rec.scheme = "PAS";
      rec.entropy = h;
      rec.net_rate = rate;
      rec.seed = cfg.seed;
      result.records.push_back(guarded_cell(rec, [&](SweepRecord r) {
        const MBPmf pmf = mb_for_entropy(conv, h);
        const Constellation cs = renormalize_power(conv, pmf.probs);
        auto pas_air = [&](double snr, std::size_t i) {
          const AirEvaluation ev = evaluate_bits_mc(
              cs, LinkModel::awgn(snr), cfg.scale.eval_symbols(), cfg.scale.n_blocks,
              mix_seed(cfg.seed, 333000 + 100 * i + static_cast<std::uint64_t>(nd * 16)), &pmf.probs);
          return ev.pas_rate();
        };
        return walk_required_snr(snr_grid, rate, pas_air, r);
      }));
    }
  }

  return result;
}

namespace {

// argmax of the composed effective SNR over the power grid (closed form, no
// Monte Carlo needed).
double best_launch_power(const LinkModel& link, double mu4, double mu6, double lo, double hi,
                         double step) {
  double best_p = lo;
  double best_snr = -std::numeric_limits<double>::infinity();
  for (double p = lo; p <= hi + 1e-9; p += step) {
    const double snr = effective_snr(link.with_launch_power(p), mu4, mu6).snr_db;
    if (snr > best_snr) {
      best_snr = snr;
      best_p = p;
    }
  }
  return best_p;
}

// Largest feasible span count on [lo, hi] assuming monotone feasibility.
template <typename FeasibleFn>
int max_feasible_spans(int lo, int hi, FeasibleFn&& feasible) {
  if (!feasible(lo)) return lo - 1;
  int a = lo, b = hi;
  while (a < b) {
    const int mid = (a + b + 1) / 2;
    if (feasible(mid))
      a = mid;
    else
      b = mid - 1;
  }
  return a;
}

}  // namespace

SweepResult max_distance(const DistanceSweepConfig& cfg) {
  const std::vector<double> nd_grid = make_grid(0.0, cfg.nd_max, cfg.scale.nd_step);
  SweepResult result;
  const Constellation conv = brgc_qam(cfg.m);
  const Moments conv_mo = moments(conv);

  struct CellEval {
    double air = 0.0;
    double power = 0.0;
  };

  if (has_scheme(cfg.schemes, "MTOM-unshaped")) {
    // One evaluation per span count serves every n_d.
    std::map<int, AirEvaluation> evals;
    std::map<int, double> powers;
    auto eval_spans = [&](int spans) -> const AirEvaluation& {
      auto it = evals.find(spans);
      if (it == evals.end()) {
        LinkModel link = cfg.link;
        link.fiber.n_spans = spans;
        const double p = best_launch_power(link, conv_mo.mu4, conv_mo.mu6, cfg.power_min_dbm,
                                           cfg.power_max_dbm, cfg.power_step_dbm);
        link.launch_power_dbm = p;
        powers[spans] = p;
        it = evals
                 .emplace(spans, evaluate_bits_mc(conv, link, cfg.scale.eval_symbols(),
                                                  cfg.scale.n_blocks, mix_seed(cfg.seed, 10000 + spans)))
                 .first;
      }
      return it->second;
    };
    for (double nd : nd_grid) {
      SweepRecord rec;
      rec.scenario = "distance";
      rec.scheme = "MTOM-unshaped";
      rec.n_d = nd;
      rec.net_rate = cfg.fec_rate * (cfg.m - nd);
      rec.seed = cfg.seed;
      result.records.push_back(guarded_cell(rec, [&](SweepRecord r) {
        const int best = max_feasible_spans(cfg.span_min, cfg.span_max, [&](int spans) {
          return eval_spans(spans).air_at(nd) >= r.net_rate;
        });
        r.feasible = best >= cfg.span_min;
        r.knob = best;
        if (r.feasible) {
          r.air = eval_spans(best).air_at(nd);
          r.knob_interp = powers[best];
        }
        return r;
      }));
    }
  }

  if (has_scheme(cfg.schemes, "BRGC")) {
    for (int mc = 5; mc <= cfg.m; ++mc) {
      if (!(mc % 2 == 0 || mc == 5 || mc == 7)) continue;
      const Constellation c = brgc_qam(mc);
      const Moments mo = moments(c);
      SweepRecord rec;
      rec.scenario = "distance";
      rec.scheme = "BRGC";
      rec.net_rate = cfg.fec_rate * mc;
      rec.seed = cfg.seed;
      std::map<int, CellEval> cells;
      auto eval = [&](int spans) -> const CellEval& {
        auto it = cells.find(spans);
        if (it == cells.end()) {
          LinkModel link = cfg.link;
          link.fiber.n_spans = spans;
          const double p = best_launch_power(link, mo.mu4, mo.mu6, cfg.power_min_dbm,
                                             cfg.power_max_dbm, cfg.power_step_dbm);
          link.launch_power_dbm = p;
          CellEval ce;
          ce.power = p;
          ce.air = evaluate_bits_mc(c, link, cfg.scale.eval_symbols(), cfg.scale.n_blocks,
                                    mix_seed(cfg.seed, 20000 * mc + spans))
                       .gmi();
          it = cells.emplace(spans, ce).first;
        }
        return it->second;
      };
      result.records.push_back(guarded_cell(rec, [&](SweepRecord r) {
        const int best = max_feasible_spans(cfg.span_min, cfg.span_max,
                                            [&](int spans) { return eval(spans).air >= r.net_rate; });
        r.feasible = best >= cfg.span_min;
        r.knob = best;
        if (r.feasible) {
          r.air = eval(best).air;
          r.knob_interp = eval(best).power;
        }
        return r;
      }));
    }
  }

  if (has_scheme(cfg.schemes, "PAS")) {
    for (double nd : nd_grid) {
      const double rate = cfg.fec_rate * (cfg.m - nd);
      const double h = rate + cfg.m * (1.0 - cfg.fec_rate);
      SweepRecord rec;
      rec.scenario = "distance";
      rec.scheme = "PAS";
      rec.entropy = h;
      rec.net_rate = rate;
      rec.seed = cfg.seed;
      result.records.push_back(guarded_cell(rec, [&](SweepRecord r) {
        const MBPmf pmf = mb_for_entropy(conv, h);
        const Constellation cs = renormalize_power(conv, pmf.probs);
        const Moments mo = moments(cs, &pmf.probs);
        std::map<int, CellEval> cells;
        auto eval = [&](int spans) -> const CellEval& {
          auto it = cells.find(spans);
          if (it == cells.end()) {
            LinkModel link = cfg.link;
            link.fiber.n_spans = spans;
            const double p = best_launch_power(link, mo.mu4, mo.mu6, cfg.power_min_dbm,
                                               cfg.power_max_dbm, cfg.power_step_dbm);
            link.launch_power_dbm = p;
            CellEval ce;
            ce.power = p;
            ce.air = evaluate_bits_mc(cs, link, cfg.scale.eval_symbols(), cfg.scale.n_blocks,
                                      mix_seed(cfg.seed, 30000 + 100 * spans + static_cast<std::uint64_t>(nd * 16)),
                                      &pmf.probs)
                         .pas_rate();
            it = cells.emplace(spans, ce).first;
          }
          return it->second;
        };
        const int best = max_feasible_spans(cfg.span_min, cfg.span_max,
                                            [&](int spans) { return eval(spans).air >= rate; });
        r.feasible = best >= cfg.span_min;
        r.knob = best;
        if (r.feasible) {
          r.air = eval(best).air;
          r.knob_interp = eval(best).power;
        }
        return r;
      }));
    }
  }

  if (has_scheme(cfg.schemes, "MTOM-GCS")) {
    std::vector<SweepRecord> gcs_records(nd_grid.size());
    parallel_for_blocks(nd_grid.size(), [&](std::size_t cell) {
      const double nd = nd_grid[cell];
      const std::uint64_t cell_seed = mix_seed(cfg.seed, 444000 + cell);
      SweepRecord rec;
      rec.scenario = "distance";
      rec.scheme = "MTOM-GCS";
      rec.n_d = nd;
      rec.net_rate = cfg.fec_rate * (cfg.m - nd);
      rec.seed = cell_seed;
      QuadrantSet warm = reduce_quadrant(conv, default_sign_positions(cfg.m));
      std::map<int, CellEval> cells;
      auto eval = [&](int spans) -> const CellEval& {
        auto it = cells.find(spans);
        if (it == cells.end()) {
          LinkModel link = cfg.link;
          link.fiber.n_spans = spans;
          link.launch_power_dbm = best_launch_power(link, conv_mo.mu4, conv_mo.mu6,
                                                    cfg.power_min_dbm, cfg.power_max_dbm,
                                                    cfg.power_step_dbm);
          OptimizerConfig oc = cfg.opt;
          oc.n_d_target = nd;
          oc.seed = mix_seed(cell_seed, static_cast<std::uint64_t>(spans));
          oc.optimize_launch_power = true;
          const OptimizeResult opt = optimize(warm, link, oc);
          if (!opt.trace.diverged) warm = opt.shaped;
          CellEval ce;
          ce.power = opt.launch_power_dbm;
          const Constellation shaped = expand_quadrant(opt.shaped, opt.shaped.sign_positions);
          ce.air = evaluate_bits_mc(shaped, link.with_launch_power(opt.launch_power_dbm),
                                    cfg.scale.eval_symbols(), cfg.scale.n_blocks,
                                    mix_seed(cell_seed, 900 + static_cast<std::uint64_t>(spans)))
                       .air_at(nd);
          it = cells.emplace(spans, ce).first;
        }
        return it->second;
      };
      gcs_records[cell] = guarded_cell(rec, [&](SweepRecord r) {
        const int best = max_feasible_spans(cfg.span_min, cfg.span_max,
                                            [&](int spans) { return eval(spans).air >= r.net_rate; });
        r.feasible = best >= cfg.span_min;
        r.knob = best;
        if (r.feasible) {
          r.air = eval(best).air;
          r.knob_interp = eval(best).power;
        }
        return r;
      });
    });
    for (auto& r : gcs_records) result.records.push_back(std::move(r));
  }

  return result;
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  std::ostringstream out;
  out << "scenario,scheme,net_rate,n_d,entropy,knob,knob_interp,air,feasible,seed,error\n";
  for (const auto& r : result.records) {
    out << csv_field(r.scenario) << "," << csv_field(r.scheme) << "," << format_g17(r.net_rate)
        << "," << (r.n_d >= 0.0 ? format_g17(r.n_d) : "") << ","
        << (r.entropy >= 0.0 ? format_g17(r.entropy) : "") << "," << format_g17(r.knob) << ","
        << format_g17(r.knob_interp) << "," << format_g17(r.air) << "," << (r.feasible ? 1 : 0)
        << "," << r.seed << "," << csv_field(r.error) << "\n";
  }
  write_text_file(path, out.str());
}

}  // namespace mtom
