#pragma once

#include <atomic>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include "toponav/episode.hpp"
#include "toponav/rng.hpp"

namespace toponav {

struct Summary {
  int episodes = 0;
  int errors = 0;
  double tl = 0.0, ne = 0.0, osr = 0.0, sr = 0.0, spl = 0.0;
  double ndtw = 0.0, sdtw = 0.0;
  double at = 0.0, rt = 0.0, ct = 0.0, sg_ne = 0.0;
  double n_node = 0.0;
};

inline Summary summarize(const std::vector<EpisodeRecord>& records) {
  Summary s;
  for (const auto& r : records) {
    if (!r.ok) {
      ++s.errors;
      continue;
    }
    ++s.episodes;
    s.tl += r.metrics.tl;
    s.ne += r.metrics.ne;
    s.osr += r.metrics.osr;
    s.sr += r.metrics.sr;
    s.spl += r.metrics.spl;
    s.ndtw += r.metrics.ndtw;
    s.sdtw += r.metrics.sdtw;
    s.at += static_cast<double>(r.metrics.at);
    s.rt += static_cast<double>(r.metrics.rt);
    s.ct += static_cast<double>(r.metrics.ct);
    s.sg_ne += r.metrics.sg_ne;
    s.n_node += r.node_count;
  }
  if (s.episodes > 0) {
    const double n = s.episodes;
    s.tl /= n; s.ne /= n; s.osr /= n; s.sr /= n; s.spl /= n;
    s.ndtw /= n; s.sdtw /= n; s.at /= n; s.rt /= n; s.ct /= n;
    s.sg_ne /= n; s.n_node /= n;
  }
  return s;
}

struct SuiteResult {
  std::vector<EpisodeRecord> records;  // deterministic episode order
  std::vector<EpisodeTrace> traces;
  Summary summary;
};

// Runs every episode of a scenario. Episodes are independent; per-episode
// seeds derive from (config seed, episode index) so any parallelism level
// produces identical output. Episode errors are recorded and the suite
// continues.
inline SuiteResult run_suite(const Scenario& sc, const RunConfig& cfg, int parallelism = 1,
                             bool keep_traces = false) {
  const std::size_t n = sc.episodes.size();
  SuiteResult out;
  out.records.resize(n);
  out.traces.resize(n);

  GasaWeights weights;
  if (cfg.policy == Policy::Gasa) {
    if (!cfg.weights_path.empty()) {
      std::ifstream f(cfg.weights_path);
      if (!f) throw ScenarioError("cannot open weights file: " + cfg.weights_path);
      weights = GasaWeights::load(f);
    } else {
      weights = GasaWeights::seeded(cfg.descriptor_buckets + 4, cfg.gasa_att_dim,
                                    cfg.gasa_out_dim, cfg.ffn_hidden, cfg.seed);
    }
  }

  auto run_one = [&](std::size_t i) {
    RunConfig ep_cfg = cfg;
    ep_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(i));
    try {
      EpisodeOutcome oc = run_episode(sc, sc.episodes[i], ep_cfg,
                                      cfg.policy == Policy::Gasa ? &weights : nullptr);
      out.records[i] = std::move(oc.record);
      if (keep_traces) out.traces[i] = std::move(oc.trace);
    } catch (const std::exception& e) {
      out.records[i].id = sc.episodes[i].id;
      out.records[i].ok = false;
      out.records[i].error = e.what();
    }
  };

  if (parallelism <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const std::size_t count = std::min(static_cast<std::size_t>(parallelism), n);
    for (std::size_t w = 0; w < count; ++w)
      workers.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) run_one(i);
      });
    for (auto& w : workers) w.join();
  }

  out.summary = summarize(out.records);
  return out;
}

// One record per line, key=value fields; summary layout leads with the
// TL / NE / OSR / SR / SPL column order.
inline void write_results(std::ostream& os, const SuiteResult& res) {
  for (const auto& r : res.records) {
    if (!r.ok) {
      os << "result: id=" << r.id << " status=error msg=" << r.error << '\n';
      continue;
    }
    const EpisodeResult& m = r.metrics;
    os << "result: id=" << r.id << " status=ok"
       << " TL=" << fmt_f(m.tl) << " NE=" << fmt_f(m.ne) << " OSR=" << m.osr << " SR=" << m.sr
       << " SPL=" << fmt_f(m.spl) << " NDTW=" << fmt_f(m.ndtw) << " SDTW=" << fmt_f(m.sdtw)
       << " AT=" << m.at << " RT=" << m.rt << " CT=" << m.ct << " SGNE=" << fmt_f(m.sg_ne)
       << " steps=" << r.decision_steps << " nodes=" << r.node_count
       << " stopped=" << (r.stopped ? 1 : 0) << '\n';
  }
  const Summary& s = res.summary;
  os << "summary: episodes=" << s.episodes << " errors=" << s.errors << " TL=" << fmt_f(s.tl)
     << " NE=" << fmt_f(s.ne) << " OSR=" << fmt_f(s.osr) << " SR=" << fmt_f(s.sr)
     << " SPL=" << fmt_f(s.spl) << " NDTW=" << fmt_f(s.ndtw) << " SDTW=" << fmt_f(s.sdtw)
     << " AT=" << fmt_f(s.at) << " RT=" << fmt_f(s.rt) << " CT=" << fmt_f(s.ct)
     << " SGNE=" << fmt_f(s.sg_ne) << " NNODE=" << fmt_f(s.n_node) << '\n';
}

inline std::string results_to_string(const SuiteResult& res) {
  std::ostringstream os;
  write_results(os, res);
  return os.str();
}

struct GammaSweepPoint {
  double gamma = 0.0;
  Summary summary;
};

// Map-construction sweep: reruns the suite per localization threshold. The
// mean node count should fall as gamma grows (waypoints merge more).
inline std::vector<GammaSweepPoint> sweep_gamma(const Scenario& sc, const RunConfig& base,
                                                const std::vector<double>& values,
                                                int parallelism = 1) {
  std::vector<GammaSweepPoint> out;
  for (const double g : values) {
    RunConfig cfg = base;
    cfg.gamma = g;
    GammaSweepPoint pt;
    pt.gamma = g;
    pt.summary = run_suite(sc, cfg, parallelism).summary;
    out.push_back(pt);
  }
  return out;
}

inline void write_gamma_sweep(std::ostream& os, const std::vector<GammaSweepPoint>& pts) {
  for (const auto& p : pts) {
    const Summary& s = p.summary;
    os << "gamma: value=" << fmt_g(p.gamma) << " NNODE=" << fmt_f(s.n_node)
       << " TL=" << fmt_f(s.tl) << " NE=" << fmt_f(s.ne) << " OSR=" << fmt_f(s.osr)
       << " SR=" << fmt_f(s.sr) << " SPL=" << fmt_f(s.spl) << '\n';
  }
}

}  // namespace toponav
