#include <algorithm>
#include <chrono>
#include <unordered_map>

#include "mm/harness.hpp"

namespace mm {

namespace {

std::vector<LeafTag> classify(const Config& cfg, const Extensions& exts) {
  return cfg.calc == Calc::Ch ? classify_progress_ch(cfg, exts)
                              : classify_progress_act(cfg, exts);
}

}  // namespace

TraceReport run(const Config& cfg, const RunOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  TraceReport rep;
  rep.initial = normalize_config(cfg, opts.exts);
  Config cur = rep.initial;
  SplitMix64 rng(opts.seed);
  for (int step = 0;; step++) {
    auto succs = step_config(cur, opts.exts);
    if (succs.empty()) {
      rep.final_config = cur;
      rep.classification = classify(cur, opts.exts);
      break;
    }
    if (step >= opts.fuel) {
      rep.final_config = cur;
      rep.fuel_exhausted = true;
      break;
    }
    std::size_t idx = opts.scheduler == SchedulerKind::Seeded
                          ? rng.below(succs.size())
                          : static_cast<std::size_t>(step) % succs.size();
    rep.steps.push_back({succs[idx].rule, static_cast<int>(idx), static_cast<int>(succs.size())});
    cur = succs[idx].config;
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

Config replay(const TraceReport& trace, const Extensions& exts) {
  Config cur = trace.initial;
  for (const auto& step : trace.steps) {
    auto succs = step_config(cur, exts);
    if (step.choice < 0 || static_cast<std::size_t>(step.choice) >= succs.size())
      throw MMError("trace replay diverged: recorded choice out of range");
    if (succs[step.choice].rule != step.rule)
      throw MMError("trace replay diverged: rule label mismatch");
    cur = succs[step.choice].config;
  }
  return cur;
}

ExploreResult explore(const Config& cfg, const ExploreOptions& opts) {
  ExploreResult res;
  std::unordered_map<std::string, std::size_t> index;
  auto root = normalize_config(cfg, opts.exts);
  index[config_key(root)] = 0;
  res.nodes.push_back({root, {}, 0, false});
  std::vector<std::size_t> frontier{0};
  while (!frontier.empty()) {
    std::vector<std::size_t> next;
    for (auto ni : frontier) {
      auto succs = step_config(res.nodes[ni].config, opts.exts);
      if (opts.reverse_successors) std::reverse(succs.begin(), succs.end());
      if (succs.empty()) {
        res.nodes[ni].quiescent = true;
        res.quiescent_nodes.push_back(ni);
        continue;
      }
      if (res.nodes[ni].depth >= opts.depth) {
        res.truncated = true;
        continue;
      }
      for (auto& s : succs) {
        auto key = config_key(s.config);
        auto it = index.find(key);
        std::size_t ti;
        if (it == index.end()) {
          if (res.nodes.size() >= opts.max_states) {
            res.truncated = true;
            continue;
          }
          ti = res.nodes.size();
          index.emplace(std::move(key), ti);
          res.nodes.push_back({s.config, {}, res.nodes[ni].depth + 1, false});
          next.push_back(ti);
        } else {
          ti = it->second;
        }
        res.nodes[ni].edges.push_back({s.rule, ti});
      }
    }
    frontier = std::move(next);
  }
  return res;
}

}  // namespace mm
