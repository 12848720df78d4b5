#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "mm/harness.hpp"
#include "mm/ops.hpp"
#include "mm/translate.hpp"

namespace mm {

int default_sim_budget(SimDirection dir) {
  switch (dir) {
    case SimDirection::A2C: return 16;
    case SimDirection::C2A: return 32;
    case SimDirection::SelRecv: return 64;
  }
  return 16;
}

namespace {

std::multiset<std::string> leaf_multiset(const Config& cfg) {
  std::multiset<std::string> out;
  auto n = normalize_config(cfg, {});
  for (const auto& l : n.leaves) out.insert(leaf_canonical_key(l));
  return out;
}

// Interleaving-pruned breadth-first witness search: only steps that modify a
// leaf not yet in its goal shape are expanded. Complete for the step chains
// the translations produce; the caller falls back to the exact search when
// it fails.
std::optional<int> pruned_search(const Config& start, const std::string& goal_key,
                                 const std::multiset<std::string>& goal_leaves, int budget,
                                 const Extensions& exts) {
  auto key0 = config_key(normalize_config(start, exts));
  if (key0 == goal_key) return 0;
  std::unordered_set<std::string> seen{key0};
  std::vector<Config> frontier{normalize_config(start, exts)};
  for (int depth = 1; depth <= budget; depth++) {
    std::vector<Config> next;
    for (const auto& cur : frontier) {
      auto cur_leaves = leaf_multiset(cur);
      for (const auto& s : step_config(cur, exts)) {
        auto succ_leaves = leaf_multiset(s.config);
        // leaves consumed by this step
        bool allowed = true;
        std::multiset<std::string> removed;
        for (const auto& k : cur_leaves) {
          if (succ_leaves.count(k) < cur_leaves.count(k)) removed.insert(k);
        }
        for (const auto& k : removed) {
          // spare copies beyond what the goal still needs may step
          if (cur_leaves.count(k) <= goal_leaves.count(k)) {
            allowed = false;
            break;
          }
        }
        if (!allowed) continue;
        auto key = config_key(s.config);
        if (key == goal_key) return depth;
        if (seen.insert(key).second) next.push_back(s.config);
      }
    }
    if (next.empty()) return std::nullopt;
    frontier = std::move(next);
  }
  return std::nullopt;
}

std::optional<int> exact_search(const Config& start, const std::string& goal_key, int budget,
                                const Extensions& exts, std::size_t state_cap = 500000) {
  auto root = normalize_config(start, exts);
  auto key0 = config_key(root);
  if (key0 == goal_key) return 0;
  std::unordered_set<std::string> seen{key0};
  std::vector<Config> frontier{root};
  for (int depth = 1; depth <= budget; depth++) {
    std::vector<Config> next;
    for (const auto& cur : frontier) {
      for (const auto& s : step_config(cur, exts)) {
        auto key = config_key(s.config);
        if (key == goal_key) return depth;
        if (seen.size() >= state_cap) continue;
        if (seen.insert(key).second) next.push_back(s.config);
      }
    }
    if (next.empty()) return std::nullopt;
    frontier = std::move(next);
  }
  return std::nullopt;
}

// Search for any member of a goal set, requiring at least one step.
std::optional<int> exact_search_set(const Config& start,
                                    const std::unordered_set<std::string>& goals, int budget,
                                    const Extensions& exts, std::size_t state_cap = 500000) {
  auto root = normalize_config(start, exts);
  std::unordered_set<std::string> seen{config_key(root)};
  std::vector<Config> frontier{root};
  for (int depth = 1; depth <= budget; depth++) {
    std::vector<Config> next;
    for (const auto& cur : frontier) {
      for (const auto& s : step_config(cur, exts)) {
        auto key = config_key(s.config);
        if (goals.count(key)) return depth;
        if (seen.size() >= state_cap) continue;
        if (seen.insert(key).second) next.push_back(s.config);
      }
    }
    if (next.empty()) return std::nullopt;
    frontier = std::move(next);
  }
  return std::nullopt;
}

}  // namespace

std::optional<int> find_witness(const Config& start, const Config& goal, int budget,
                                const Extensions& exts) {
  auto goal_n = normalize_config(goal, exts);
  auto goal_key = config_key(goal_n);
  auto goal_leaves = leaf_multiset(goal_n);
  if (auto hit = pruned_search(start, goal_key, goal_leaves, budget, exts)) return hit;
  return exact_search(start, goal_key, budget, exts);
}

SimulationReport check_simulation(const Config& source, SimDirection dir, const SimOptions& opts,
                                  FreshNames& fresh) {
  SimulationReport rep;
  rep.direction = dir;
  int budget = opts.budget > 0 ? opts.budget : default_sim_budget(dir);

  Extensions target_exts;  // plain target calculus in every direction
  ExploreOptions ex;
  ex.depth = opts.depth;
  ex.exts = opts.exts;
  auto graph = explore(source, ex);

  auto translate = [&](const Config& c) -> Config {
    switch (dir) {
      case SimDirection::A2C: return translate_config_a2c(c, fresh);
      case SimDirection::C2A: return translate_config_c2a(c, fresh, {});
      default: throw MMError("unreachable");
    }
  };

  for (std::size_t ni = 0; ni < graph.nodes.size(); ni++) {
    const auto& node = graph.nodes[ni];
    if (node.depth >= opts.depth) continue;
    auto succs = step_config(node.config, opts.exts);
    if (dir == SimDirection::SelRecv) {
      auto partitions = lower_config(node.config, fresh);
      for (const auto& s : succs) {
        auto targets = lower_config(s.config, fresh);
        std::unordered_set<std::string> goal_keys;
        for (const auto& t : targets) goal_keys.insert(config_key(normalize_config(t, target_exts)));
        for (const auto& d : partitions) {
          SimStepRecord recd{ni, s.rule, -1, false};
          auto hit = exact_search_set(d, goal_keys, budget, target_exts);
          if (hit) {
            recd.matched = true;
            recd.target_steps = *hit;
          } else {
            rep.ok = false;
            if (rep.failure.empty())
              rep.failure = std::string("no witness for rule ") + rule_name(s.rule) +
                            " within " + std::to_string(budget) + " steps from partition:\n" +
                            print_config(d);
          }
          rep.steps.push_back(recd);
        }
      }
      continue;
    }
    Config image = translate(node.config);
    for (const auto& s : succs) {
      SimStepRecord recd{ni, s.rule, -1, false};
      auto goal = translate(s.config);
      auto hit = find_witness(image, goal, budget, target_exts);
      if (hit) {
        recd.matched = true;
        recd.target_steps = *hit;
      } else {
        rep.ok = false;
        if (rep.failure.empty())
          rep.failure = std::string("no witness for rule ") + rule_name(s.rule) + " within " +
                        std::to_string(budget) + " steps from:\n" + print_config(image) +
                        "looking for:\n" + print_config(goal);
      }
      rep.steps.push_back(recd);
    }
  }
  return rep;
}

}  // namespace mm
