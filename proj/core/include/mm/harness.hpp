#ifndef MM_HARNESS_HPP
#define MM_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mm/semantics.hpp"

namespace mm {

// ------------------------------
// deterministic scheduling
// ------------------------------

// splitmix64; documented so traces are reproducible across implementations
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // uniform in [0, n)
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
};

enum class SchedulerKind { Seeded, RoundRobin };

struct RunOptions {
  SchedulerKind scheduler = SchedulerKind::Seeded;
  std::uint64_t seed = 0;
  int fuel = 1000;
  Extensions exts;
};

struct TraceStep {
  Rule rule;
  int choice;     // index into the deterministic successor list
  int n_choices;
};

struct TraceReport {
  Config initial;       // normalized
  Config final_config;  // normalized
  std::vector<TraceStep> steps;
  bool fuel_exhausted = false;
  std::vector<LeafTag> classification;  // of final_config when quiescent
  double wall_seconds = 0;
};

TraceReport run(const Config& cfg, const RunOptions& opts);

// Re-executes the recorded choices; the result must equal final_config
// bit for bit.
Config replay(const TraceReport& trace, const Extensions& exts);

// ------------------------------
// bounded exhaustive exploration
// ------------------------------

inline constexpr std::size_t kDefaultMaxStates = 200000;

struct ExploreEdge {
  Rule rule;
  std::size_t target;
};

struct ExploreNode {
  Config config;
  std::vector<ExploreEdge> edges;
  int depth = 0;
  bool quiescent = false;
};

struct ExploreResult {
  std::vector<ExploreNode> nodes;  // node 0 is the (normalized) root
  bool truncated = false;
  std::vector<std::size_t> quiescent_nodes;
};

struct ExploreOptions {
  int depth = 200;
  std::size_t max_states = kDefaultMaxStates;
  Extensions exts;
  bool reverse_successors = false;  // for order-insensitivity tests
};

ExploreResult explore(const Config& cfg, const ExploreOptions& opts);

// ------------------------------
// simulation checking
// ------------------------------

enum class SimDirection { A2C, C2A, SelRecv };

struct SimStepRecord {
  std::size_t source_node;
  Rule source_rule;
  int target_steps = -1;  // steps used by the found witness
  bool matched = false;
};

struct SimulationReport {
  SimDirection direction;
  std::vector<SimStepRecord> steps;
  bool ok = true;
  std::string failure;  // description of the first NoWitness
};

struct SimOptions {
  int depth = 5;     // source exploration depth
  int budget = 0;    // 0: direction default (16 / 32 / 64)
  Extensions exts;   // extensions for the source side
};

// Source must be well typed; for C2A it must already be coalesced (or all
// channels must share one type).
SimulationReport check_simulation(const Config& source, SimDirection dir, const SimOptions& opts,
                                  FreshNames& fresh);

int default_sim_budget(SimDirection dir);

// Searches target →* for a configuration congruent to `goal`, within
// `budget` steps. Uses a relevance pruning pass first and falls back to the
// unpruned search. Returns the number of steps, or nullopt.
std::optional<int> find_witness(const Config& start, const Config& goal, int budget,
                                const Extensions& exts);

// ------------------------------
// property fuzzing
// ------------------------------

enum class FuzzMode {
  PreservationCh,
  PreservationAct,
  ProgressCh,
  ProgressAct,
  A2C,
  C2A,
  SelRecvMode,
};

std::optional<FuzzMode> fuzz_mode_from_name(const std::string& name);
const char* fuzz_mode_name(FuzzMode m);

struct GenOptions {
  int max_channels = 3;
  int max_processes = 3;
  int max_queue = 2;
  int term_depth = 4;
  bool allow_rec = false;
  bool allow_int = false;
  bool multi_type = true;
  bool gen_selrecv = false;
  Extensions exts;
};

Config gen_ch_config(SplitMix64& rng, const GenOptions& opts);
Config gen_act_config(SplitMix64& rng, const GenOptions& opts);

struct FuzzFailure {
  std::string what;
  std::string config_text;  // minimized configuration
};

struct FuzzReport {
  FuzzMode mode;
  int requested = 0;
  int executed = 0;
  int failures = 0;
  std::vector<FuzzFailure> examples;  // shrunk counterexamples (first few)
};

struct FuzzOptions {
  int count = 100;
  std::uint64_t seed = 1;
  int fuel = 500;          // progress runs
  int sim_depth = 3;       // source exploration depth for translation modes
  int explore_depth = 25;  // error-freedom exploration depth
  GenOptions gen;
};

FuzzReport fuzz(FuzzMode mode, const FuzzOptions& opts);

}  // namespace mm

#endif  // MM_HARNESS_HPP
