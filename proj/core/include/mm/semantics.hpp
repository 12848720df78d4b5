#ifndef MM_SEMANTICS_HPP
#define MM_SEMANTICS_HPP

#include <optional>
#include <vector>

#include "mm/config.hpp"

namespace mm {

struct Successor {
  Rule rule;
  Config config;  // already normalized
};

// Complete one-step successor sets modulo structural congruence, normalized
// and deduplicated, in a deterministic order.
std::vector<Successor> step_config_ch(const Config& cfg, const Extensions& exts = {});
std::vector<Successor> step_config_act(const Config& cfg, const Extensions& exts = {});
std::vector<Successor> step_config(const Config& cfg, const Extensions& exts = {});

// ------------------------------
// selective receive
// ------------------------------

inline constexpr int kGuardFuelDefault = 10000;

struct GuardFuelError : MMError {
  explicit GuardFuelError(const std::string& msg) : MMError("guard fuel exhausted: " + msg) {}
};
struct GuardIllTypedError : MMError {
  explicit GuardIllTypedError(const std::string& msg) : MMError("guard ill-typed: " + msg) {}
};

struct SelRecvMatch {
  std::size_t message_index;  // least index whose message matches any clause
  std::size_t clause_index;   // least clause the message matches
  ValuePtr bound;             // the message payload
  std::vector<ValuePtr> residual;
};

// Scans the mailbox for the first message matching any clause, evaluating
// guards with at most `fuel` term steps each. Returns nullopt when nothing
// matches (the actor blocks).
std::optional<SelRecvMatch> eval_selective_receive(const std::vector<ReceiveArm>& clauses,
                                                   const std::vector<ValuePtr>& mailbox,
                                                   int fuel = kGuardFuelDefault);

// ------------------------------
// progress classification
// ------------------------------

enum class LeafTag {
  Buffer,
  FullyReduced,
  BlockedTake,
  BlockedChoose,    // choice extension only
  BlockedReceive,
  BlockedSelRecv,   // selrecv extension only
  BlockedWait,      // sync extension only
};

const char* leaf_tag_name(LeafTag t);

// Tags every leaf of a quiescent configuration. Throws when the
// configuration can still step or a leaf fits no alternative.
std::vector<LeafTag> classify_progress_ch(const Config& cfg, const Extensions& exts = {});
std::vector<LeafTag> classify_progress_act(const Config& cfg, const Extensions& exts = {});

}  // namespace mm

#endif  // MM_SEMANTICS_HPP
