#ifndef MM_TRANSLATE_HPP
#define MM_TRANSLATE_HPP

#include <map>
#include <vector>

#include "mm/config.hpp"
#include "mm/typecheck.hpp"

namespace mm {

// ------------------------------
// actors into channels
// ------------------------------
// A mailbox becomes a channel threaded through every function as an extra
// parameter; receive and self become operations on that channel.

TypePtr translate_type_a2c(const TypePtr& t);
ValuePtr translate_value_a2c(const ValuePtr& v, FreshNames& fresh);
// `ch` is the variable or name standing for the current mailbox channel.
CompPtr translate_term_a2c(const CompPtr& m, const ValuePtr& ch, FreshNames& fresh);
Config translate_config_a2c(const Config& cfg, FreshNames& fresh);

// ------------------------------
// coalescing: one shared channel type
// ------------------------------

struct TokenEnv {
  // base carried types in canonical order with their tokens
  std::vector<std::pair<TypePtr, std::string>> tokens;
  std::string chan_label = "chan";
  TypePtr coalesced;  // the single recursive variant channel type
  // diagnostics: restricted name -> original carried type
  std::map<std::string, TypePtr> original_type;

  // token for a base carried type, or chan_label for channel types
  std::string token_for(const TypePtr& carried) const;
};

struct CoalescedConfig {
  Config config;
  TokenEnv env;
};
struct CoalescedTerm {
  CompPtr term;
  TokenEnv env;
};

CoalescedConfig coalesce_config(const Config& cfg, const Extensions& exts,
                                FreshNames& fresh);
CoalescedTerm coalesce_term(const CompPtr& m, const Extensions& exts, FreshNames& fresh);

// True when some leaf is about to produce or consume the coalescing error
// constant at its head redex.
bool error_in_eval_position(const Config& cfg);

// ------------------------------
// channels into actors
// ------------------------------
// Every channel is emulated by an actor running an event loop over a pair of
// pending values and pending requestors. Outside sync mode all channels must
// already share one type (run coalescing first).

struct C2AOptions {
  bool sync = false;
};

// The common carried type of every channel in the configuration/term.
// Throws TranslateError when channel types disagree (coalescing required).
TypePtr common_channel_type_config(const Config& cfg);
TypePtr common_channel_type_term(const CompPtr& m);

TypePtr translate_type_c2a(const TypePtr& t, const TypePtr& chan_type, const C2AOptions& = {});
CompPtr translate_term_c2a(const CompPtr& m, const TypePtr& chan_type, const TypeEnv& env,
                           FreshNames& fresh, const C2AOptions& = {});
Config translate_config_c2a(const Config& cfg, FreshNames& fresh, const C2AOptions& = {});

// The channel-emulating event loop (exposed for tests).
ValuePtr c2a_body(const TypePtr& translated_carried, FreshNames& fresh, const C2AOptions& = {});

// ------------------------------
// selective receive into plain actors
// ------------------------------

TypePtr lower_type(const TypePtr& t);
ValuePtr lower_value(const ValuePtr& v, const TypeEnv& env, FreshNames& fresh);
// `mb` is the save-queue value; `mailbox` the ambient mailbox variant type.
CompPtr lower_term(const CompPtr& m, const ValuePtr& mb, const TypePtr& mailbox,
                   const TypeEnv& env, FreshNames& fresh);
// All save-queue/mailbox partitions of every actor (cartesian across the
// configuration).
std::vector<Config> lower_config(const Config& cfg, FreshNames& fresh);

}  // namespace mm

#endif  // MM_TRANSLATE_HPP
