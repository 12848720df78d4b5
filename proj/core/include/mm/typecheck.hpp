#ifndef MM_TYPECHECK_HPP
#define MM_TYPECHECK_HPP

#include <map>
#include <string>

#include "mm/ast.hpp"

namespace mm {

// Term environment. Variables and runtime names live in one map; names are
// keyed with a '@' prefix so they cannot collide with variables.
struct TypeEnv {
  std::map<std::string, TypePtr> entries;

  void bind_var(const std::string& x, TypePtr t) { entries[x] = std::move(t); }
  void bind_name(const std::string& a, TypePtr t) { entries["@" + a] = std::move(t); }
  const TypePtr* lookup_var(const std::string& x) const {
    auto it = entries.find(x);
    return it == entries.end() ? nullptr : &it->second;
  }
  const TypePtr* lookup_name(const std::string& a) const {
    auto it = entries.find("@" + a);
    return it == entries.end() ? nullptr : &it->second;
  }
};

// Type checking is bidirectional: constructors whose type cannot be inferred
// (injections, variants, roll, the empty list) synthesize only under an
// ascription, and check against an expected type everywhere else.
class Checker {
 public:
  Checker(Calc calc, Extensions exts) : calc_(calc), exts_(exts) {}

  TypePtr synth_comp(const TypeEnv& env, const Effect* ambient, const CompPtr& m) const;
  TypePtr synth_value(const TypeEnv& env, const ValuePtr& v) const;
  void check_value(const TypeEnv& env, const ValuePtr& v, const TypePtr& expected) const;

  Calc calc() const { return calc_; }
  const Extensions& exts() const { return exts_; }

 private:
  Calc calc_;
  Extensions exts_;
};

// Judgement Gamma |- M : A for the channel calculus.
TypePtr typecheck_term_ch(const TypeEnv& env, const CompPtr& m, const Extensions& exts = {});

// Judgement Gamma | B |- M : A (or Gamma | A,B |- M in sync mode).
TypePtr typecheck_term_act(const TypeEnv& env, const Effect& mailbox, const CompPtr& m,
                           const Extensions& exts = {});

struct ConfigCheckOptions {
  // Environments for open configurations.
  TypeEnv outer_env;
  std::map<std::string, Binder> outer_linear;
};

// Throws TypeError with the failing leaf and rule on rejection.
void typecheck_config(const Config& cfg, const Extensions& exts = {},
                      const ConfigCheckOptions& opts = {});

}  // namespace mm

#endif  // MM_TYPECHECK_HPP
