#ifndef MM_OPS_HPP
#define MM_OPS_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mm/ast.hpp"

namespace mm {

// ------------------------------
// printing
// ------------------------------

// Pretty output re-parses to an alpha-equal term. Canonical output renames
// bound term variables to de Bruijn style indices and is used for equality
// keys and deduplication, not for display.
std::string print_type(const TypePtr& t);
std::string canonical_type(const TypePtr& t);
std::string print_value(const ValuePtr& v);
std::string print_comp(const CompPtr& m);

std::string canonical_value(const ValuePtr& v);
std::string canonical_comp(const CompPtr& m);

// ------------------------------
// substitution and equality
// ------------------------------

CompPtr subst(const CompPtr& body, const ValuePtr& v, const std::string& var);
ValuePtr subst_value(const ValuePtr& w, const ValuePtr& v, const std::string& var);

// Simultaneous renaming of runtime names.
CompPtr rename_names(const CompPtr& m, const std::vector<std::pair<std::string, std::string>>& map);
ValuePtr rename_names_value(const ValuePtr& v,
                            const std::vector<std::pair<std::string, std::string>>& map);

std::set<std::string> free_vars(const CompPtr& m);
std::set<std::string> free_names(const CompPtr& m);
std::set<std::string> free_names_value(const ValuePtr& v);

bool alpha_equal(const CompPtr& a, const CompPtr& b);
bool alpha_equal_value(const ValuePtr& a, const ValuePtr& b);

// ------------------------------
// surface sugar
// ------------------------------

// Expands list sugar, booleans, sequencing, value-let and if. Identity on
// core terms.
CompPtr desugar(const CompPtr& m);
ValuePtr desugar_value(const ValuePtr& v);
bool has_sugar(const CompPtr& m);

// ------------------------------
// value helpers
// ------------------------------

ValuePtr strip_ascribe(const ValuePtr& v);

// Views a value as a term-level list (a spine of roll(inl ()) / roll(inr(h,t))
// under optional ascriptions). Returns nullopt for non-list shapes.
struct ListView {
  std::vector<ValuePtr> items;
  TypePtr ann;  // list type taken from the outermost ascription, if any
};
std::optional<ListView> as_list(const ValuePtr& v);
ValuePtr make_list(const std::vector<ValuePtr>& items, const TypePtr& ann);

std::optional<bool> as_bool(const ValuePtr& v);

// True when the term contains no communication or concurrency construct
// (give/take/fork/newCh/choose/spawn/send/receive/self/wait).
bool is_pure(const CompPtr& m);

// ------------------------------
// deterministic term reduction
// ------------------------------

enum class TermStatus {
  Stepped,   // unique successor available
  Finished,  // return V
  Blocked,   // communication primitive in evaluation position
  Stuck,     // no rule applies (ill-typed or error-adjacent)
};

struct TermStep {
  TermStatus status;
  CompPtr next;            // Stepped
  CompPtr redex;           // Blocked: the primitive in evaluation position
  std::string diagnostic;  // Stuck
};

TermStep step_term(const CompPtr& m);

// Evaluation context decomposition m = E[head] where E is a spine of
// let-frames and head is not a let.
struct LetFrame {
  std::string var;
  CompPtr rest;
};
struct Decomp {
  std::vector<LetFrame> frames;
  CompPtr head;
};
Decomp decompose(const CompPtr& m);
CompPtr plug(const std::vector<LetFrame>& frames, const CompPtr& head);

// Runs up to `fuel` term steps; used by selective-receive guards.
struct EvalResult {
  TermStatus status;  // Finished, Blocked, Stuck; Stepped means fuel ran out
  CompPtr term;
  int steps = 0;
};
EvalResult eval_term(const CompPtr& m, int fuel);

}  // namespace mm

#endif  // MM_OPS_HPP
