#ifndef MM_CONFIG_HPP
#define MM_CONFIG_HPP

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mm/ast.hpp"

namespace mm {

// Nested configuration syntax (parallel composition and restriction). Used by
// the structural-congruence tests; the interpreters work on the flattened
// form.
struct CfgTree;
using CfgTreePtr = std::shared_ptr<const CfgTree>;

struct CfgTree {
  enum Kind { Par, Nu, LeafNode } kind;
  CfgTreePtr left, right;  // Par
  Binder binder;           // Nu
  CfgTreePtr under;        // Nu
  Leaf leaf;               // LeafNode

  static CfgTreePtr par(CfgTreePtr l, CfgTreePtr r);
  static CfgTreePtr nu(Binder b, CfgTreePtr c);
  static CfgTreePtr mk_leaf(Leaf l);
};

// Hoists every restriction to the outside (renaming on clashes) and flattens
// parallel composition into a leaf multiset.
Config flatten(Calc calc, const CfgTreePtr& t);

// Canonical form: restrictions outside, canonical names in a deterministic
// first-use order, leaves sorted (threads before buffers). Binder order is
// treated as irrelevant. In sync mode, finished restricted actors whose name
// is no longer referenced are garbage collected.
Config normalize_config(const Config& cfg, const Extensions& exts = {});

// Canonical string of a configuration; equal strings on normalized configs
// decide structural congruence.
std::string config_key(const Config& cfg);

// Canonical string of a single leaf (names taken literally).
std::string leaf_canonical_key(const Leaf& leaf);

bool config_equiv(const Config& a, const Config& b, const Extensions& exts = {});

std::string print_config(const Config& cfg);

// Names referenced by leaves but not restricted.
std::set<std::string> config_free_names(const Config& cfg);

// A name unused anywhere in the configuration.
std::string fresh_config_name(const Config& cfg, const std::string& hint);

}  // namespace mm

#endif  // MM_CONFIG_HPP
