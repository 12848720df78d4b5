#ifndef MM_TESTS_CONGRUENCE_HPP
#define MM_TESTS_CONGRUENCE_HPP

// A rewrite oracle for structural congruence: builds a nested configuration
// tree and applies randomly chosen instances of the generating equations
// (commutativity, associativity, scope extrusion, binder swap).

#include <functional>
#include <vector>

#include "mm/config.hpp"
#include "mm/harness.hpp"
#include "mm/ops.hpp"

namespace mmtest {

inline mm::CfgTreePtr tree_of(const mm::Config& cfg) {
  using mm::CfgTree;
  mm::CfgTreePtr acc;
  for (auto it = cfg.leaves.rbegin(); it != cfg.leaves.rend(); ++it) {
    auto leaf = CfgTree::mk_leaf(*it);
    acc = acc ? CfgTree::par(leaf, acc) : leaf;
  }
  if (!acc) acc = CfgTree::mk_leaf(mm::Leaf::thread(mm::Comp::ret(mm::Value::unit())));
  for (auto it = cfg.binders.rbegin(); it != cfg.binders.rend(); ++it) {
    acc = CfgTree::nu(*it, acc);
  }
  return acc;
}

inline bool tree_uses_name(const mm::CfgTreePtr& t, const std::string& name) {
  using mm::CfgTree;
  switch (t->kind) {
    case CfgTree::Par:
      return tree_uses_name(t->left, name) || tree_uses_name(t->right, name);
    case CfgTree::Nu:
      if (t->binder.name == name) return false;  // shadowed
      return tree_uses_name(t->under, name);
    case CfgTree::LeafNode: {
      const auto& l = t->leaf;
      if (l.kind != mm::LeafKind::Thread && l.name == name) return true;
      if (l.term && mm::free_names(l.term).count(name)) return true;
      for (const auto& v : l.queue)
        if (mm::free_names_value(v).count(name)) return true;
      return false;
    }
  }
  return false;
}

// One random congruence rewrite somewhere in the tree; returns the rewritten
// tree (or the same tree when the chosen site does not apply).
inline mm::CfgTreePtr rewrite_once(const mm::CfgTreePtr& t, mm::SplitMix64& rng) {
  using mm::CfgTree;
  std::function<mm::CfgTreePtr(const mm::CfgTreePtr&)> go =
      [&](const mm::CfgTreePtr& node) -> mm::CfgTreePtr {
    // descend with probability, otherwise try to rewrite here
    if (rng.below(100) < 55) {
      switch (node->kind) {
        case CfgTree::Par:
          if (rng.below(2) == 0) return CfgTree::par(go(node->left), node->right);
          return CfgTree::par(node->left, go(node->right));
        case CfgTree::Nu:
          return CfgTree::nu(node->binder, go(node->under));
        case CfgTree::LeafNode:
          return node;
      }
    }
    switch (rng.below(5)) {
      case 0:  // C || D == D || C
        if (node->kind == CfgTree::Par) return CfgTree::par(node->right, node->left);
        break;
      case 1:  // C || (D || E) == (C || D) || E
        if (node->kind == CfgTree::Par && node->right->kind == CfgTree::Par)
          return CfgTree::par(CfgTree::par(node->left, node->right->left), node->right->right);
        if (node->kind == CfgTree::Par && node->left->kind == CfgTree::Par)
          return CfgTree::par(node->left->left, CfgTree::par(node->left->right, node->right));
        break;
      case 2:  // C || (nu a) D == (nu a)(C || D)  when a not free in C
        if (node->kind == CfgTree::Par && node->right->kind == CfgTree::Nu &&
            !tree_uses_name(node->left, node->right->binder.name))
          return CfgTree::nu(node->right->binder, CfgTree::par(node->left, node->right->under));
        break;
      case 3:  // the reverse of scope extrusion
        if (node->kind == CfgTree::Nu && node->under->kind == CfgTree::Par &&
            !tree_uses_name(node->under->left, node->binder.name))
          return CfgTree::par(node->under->left, CfgTree::nu(node->binder, node->under->right));
        break;
      case 4:  // (nu a)(nu b) C == (nu b)(nu a) C
        if (node->kind == CfgTree::Nu && node->under->kind == CfgTree::Nu)
          return CfgTree::nu(node->under->binder, CfgTree::nu(node->binder, node->under->under));
        break;
    }
    return node;
  };
  return go(t);
}

inline mm::Config rewritten_variant(const mm::Config& cfg, int rewrites, mm::SplitMix64& rng) {
  auto t = tree_of(cfg);
  for (int i = 0; i < rewrites; i++) t = rewrite_once(t, rng);
  return mm::flatten(cfg.calc, t);
}

}  // namespace mmtest

#endif
