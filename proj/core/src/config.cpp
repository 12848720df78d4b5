#include "mm/config.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "mm/ops.hpp"

namespace mm {

CfgTreePtr CfgTree::par(CfgTreePtr l, CfgTreePtr r) {
  auto t = std::make_shared<CfgTree>();
  t->kind = Par;
  t->left = std::move(l);
  t->right = std::move(r);
  return t;
}

CfgTreePtr CfgTree::nu(Binder b, CfgTreePtr c) {
  auto t = std::make_shared<CfgTree>();
  t->kind = Nu;
  t->binder = std::move(b);
  t->under = std::move(c);
  return t;
}

CfgTreePtr CfgTree::mk_leaf(Leaf l) {
  auto t = std::make_shared<CfgTree>();
  t->kind = LeafNode;
  t->leaf = std::move(l);
  return t;
}

namespace {

Leaf rename_leaf(const Leaf& l, const std::vector<std::pair<std::string, std::string>>& map) {
  Leaf out = l;
  for (const auto& [from, to] : map) {
    if (out.name == from) {
      out.name = to;
      break;  // simultaneous renaming
    }
  }
  if (out.term) out.term = rename_names(out.term, map);
  for (auto& v : out.queue) v = rename_names_value(v, map);
  return out;
}

void collect_tree(const CfgTreePtr& t, Config& out, std::set<std::string>& used) {
  switch (t->kind) {
    case CfgTree::Par:
      collect_tree(t->left, out, used);
      collect_tree(t->right, out, used);
      return;
    case CfgTree::Nu: {
      Binder b = t->binder;
      CfgTreePtr under = t->under;
      if (used.count(b.name)) {
        std::string fresh = b.name;
        do {
          fresh += "'";
        } while (used.count(fresh));
        // rename within the subtree only
        Config sub;
        sub.calc = out.calc;
        std::set<std::string> subUsed = used;
        collect_tree(under, sub, subUsed);
        std::vector<std::pair<std::string, std::string>> map{{b.name, fresh}};
        b.name = fresh;
        used.insert(fresh);
        out.binders.push_back(b);
        for (auto& bb : sub.binders) out.binders.push_back(bb);
        for (auto& lf : sub.leaves) out.leaves.push_back(rename_leaf(lf, map));
        return;
      }
      used.insert(b.name);
      out.binders.push_back(b);
      collect_tree(under, out, used);
      return;
    }
    case CfgTree::LeafNode:
      out.leaves.push_back(t->leaf);
      return;
  }
}

std::set<std::string> leaf_names(const Leaf& l, bool include_own) {
  std::set<std::string> out;
  if (include_own && l.kind != LeafKind::Thread) out.insert(l.name);
  if (l.term) {
    auto n = free_names(l.term);
    out.insert(n.begin(), n.end());
  }
  for (const auto& v : l.queue) {
    auto n = free_names_value(v);
    out.insert(n.begin(), n.end());
  }
  return out;
}

// First-occurrence traversal order of names in a leaf: the leaf's own name,
// then queued values left to right, then the term.
void ordered_names_value(const ValuePtr& v, std::vector<std::string>& out);
void ordered_names_comp(const CompPtr& m, std::vector<std::string>& out) {
  if (!m) return;
  ordered_names_value(m->v1, out);
  ordered_names_value(m->v2, out);
  ordered_names_comp(m->m1, out);
  ordered_names_comp(m->m2, out);
  ordered_names_comp(m->nil_body, out);
  ordered_names_comp(m->cons_body, out);
  for (const auto& arm : m->arms) ordered_names_comp(arm.body, out);
  for (const auto& arm : m->rarms) {
    ordered_names_comp(arm.guard, out);
    ordered_names_comp(arm.body, out);
  }
}
void ordered_names_value(const ValuePtr& v, std::vector<std::string>& out) {
  if (!v) return;
  if (v->kind == ValKind::Name) out.push_back(v->name);
  ordered_names_value(v->v1, out);
  ordered_names_value(v->v2, out);
  ordered_names_comp(v->body, out);
}

std::vector<std::string> ordered_leaf_names(const Leaf& l) {
  std::vector<std::string> raw;
  if (l.kind != LeafKind::Thread) raw.push_back(l.name);
  for (const auto& v : l.queue) ordered_names_value(v, raw);
  ordered_names_comp(l.term, raw);
  std::vector<std::string> out;
  for (auto& n : raw) {
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  }
  return out;
}

std::string leaf_key(const Leaf& l,
                     const std::vector<std::pair<std::string, std::string>>& labels) {
  Leaf r = rename_leaf(l, labels);
  std::ostringstream os;
  switch (r.kind) {
    case LeafKind::Thread:
      os << "0|thread|" << canonical_comp(r.term);
      break;
    case LeafKind::Buffer: {
      os << "1|buf " << r.name << "|";
      for (const auto& v : r.queue) os << canonical_value(v) << " . ";
      break;
    }
    case LeafKind::Actor: {
      os << "1|actor " << r.name << "|";
      for (const auto& v : r.queue) os << canonical_value(v) << " . ";
      os << "|" << canonical_comp(r.term);
      break;
    }
  }
  return os.str();
}

int leaf_rank(const Leaf& l) { return l.kind == LeafKind::Thread ? 0 : 1; }

}  // namespace

Config flatten(Calc calc, const CfgTreePtr& t) {
  Config out;
  out.calc = calc;
  std::set<std::string> used;
  // seed with every name mentioned so clash renaming is conservative
  std::function<void(const CfgTreePtr&)> seed = [&](const CfgTreePtr& u) {
    if (!u) return;
    if (u->kind == CfgTree::LeafNode) {
      auto n = leaf_names(u->leaf, true);
      used.insert(n.begin(), n.end());
      return;
    }
    seed(u->left);
    seed(u->right);
    seed(u->under);
  };
  seed(t);
  std::set<std::string> bound;
  collect_tree(t, out, bound);
  return out;
}

std::set<std::string> config_free_names(const Config& cfg) {
  std::set<std::string> bound;
  for (const auto& b : cfg.binders) bound.insert(b.name);
  std::set<std::string> out;
  for (const auto& l : cfg.leaves) {
    for (const auto& n : leaf_names(l, true)) {
      if (!bound.count(n)) out.insert(n);
    }
  }
  return out;
}

std::string fresh_config_name(const Config& cfg, const std::string& hint) {
  std::set<std::string> used;
  for (const auto& b : cfg.binders) used.insert(b.name);
  for (const auto& l : cfg.leaves) {
    auto n = leaf_names(l, true);
    used.insert(n.begin(), n.end());
  }
  std::string base = hint.empty() ? "f" : hint;
  for (int i = 0;; i++) {
    std::string cand = base + std::to_string(i);
    if (!used.count(cand)) return cand;
  }
}

Config normalize_config(const Config& cfg, const Extensions& exts) {
  Config work = cfg;

  // Garbage collection of finished restricted actors (sync mode equivalence).
  if (exts.sync && cfg.calc == Calc::Act) {
    bool changed = true;
    while (changed && work.leaves.size() > 1) {
      changed = false;
      for (std::size_t i = 0; i < work.leaves.size(); i++) {
        const auto& l = work.leaves[i];
        if (l.kind != LeafKind::Actor || !l.term || l.term->kind != CompKind::Return) continue;
        auto bi = std::find_if(work.binders.begin(), work.binders.end(),
                               [&](const Binder& b) { return b.name == l.name; });
        if (bi == work.binders.end()) continue;
        bool referenced = false;
        for (std::size_t j = 0; j < work.leaves.size() && !referenced; j++) {
          if (j == i) continue;
          if (leaf_names(work.leaves[j], true).count(l.name)) referenced = true;
        }
        if (referenced) continue;
        work.binders.erase(bi);
        work.leaves.erase(work.leaves.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }

  std::set<std::string> boundSet;
  for (const auto& b : work.binders) boundSet.insert(b.name);
  auto freeNames = config_free_names(work);

  // Canonical labels: assign indices to restricted names, resolving leaves
  // with unique fingerprints first so symmetric ties cannot skew the order.
  std::map<std::string, std::string> assigned;
  auto canon_label = [&](std::size_t idx) {
    std::string cand = "n" + std::to_string(idx);
    while (freeNames.count(cand)) cand += "x";
    return cand;
  };
  std::size_t next_idx = 0;

  auto current_map = [&]() {
    std::vector<std::pair<std::string, std::string>> map;
    for (const auto& n : boundSet) {
      auto it = assigned.find(n);
      map.emplace_back(n, it == assigned.end() ? "?" : it->second);
    }
    return map;
  };

  auto assign_from_leaf = [&](const Leaf& l) {
    bool progress = false;
    for (const auto& n : ordered_leaf_names(l)) {
      if (boundSet.count(n) && !assigned.count(n)) {
        assigned[n] = canon_label(next_idx++);
        progress = true;
      }
    }
    return progress;
  };

  for (int round = 0; round < 64; round++) {
    auto map = current_map();
    std::vector<std::pair<std::string, std::size_t>> keyed;
    for (std::size_t i = 0; i < work.leaves.size(); i++) {
      keyed.emplace_back(std::to_string(leaf_rank(work.leaves[i])) + "|" +
                             leaf_key(work.leaves[i], map),
                         i);
    }
    std::sort(keyed.begin(), keyed.end());
    bool progress = false;
    for (std::size_t i = 0; i < keyed.size(); i++) {
      bool unique = (i == 0 || keyed[i - 1].first != keyed[i].first) &&
                    (i + 1 == keyed.size() || keyed[i + 1].first != keyed[i].first);
      if (unique && assign_from_leaf(work.leaves[keyed[i].second])) {
        progress = true;
        break;  // re-key after each assignment batch
      }
    }
    if (!progress) {
      // remaining ties are symmetric; assign in key order
      for (const auto& [key, idx] : keyed) {
        (void)key;
        assign_from_leaf(work.leaves[idx]);
      }
      break;
    }
  }

  std::vector<std::pair<std::string, std::string>> finalMap(assigned.begin(), assigned.end());
  Config out;
  out.calc = work.calc;
  for (const auto& b : work.binders) {
    Binder nb = b;
    auto it = assigned.find(b.name);
    if (it != assigned.end()) nb.name = it->second;
    out.binders.push_back(nb);
  }
  std::sort(out.binders.begin(), out.binders.end(),
            [](const Binder& a, const Binder& b) { return a.name < b.name; });
  std::vector<std::pair<std::string, Leaf>> keyed;
  for (const auto& l : work.leaves) {
    Leaf r = rename_leaf(l, finalMap);
    keyed.emplace_back(std::to_string(leaf_rank(r)) + "|" + leaf_key(r, {}), r);
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [k, l] : keyed) {
    (void)k;
    out.leaves.push_back(l);
  }
  return out;
}

std::string leaf_canonical_key(const Leaf& leaf) { return leaf_key(leaf, {}); }

std::string config_key(const Config& cfg) {
  std::ostringstream os;
  os << (cfg.calc == Calc::Ch ? "ch" : "act");
  for (const auto& b : cfg.binders) {
    os << " (nu " << b.name << ": " << canonical_type(b.carried);
    if (b.result) os << ", " << canonical_type(b.result);
    os << ")";
  }
  for (const auto& l : cfg.leaves) os << " || " << leaf_key(l, {});
  return os.str();
}

bool config_equiv(const Config& a, const Config& b, const Extensions& exts) {
  if (a.calc != b.calc) return false;
  return config_key(normalize_config(a, exts)) == config_key(normalize_config(b, exts));
}

std::string print_config(const Config& cfg) {
  std::ostringstream os;
  for (const auto& b : cfg.binders) {
    os << "(nu " << b.name << ": " << print_type(b.carried);
    if (b.result) os << ", " << print_type(b.result);
    os << ")\n";
  }
  for (const auto& l : cfg.leaves) {
    switch (l.kind) {
      case LeafKind::Thread:
        os << "  thread  " << print_comp(l.term) << "\n";
        break;
      case LeafKind::Buffer: {
        os << "  buffer  " << l.name << "(";
        for (std::size_t i = 0; i < l.queue.size(); i++) {
          if (i) os << " . ";
          os << print_value(l.queue[i]);
        }
        os << ")\n";
        break;
      }
      case LeafKind::Actor: {
        os << "  actor   <" << l.name << ", " << print_comp(l.term) << ", [";
        for (std::size_t i = 0; i < l.queue.size(); i++) {
          if (i) os << " . ";
          os << print_value(l.queue[i]);
        }
        os << "]>\n";
        break;
      }
    }
  }
  return os.str();
}

}  // namespace mm
