#include <algorithm>
#include <set>

#include "mm/ops.hpp"
#include "mm/semantics.hpp"

namespace mm {

namespace {

std::optional<std::string> value_name(const ValuePtr& v) {
  auto w = strip_ascribe(v);
  if (w && w->kind == ValKind::Name) return w->name;
  return std::nullopt;
}

int find_leaf(const Config& cfg, LeafKind kind, const std::string& name) {
  for (std::size_t i = 0; i < cfg.leaves.size(); i++) {
    if (cfg.leaves[i].kind == kind && cfg.leaves[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const Binder* find_binder(const Config& cfg, const std::string& name) {
  for (const auto& b : cfg.binders)
    if (b.name == name) return &b;
  return nullptr;
}

struct Collector {
  const Extensions& exts;
  std::vector<Successor> out;
  std::set<std::string> seen;

  void add(Rule rule, Config cfg) {
    Config norm = normalize_config(cfg, exts);
    std::string key = std::string(rule_name(rule)) + "#" + config_key(norm);
    if (seen.insert(key).second) out.push_back({rule, std::move(norm)});
  }

  std::vector<Successor> finish() {
    std::sort(out.begin(), out.end(), [](const Successor& a, const Successor& b) {
      auto ka = std::string(rule_name(a.rule)) + "#" + config_key(a.config);
      auto kb = std::string(rule_name(b.rule)) + "#" + config_key(b.config);
      return ka < kb;
    });
    return std::move(out);
  }
};

}  // namespace

std::vector<Successor> step_config_ch(const Config& cfg, const Extensions& exts) {
  Collector acc{exts, {}, {}};
  for (std::size_t i = 0; i < cfg.leaves.size(); i++) {
    const auto& leaf = cfg.leaves[i];
    if (leaf.kind != LeafKind::Thread) continue;
    auto st = step_term(leaf.term);
    if (st.status == TermStatus::Stepped) {
      Config next = cfg;
      next.leaves[i].term = st.next;
      acc.add(Rule::LiftM, std::move(next));
      continue;
    }
    if (st.status != TermStatus::Blocked) continue;
    auto dec = decompose(leaf.term);
    const auto& redex = dec.head;
    switch (redex->kind) {
      case CompKind::Give: {
        auto a = value_name(redex->v2);
        if (!a) break;
        int bi = find_leaf(cfg, LeafKind::Buffer, *a);
        if (bi < 0) break;
        Config next = cfg;
        next.leaves[i].term = plug(dec.frames, Comp::ret(Value::unit()));
        next.leaves[bi].queue.push_back(redex->v1);
        acc.add(Rule::Give, std::move(next));
        break;
      }
      case CompKind::Take: {
        auto a = value_name(redex->v1);
        if (!a) break;
        int bi = find_leaf(cfg, LeafKind::Buffer, *a);
        if (bi < 0 || cfg.leaves[bi].queue.empty()) break;
        Config next = cfg;
        auto head = next.leaves[bi].queue.front();
        next.leaves[bi].queue.erase(next.leaves[bi].queue.begin());
        next.leaves[i].term = plug(dec.frames, Comp::ret(head));
        acc.add(Rule::Take, std::move(next));
        break;
      }
      case CompKind::Fork: {
        Config next = cfg;
        next.leaves[i].term = plug(dec.frames, Comp::ret(Value::unit()));
        next.leaves.push_back(Leaf::thread(redex->m1));
        acc.add(Rule::Fork, std::move(next));
        break;
      }
      case CompKind::NewCh: {
        Config next = cfg;
        std::string c = fresh_config_name(cfg, "c");
        next.binders.push_back({c, redex->ann, nullptr});
        next.leaves.push_back(Leaf::buffer(c, {}));
        next.leaves[i].term = plug(dec.frames, Comp::ret(Value::mkname(c)));
        acc.add(Rule::NewCh, std::move(next));
        break;
      }
      case CompKind::Choose: {
        if (!exts.choice) break;
        auto a = value_name(redex->v1);
        auto b = value_name(redex->v2);
        if (!a || !b) break;
        int ai = find_leaf(cfg, LeafKind::Buffer, *a);
        int bi = find_leaf(cfg, LeafKind::Buffer, *b);
        const Binder* ba = find_binder(cfg, *a);
        const Binder* bb = find_binder(cfg, *b);
        TypePtr sum = (ba && bb) ? Type::sum(ba->carried, bb->carried) : nullptr;
        auto inject = [&](ValuePtr w, bool left) {
          auto inj = left ? Value::inl(w) : Value::inr(w);
          return sum ? Value::ascribe(inj, sum) : inj;
        };
        if (ai >= 0 && !cfg.leaves[ai].queue.empty()) {
          Config next = cfg;
          auto head = next.leaves[ai].queue.front();
          next.leaves[ai].queue.erase(next.leaves[ai].queue.begin());
          next.leaves[i].term = plug(dec.frames, Comp::ret(inject(head, true)));
          acc.add(Rule::ChooseL, std::move(next));
        }
        if (bi >= 0 && !cfg.leaves[bi].queue.empty()) {
          Config next = cfg;
          auto head = next.leaves[bi].queue.front();
          next.leaves[bi].queue.erase(next.leaves[bi].queue.begin());
          next.leaves[i].term = plug(dec.frames, Comp::ret(inject(head, false)));
          acc.add(Rule::ChooseR, std::move(next));
        }
        break;
      }
      default:
        break;
    }
  }
  return acc.finish();
}

std::vector<Successor> step_config_act(const Config& cfg, const Extensions& exts) {
  Collector acc{exts, {}, {}};
  for (std::size_t i = 0; i < cfg.leaves.size(); i++) {
    const auto& leaf = cfg.leaves[i];
    if (leaf.kind != LeafKind::Actor) continue;
    auto st = step_term(leaf.term);
    if (st.status == TermStatus::Stepped) {
      Config next = cfg;
      next.leaves[i].term = st.next;
      acc.add(Rule::LiftM, std::move(next));
      continue;
    }
    if (st.status != TermStatus::Blocked) continue;
    auto dec = decompose(leaf.term);
    const auto& redex = dec.head;
    switch (redex->kind) {
      case CompKind::Spawn: {
        Config next = cfg;
        std::string b = fresh_config_name(cfg, "a");
        next.binders.push_back({b, redex->ann, redex->ann2});
        next.leaves.push_back(Leaf::actor(b, redex->m1, {}));
        next.leaves[i].term = plug(dec.frames, Comp::ret(Value::mkname(b)));
        acc.add(Rule::Spawn, std::move(next));
        break;
      }
      case CompKind::Send: {
        auto b = value_name(redex->v2);
        if (!b) break;
        if (*b == leaf.name) {
          Config next = cfg;
          next.leaves[i].queue.push_back(redex->v1);
          next.leaves[i].term = plug(dec.frames, Comp::ret(Value::unit()));
          acc.add(Rule::SendSelf, std::move(next));
          break;
        }
        int ti = find_leaf(cfg, LeafKind::Actor, *b);
        if (ti < 0) break;
        Config next = cfg;
        next.leaves[ti].queue.push_back(redex->v1);
        next.leaves[i].term = plug(dec.frames, Comp::ret(Value::unit()));
        acc.add(Rule::Send, std::move(next));
        break;
      }
      case CompKind::SelfPid: {
        Config next = cfg;
        next.leaves[i].term = plug(dec.frames, Comp::ret(Value::mkname(leaf.name)));
        acc.add(Rule::Self, std::move(next));
        break;
      }
      case CompKind::Receive: {
        if (leaf.queue.empty()) break;
        Config next = cfg;
        auto head = next.leaves[i].queue.front();
        next.leaves[i].queue.erase(next.leaves[i].queue.begin());
        next.leaves[i].term = plug(dec.frames, Comp::ret(head));
        acc.add(Rule::Receive, std::move(next));
        break;
      }
      case CompKind::Wait: {
        if (!exts.sync) break;
        auto b = value_name(redex->v1);
        if (!b) break;
        int ti = find_leaf(cfg, LeafKind::Actor, *b);
        if (ti < 0 || static_cast<std::size_t>(ti) == i) break;
        const auto& target = cfg.leaves[ti];
        if (!target.term || target.term->kind != CompKind::Return) break;
        Config next = cfg;
        next.leaves[i].term = plug(dec.frames, Comp::ret(target.term->v1));
        acc.add(Rule::Wait, std::move(next));
        break;
      }
      case CompKind::SelRecv: {
        if (!exts.selrecv) break;
        auto match = eval_selective_receive(redex->rarms, leaf.queue);
        if (!match) break;
        const auto& arm = redex->rarms[match->clause_index];
        Config next = cfg;
        next.leaves[i].queue = match->residual;
        next.leaves[i].term = plug(dec.frames, subst(arm.body, match->bound, arm.var));
        acc.add(Rule::SelRecv, std::move(next));
        break;
      }
      default:
        break;
    }
  }
  return acc.finish();
}

std::vector<Successor> step_config(const Config& cfg, const Extensions& exts) {
  return cfg.calc == Calc::Ch ? step_config_ch(cfg, exts) : step_config_act(cfg, exts);
}

}  // namespace mm
