#include <algorithm>
#include <functional>

#include "mm/harness.hpp"
#include "mm/ops.hpp"
#include "mm/translate.hpp"

namespace mm {

std::optional<FuzzMode> fuzz_mode_from_name(const std::string& name) {
  if (name == "preservation-ch") return FuzzMode::PreservationCh;
  if (name == "preservation-act") return FuzzMode::PreservationAct;
  if (name == "progress-ch") return FuzzMode::ProgressCh;
  if (name == "progress-act") return FuzzMode::ProgressAct;
  if (name == "a2c") return FuzzMode::A2C;
  if (name == "c2a") return FuzzMode::C2A;
  if (name == "selrecv") return FuzzMode::SelRecvMode;
  return std::nullopt;
}

const char* fuzz_mode_name(FuzzMode m) {
  switch (m) {
    case FuzzMode::PreservationCh: return "preservation-ch";
    case FuzzMode::PreservationAct: return "preservation-act";
    case FuzzMode::ProgressCh: return "progress-ch";
    case FuzzMode::ProgressAct: return "progress-act";
    case FuzzMode::A2C: return "a2c";
    case FuzzMode::C2A: return "c2a";
    case FuzzMode::SelRecvMode: return "selrecv";
  }
  return "?";
}

namespace {

struct Gen {
  SplitMix64* rng;
  GenOptions opts;
  Calc calc;
  // in-scope channels/actors and variables with their types
  std::vector<std::pair<ValuePtr, TypePtr>> scope;
  TypePtr ambient;  // actor mailbox type
  int var_counter = 0;

  bool coin(int pct) { return rng->below(100) < static_cast<std::uint64_t>(pct); }
  std::uint64_t pick(std::uint64_t n) { return rng->below(n); }

  std::string fresh_var() { return "v" + std::to_string(var_counter++); }

  // small closed payload types
  TypePtr payload_type(int depth = 1) {
    std::vector<TypePtr> pool = {Type::unit(), Type::boolean(),
                                 Type::prod(Type::unit(), Type::boolean()),
                                 Type::variant({{"a", Type::unit()}, {"b", Type::boolean()}}),
                                 Type::list(Type::unit())};
    if (opts.allow_int) {
      pool.push_back(Type::integer());
      pool.push_back(Type::variant({{"a", Type::integer()}, {"b", Type::unit()}}));
    }
    if (depth > 0 && coin(25))
      return Type::prod(payload_type(depth - 1), payload_type(depth - 1));
    return pool[pick(pool.size())];
  }

  std::vector<ValuePtr> candidates(const TypePtr& t) {
    std::vector<ValuePtr> out;
    for (const auto& [v, vt] : scope) {
      if (types_equal(vt, t)) out.push_back(v);
    }
    return out;
  }

  bool producible(const TypePtr& t, int depth = 3) {
    if (depth < 0) return false;
    switch (t->kind) {
      case TypeKind::Unit:
      case TypeKind::Int:
        return true;
      case TypeKind::Chan:
      case TypeKind::Actor:
      case TypeKind::Actor2:
        return !candidates(t).empty();
      case TypeKind::Prod:
        return producible(t->left, depth - 1) && producible(t->right, depth - 1);
      case TypeKind::Sum:
        return producible(t->left, depth - 1) || producible(t->right, depth - 1);
      case TypeKind::Variant:
        for (const auto& [l, lt] : t->labels)
          if (producible(lt, depth - 1)) return true;
        return false;
      case TypeKind::Mu:
        return list_elem_type(t) != nullptr;  // only list-shaped in the pool
      case TypeKind::Fun:
        return producible(t->ret, depth - 1);
      case TypeKind::Var:
        return false;
    }
    return false;
  }

  ValuePtr value(const TypePtr& t, int depth) {
    auto cands = candidates(t);
    if (!cands.empty() && (t->kind == TypeKind::Chan || t->kind == TypeKind::Actor || coin(35)))
      return cands[pick(cands.size())];
    switch (t->kind) {
      case TypeKind::Unit:
        return Value::unit();
      case TypeKind::Int:
        return Value::integer(static_cast<std::int64_t>(pick(10)));
      case TypeKind::Prod:
        return Value::pair(value(t->left, depth - 1), value(t->right, depth - 1));
      case TypeKind::Sum: {
        bool left = producible(t->left) && (!producible(t->right) || coin(50));
        auto inner = left ? Value::inl(value(t->left, depth - 1))
                          : Value::inr(value(t->right, depth - 1));
        return Value::ascribe(inner, t);
      }
      case TypeKind::Variant: {
        std::vector<std::size_t> ok;
        for (std::size_t i = 0; i < t->labels.size(); i++)
          if (producible(t->labels[i].second)) ok.push_back(i);
        const auto& [l, lt] = t->labels[ok[pick(ok.size())]];
        return Value::ascribe(Value::variant(l, value(lt, depth - 1)), t);
      }
      case TypeKind::Mu: {
        auto elem = list_elem_type(t);
        std::vector<ValuePtr> items;
        std::size_t n = depth > 0 ? pick(3) : 0;
        for (std::size_t i = 0; i < n; i++) items.push_back(value(elem, depth - 1));
        return make_list(items, t);
      }
      case TypeKind::Fun: {
        auto x = fresh_var();
        scope.emplace_back(Value::mkvar(x), t->arg);
        auto body = comp(t->ret, depth - 1);
        scope.pop_back();
        if (calc == Calc::Act) {
          Effect e = t->eff ? *t->eff : Effect{ambient, nullptr};
          return Value::lam(x, t->arg, e, body);
        }
        return Value::lam(x, t->arg, body);
      }
      case TypeKind::Chan:
      case TypeKind::Actor:
      case TypeKind::Actor2:
        if (!cands.empty()) return cands[pick(cands.size())];
        throw MMError("generator asked for an unproducible reference type");
      case TypeKind::Var:
        break;
    }
    throw MMError("generator asked for an unproducible type " + print_type(t));
  }

  // a computation the scope can type at `t`
  CompPtr comp(const TypePtr& t, int depth) {
    if (depth <= 0) return Comp::ret(value(t, 1));
    enum Opt { Ret, LetBind, Apply, Case, TakeRecv, Stmt, Rec };
    std::vector<Opt> options = {Ret, LetBind, LetBind, Apply, Case};
    // a communication read that already has the right type
    if (calc == Calc::Ch) {
      for (const auto& [v, vt] : scope)
        if (vt->kind == TypeKind::Chan && types_equal(vt->carried, t)) {
          options.push_back(TakeRecv);
          break;
        }
    } else if (types_equal(ambient, t)) {
      options.push_back(TakeRecv);
    }
    if (t->kind == TypeKind::Unit) options.insert(options.end(), 3, Stmt);
    if (opts.allow_rec && t->kind == TypeKind::Unit) options.push_back(Rec);
    switch (options[pick(options.size())]) {
      case Ret:
        return Comp::ret(value(t, depth));
      case LetBind: {
        auto [m, a] = bindable(depth - 1);
        auto x = fresh_var();
        scope.emplace_back(Value::mkvar(x), a);
        auto n = comp(t, depth - 1);
        scope.pop_back();
        return Comp::let(x, m, n);
      }
      case Apply: {
        auto a = payload_type();
        if (!producible(a)) return Comp::ret(value(t, depth));
        auto fn = calc == Calc::Act
                      ? Type::fun(a, Effect{ambient, nullptr}, t)
                      : Type::fun(a, t);
        return Comp::app(value(fn, depth - 1), value(a, depth - 1));
      }
      case Case: {
        auto s = Type::sum(Type::unit(), Type::boolean());
        auto xl = fresh_var();
        auto xr = fresh_var();
        auto scrut = value(s, depth - 1);
        scope.emplace_back(Value::mkvar(xl), s->left);
        auto ml = comp(t, depth - 1);
        scope.pop_back();
        scope.emplace_back(Value::mkvar(xr), s->right);
        auto mr = comp(t, depth - 1);
        scope.pop_back();
        return Comp::casesum(scrut, xl, ml, xr, mr);
      }
      case TakeRecv: {
        if (calc == Calc::Act) return selrecv_or_receive(t, 0);
        std::vector<ValuePtr> chans;
        for (const auto& [v, vt] : scope)
          if (vt->kind == TypeKind::Chan && types_equal(vt->carried, t)) chans.push_back(v);
        return Comp::take(chans[pick(chans.size())]);
      }
      case Stmt:
        return statement(depth);
      case Rec: {
        // a self-terminating loop over a small list
        auto x = fresh_var();
        auto f = fresh_var();
        auto lty = Type::list(Type::unit());
        CompPtr recurse = Comp::caselist(
            Value::mkvar(x), Comp::ret(Value::unit()), "h", "tl",
            Comp::app(Value::mkvar(f), Value::mkvar("tl")));
        auto fn = calc == Calc::Act
                      ? Value::rec(f, x, lty, Type::unit(), Effect{ambient, nullptr}, recurse)
                      : Value::rec(f, x, lty, Type::unit(), recurse);
        return Comp::app(fn, value(lty, 2));
      }
    }
    return Comp::ret(value(t, depth));
  }

  // receive, or a selective receive with generated clauses
  CompPtr selrecv_or_receive(const TypePtr& t, int /*depth*/) {
    if (calc != Calc::Act) throw MMError("receive outside the actor calculus");
    if (!opts.gen_selrecv || ambient->kind != TypeKind::Variant || !coin(70))
      return Comp::receive();
    // clauses over a subset of labels; bodies rewrap so every branch has the
    // mailbox type
    std::vector<ReceiveArm> arms;
    for (const auto& [l, lt] : ambient->labels) {
      if (!arms.empty() && coin(30)) continue;
      auto x = fresh_var();
      CompPtr guard = Comp::ret(Value::ascribe(
          coin(80) ? Value::inl(Value::unit()) : Value::inr(Value::unit()), Type::boolean()));
      CompPtr body =
          Comp::ret(Value::ascribe(Value::variant(l, Value::mkvar(x)), ambient));
      arms.push_back({l, x, guard, body});
      (void)lt;
    }
    if (arms.empty()) return Comp::receive();
    if (!types_equal(t, ambient)) throw MMError("generator: receive at a non-mailbox type");
    return Comp::selrecv(std::move(arms));
  }

  // computations worth binding with let
  std::pair<CompPtr, TypePtr> bindable(int depth) {
    enum B { NewChB, SpawnB, TakeB, RecvB, SelfB, PlainB, ChooseB };
    std::vector<B> options = {PlainB};
    if (calc == Calc::Ch) {
      options.push_back(NewChB);
      for (const auto& [v, vt] : scope)
        if (vt->kind == TypeKind::Chan) {
          options.insert(options.end(), 2, TakeB);
          break;
        }
      if (opts.exts.choice) {
        int chans = 0;
        for (const auto& [v, vt] : scope)
          if (vt->kind == TypeKind::Chan) chans++;
        if (chans >= 2) options.push_back(ChooseB);
      }
    } else {
      options.push_back(SpawnB);
      options.push_back(RecvB);
      options.push_back(SelfB);
    }
    switch (options[pick(options.size())]) {
      case NewChB: {
        auto p = payload_type();
        return {Comp::newch(p), Type::chan(p)};
      }
      case SpawnB: {
        // selective-receive lowering needs variant mailboxes everywhere
        auto p = opts.gen_selrecv
                     ? Type::variant({{"l1", payload_type()}, {"l2", Type::unit()}})
                     : payload_type();
        auto saved_amb = ambient;
        ambient = p;
        auto body = comp(Type::unit(), depth);
        ambient = saved_amb;
        return {Comp::spawn(p, body), Type::actor(p)};
      }
      case TakeB: {
        std::vector<std::pair<ValuePtr, TypePtr>> chans;
        for (const auto& [v, vt] : scope)
          if (vt->kind == TypeKind::Chan) chans.emplace_back(v, vt);
        auto [c, ct] = chans[pick(chans.size())];
        return {Comp::take(c), ct->carried};
      }
      case RecvB:
        return {selrecv_or_receive(ambient, 0), ambient};
      case SelfB:
        return {Comp::self(), Type::actor(ambient)};
      case ChooseB: {
        std::vector<std::pair<ValuePtr, TypePtr>> chans;
        for (const auto& [v, vt] : scope)
          if (vt->kind == TypeKind::Chan) chans.emplace_back(v, vt);
        auto ia = pick(chans.size());
        auto ib = pick(chans.size());
        if (ib == ia) ib = (ia + 1) % chans.size();
        return {Comp::choose(chans[ia].first, chans[ib].first),
                Type::sum(chans[ia].second->carried, chans[ib].second->carried)};
      }
      case PlainB:
      default: {
        auto a = payload_type();
        if (!producible(a)) a = Type::unit();
        return {comp(a, depth), a};
      }
    }
  }

  // unit-typed communication statements
  CompPtr statement(int depth) {
    if (calc == Calc::Ch) {
      std::vector<std::pair<ValuePtr, TypePtr>> chans;
      for (const auto& [v, vt] : scope)
        if (vt->kind == TypeKind::Chan && producible(vt->carried)) chans.emplace_back(v, vt);
      if (!chans.empty() && coin(70)) {
        auto [c, ct] = chans[pick(chans.size())];
        return Comp::give(value(ct->carried, depth - 1), c);
      }
      if (coin(50)) return Comp::fork(comp(Type::unit(), depth - 1));
      return Comp::ret(Value::unit());
    }
    std::vector<std::pair<ValuePtr, TypePtr>> actors;
    for (const auto& [v, vt] : scope)
      if (vt->kind == TypeKind::Actor && producible(vt->carried)) actors.emplace_back(v, vt);
    if (!actors.empty() && coin(75)) {
      auto [a, at] = actors[pick(actors.size())];
      return Comp::send(value(at->carried, depth - 1), a);
    }
    return Comp::ret(Value::unit());
  }
};

}  // namespace

Config gen_ch_config(SplitMix64& rng, const GenOptions& opts) {
  Gen g{&rng, opts, Calc::Ch, {}, nullptr, 0};
  Config cfg;
  cfg.calc = Calc::Ch;
  std::size_t nchan = 1 + rng.below(static_cast<std::uint64_t>(opts.max_channels));
  for (std::size_t i = 0; i < nchan; i++) {
    TypePtr carried;
    if (opts.multi_type) {
      carried = g.payload_type();
      // channel-over-channel payloads exercise the recursive token
      if (i > 0 && g.coin(25)) carried = Type::chan(cfg.binders[rng.below(i)].carried);
    } else {
      carried = i == 0 ? g.payload_type() : cfg.binders[0].carried;
    }
    std::string name = "c" + std::to_string(i);
    cfg.binders.push_back({name, carried, nullptr});
    g.scope.emplace_back(Value::mkname(name), Type::chan(carried));
  }
  for (const auto& b : cfg.binders) {
    std::vector<ValuePtr> queue;
    std::size_t n = rng.below(static_cast<std::uint64_t>(opts.max_queue) + 1);
    for (std::size_t i = 0; i < n && g.producible(b.carried); i++)
      queue.push_back(g.value(b.carried, 2));
    cfg.leaves.push_back(Leaf::buffer(b.name, std::move(queue)));
  }
  std::size_t nthread = 1 + rng.below(static_cast<std::uint64_t>(opts.max_processes));
  for (std::size_t i = 0; i < nthread; i++) {
    cfg.leaves.push_back(Leaf::thread(desugar(g.comp(Type::unit(), opts.term_depth))));
  }
  return cfg;
}

Config gen_act_config(SplitMix64& rng, const GenOptions& opts) {
  Gen g{&rng, opts, Calc::Act, {}, nullptr, 0};
  Config cfg;
  cfg.calc = Calc::Act;
  std::size_t nact = 1 + rng.below(static_cast<std::uint64_t>(opts.max_processes));
  for (std::size_t i = 0; i < nact; i++) {
    TypePtr mailbox;
    if (opts.gen_selrecv || g.coin(60)) {
      mailbox = Type::variant({{"l1", g.payload_type()}, {"l2", g.payload_type()}});
    } else {
      mailbox = g.payload_type();
    }
    std::string name = "a" + std::to_string(i);
    cfg.binders.push_back({name, mailbox, nullptr});
    g.scope.emplace_back(Value::mkname(name), Type::actor(mailbox));
  }
  for (const auto& b : cfg.binders) {
    std::vector<ValuePtr> queue;
    std::size_t n = rng.below(static_cast<std::uint64_t>(opts.max_queue) + 1);
    for (std::size_t i = 0; i < n && g.producible(b.carried); i++)
      queue.push_back(g.value(b.carried, 2));
    g.ambient = b.carried;
    cfg.leaves.push_back(Leaf::actor(b.name, desugar(g.comp(Type::unit(), opts.term_depth)), queue));
  }
  return cfg;
}

namespace {

// Shrinks a failing configuration: fewer leaves, shorter queues, simpler
// terms, while the predicate keeps failing and the result stays well typed.
Config shrink(Config cfg, const Extensions& exts,
              const std::function<bool(const Config&)>& fails) {
  auto well_typed = [&](const Config& c) {
    try {
      typecheck_config(c, exts);
      return true;
    } catch (const MMError&) {
      return false;
    }
  };
  bool progress = true;
  while (progress) {
    progress = false;
    // drop bare threads
    for (std::size_t i = 0; i < cfg.leaves.size(); i++) {
      if (cfg.leaves[i].kind != LeafKind::Thread) continue;
      Config cand = cfg;
      cand.leaves.erase(cand.leaves.begin() + static_cast<long>(i));
      if (well_typed(cand) && fails(cand)) {
        cfg = std::move(cand);
        progress = true;
        break;
      }
    }
    if (progress) continue;
    // drop an unreferenced restricted process
    for (std::size_t i = 0; i < cfg.binders.size(); i++) {
      const auto& name = cfg.binders[i].name;
      Config cand = cfg;
      cand.binders.erase(cand.binders.begin() + static_cast<long>(i));
      for (std::size_t j = 0; j < cand.leaves.size(); j++) {
        if (cand.leaves[j].kind != LeafKind::Thread && cand.leaves[j].name == name) {
          cand.leaves.erase(cand.leaves.begin() + static_cast<long>(j));
          break;
        }
      }
      if (config_free_names(cand).count(name)) continue;
      if (well_typed(cand) && fails(cand)) {
        cfg = std::move(cand);
        progress = true;
        break;
      }
    }
    if (progress) continue;
    // shorten queues
    for (std::size_t i = 0; i < cfg.leaves.size(); i++) {
      if (cfg.leaves[i].queue.empty()) continue;
      Config cand = cfg;
      cand.leaves[i].queue.pop_back();
      if (well_typed(cand) && fails(cand)) {
        cfg = std::move(cand);
        progress = true;
        break;
      }
    }
    if (progress) continue;
    // blank out terms
    for (std::size_t i = 0; i < cfg.leaves.size(); i++) {
      if (cfg.leaves[i].kind == LeafKind::Buffer || !cfg.leaves[i].term) continue;
      if (cfg.leaves[i].term->kind == CompKind::Return) continue;
      Config cand = cfg;
      cand.leaves[i].term = Comp::ret(Value::unit());
      if (well_typed(cand) && fails(cand)) {
        cfg = std::move(cand);
        progress = true;
        break;
      }
    }
  }
  return cfg;
}

}  // namespace

FuzzReport fuzz(FuzzMode mode, const FuzzOptions& opts) {
  FuzzReport rep;
  rep.mode = mode;
  rep.requested = opts.count;
  SplitMix64 rng(opts.seed);

  auto record_failure = [&](Config cfg, const std::string& what,
                            const std::function<bool(const Config&)>& fails,
                            const Extensions& exts) {
    rep.failures++;
    if (rep.examples.size() < 5) {
      auto small = shrink(std::move(cfg), exts, fails);
      rep.examples.push_back({what, print_config(small)});
    }
  };

  for (int i = 0; i < opts.count; i++) {
    rep.executed++;
    switch (mode) {
      case FuzzMode::PreservationCh:
      case FuzzMode::PreservationAct: {
        bool ch = mode == FuzzMode::PreservationCh;
        GenOptions g = opts.gen;
        g.allow_rec = true;
        Config cfg = ch ? gen_ch_config(rng, g) : gen_act_config(rng, g);
        auto fails = [&](const Config& c) {
          try {
            typecheck_config(c, g.exts);
          } catch (const MMError&) {
            return false;  // ill-typed inputs are out of scope
          }
          for (const auto& s : step_config(c, g.exts)) {
            try {
              typecheck_config(s.config, g.exts);
            } catch (const MMError&) {
              return true;
            }
          }
          return false;
        };
        try {
          typecheck_config(cfg, g.exts);
        } catch (const MMError& e) {
          record_failure(cfg, std::string("generator produced an ill-typed configuration: ") +
                                  e.what(),
                         [](const Config&) { return true; }, g.exts);
          continue;
        }
        if (fails(cfg)) record_failure(cfg, "a successor fails to re-typecheck", fails, g.exts);
        break;
      }
      case FuzzMode::ProgressCh:
      case FuzzMode::ProgressAct: {
        bool ch = mode == FuzzMode::ProgressCh;
        GenOptions g = opts.gen;
        g.allow_rec = false;
        Config cfg = ch ? gen_ch_config(rng, g) : gen_act_config(rng, g);
        auto fails = [&](const Config& c) {
          RunOptions ro;
          ro.seed = opts.seed + static_cast<std::uint64_t>(i);
          ro.fuel = opts.fuel;
          ro.exts = g.exts;
          try {
            (void)run(c, ro);
            return false;
          } catch (const MMError&) {
            return true;  // classification failed
          }
        };
        if (fails(cfg))
          record_failure(cfg, "quiescent leaf failed to classify", fails, g.exts);
        break;
      }
      case FuzzMode::A2C: {
        GenOptions g = opts.gen;
        Config cfg = gen_act_config(rng, g);
        FreshNames fresh;
        auto fails_typing = [&](const Config& c) {
          FreshNames f;
          try {
            typecheck_config(translate_config_a2c(c, f), Extensions{});
            return false;
          } catch (const MMError&) {
            return true;
          }
        };
        if (fails_typing(cfg)) {
          record_failure(cfg, "translated configuration fails to typecheck", fails_typing,
                         g.exts);
          break;
        }
        SimOptions so;
        so.depth = opts.sim_depth;
        so.exts = g.exts;
        auto simrep = check_simulation(cfg, SimDirection::A2C, so, fresh);
        if (!simrep.ok) {
          auto fails = [&](const Config& c) {
            FreshNames f2;
            return !check_simulation(c, SimDirection::A2C, so, f2).ok;
          };
          record_failure(cfg, "simulation witness missing: " + simrep.failure, fails, g.exts);
        }
        break;
      }
      case FuzzMode::C2A: {
        GenOptions g = opts.gen;
        Config cfg = gen_ch_config(rng, g);
        FreshNames fresh;
        try {
          auto co = coalesce_config(cfg, g.exts, fresh);
          typecheck_config(co.config, Extensions{});
          // error freedom within the exploration bound
          ExploreOptions eo;
          eo.depth = opts.explore_depth;
          eo.max_states = 20000;
          auto graph = explore(co.config, eo);
          for (const auto& node : graph.nodes) {
            if (error_in_eval_position(node.config))
              throw MMError("reachable error in evaluation position:\n" +
                            print_config(node.config));
          }
          typecheck_config(translate_config_c2a(co.config, fresh), Extensions{});
          SimOptions so;
          so.depth = opts.sim_depth;
          auto simrep = check_simulation(co.config, SimDirection::C2A, so, fresh);
          if (!simrep.ok) throw MMError("simulation witness missing: " + simrep.failure);
        } catch (const MMError& e) {
          record_failure(cfg, e.what(), [](const Config&) { return true; }, g.exts);
        }
        break;
      }
      case FuzzMode::SelRecvMode: {
        GenOptions g = opts.gen;
        g.gen_selrecv = true;
        g.exts.selrecv = true;
        g.max_queue = std::min(g.max_queue, 4);
        Config cfg = gen_act_config(rng, g);
        FreshNames fresh;
        try {
          for (const auto& d : lower_config(cfg, fresh)) {
            typecheck_config(d, Extensions{});
          }
          SimOptions so;
          so.depth = std::min(opts.sim_depth, 2);
          so.exts = g.exts;
          auto simrep = check_simulation(cfg, SimDirection::SelRecv, so, fresh);
          if (!simrep.ok) throw MMError("membership witness missing: " + simrep.failure);
        } catch (const MMError& e) {
          record_failure(cfg, e.what(), [](const Config&) { return true; }, g.exts);
        }
        break;
      }
    }
  }
  return rep;
}

}  // namespace mm
