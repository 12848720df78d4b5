#include "mm/ops.hpp"
#include "mm/translate.hpp"

namespace mm {

namespace {

// Collects every carried channel type, with enclosing recursive binders
// resolved so an occurrence under its own mu compares equal to the closed
// type.
void collect_chan_types_env(const TypePtr& t,
                            std::vector<std::pair<std::string, TypePtr>>& mu_env,
                            std::vector<TypePtr>& out) {
  if (!t) return;
  if (t->kind == TypeKind::Mu) {
    TypePtr closed = t;
    for (auto it = mu_env.rbegin(); it != mu_env.rend(); ++it)
      closed = subst_type(closed, it->first, it->second);
    mu_env.emplace_back(t->var, closed);
    collect_chan_types_env(t->body, mu_env, out);
    mu_env.pop_back();
    return;
  }
  if (t->kind == TypeKind::Chan) {
    TypePtr carried = t->carried;
    for (auto it = mu_env.rbegin(); it != mu_env.rend(); ++it)
      carried = subst_type(carried, it->first, it->second);
    out.push_back(carried);
  }
  collect_chan_types_env(t->arg, mu_env, out);
  collect_chan_types_env(t->ret, mu_env, out);
  if (t->eff) {
    collect_chan_types_env(t->eff->mailbox, mu_env, out);
    collect_chan_types_env(t->eff->result, mu_env, out);
  }
  collect_chan_types_env(t->carried, mu_env, out);
  collect_chan_types_env(t->result, mu_env, out);
  collect_chan_types_env(t->left, mu_env, out);
  collect_chan_types_env(t->right, mu_env, out);
  collect_chan_types_env(t->body, mu_env, out);
  for (const auto& [l, lt] : t->labels) collect_chan_types_env(lt, mu_env, out);
}

void collect_chan_types(const TypePtr& t, std::vector<TypePtr>& out) {
  std::vector<std::pair<std::string, TypePtr>> env;
  collect_chan_types_env(t, env, out);
}

void collect_chan_types_value(const ValuePtr& v, std::vector<TypePtr>& out);
void collect_chan_types_comp(const CompPtr& m, std::vector<TypePtr>& out) {
  if (!m) return;
  collect_chan_types(m->ann, out);
  collect_chan_types(m->ann2, out);
  collect_chan_types_value(m->v1, out);
  collect_chan_types_value(m->v2, out);
  collect_chan_types_comp(m->m1, out);
  collect_chan_types_comp(m->m2, out);
  collect_chan_types_comp(m->nil_body, out);
  collect_chan_types_comp(m->cons_body, out);
  for (const auto& arm : m->arms) collect_chan_types_comp(arm.body, out);
  for (const auto& arm : m->rarms) {
    collect_chan_types_comp(arm.guard, out);
    collect_chan_types_comp(arm.body, out);
  }
}
void collect_chan_types_value(const ValuePtr& v, std::vector<TypePtr>& out) {
  if (!v) return;
  collect_chan_types(v->ty, out);
  collect_chan_types(v->ret, out);
  if (v->eff) {
    collect_chan_types(v->eff->mailbox, out);
    collect_chan_types(v->eff->result, out);
  }
  collect_chan_types_value(v->v1, out);
  collect_chan_types_value(v->v2, out);
  collect_chan_types_comp(v->body, out);
}

TypePtr common_of(std::vector<TypePtr> found) {
  if (found.empty()) return Type::unit();  // no channels anywhere; any type works
  for (std::size_t i = 1; i < found.size(); i++) {
    if (!types_equal(found[0], found[i]))
      throw TranslateError("channels at different types (" + print_type(found[0]) + " vs " +
                           print_type(found[i]) + "); coalesce first");
  }
  return found[0];
}

bool type_has_fun(const TypePtr& t) {
  if (!t) return false;
  if (t->kind == TypeKind::Fun) return true;
  if (type_has_fun(t->arg) || type_has_fun(t->ret)) return true;
  if (t->eff && (type_has_fun(t->eff->mailbox) || type_has_fun(t->eff->result))) return true;
  if (type_has_fun(t->carried) || type_has_fun(t->result)) return true;
  if (type_has_fun(t->left) || type_has_fun(t->right) || type_has_fun(t->body)) return true;
  for (const auto& [l, lt] : t->labels)
    if (type_has_fun(lt)) return true;
  return false;
}

// Translates types with respect to the common channel type. Arrows are
// annotated with the translated channel type; inside the channel type's own
// recursive binder that annotation is the binder variable, which unrolls to
// the right thing.
struct TypeTr {
  TypePtr chanSrc;
  bool sync;
  TypePtr tC;            // translated channel type (non-sync)
  std::string c_mu_var;  // binder of chanSrc when it is recursive
  bool inside_c = false;

  TypeTr(TypePtr c, bool sync_mode) : chanSrc(std::move(c)), sync(sync_mode) {
    if (sync) return;
    if (chanSrc->kind == TypeKind::Mu) {
      c_mu_var = chanSrc->var;
      inside_c = true;
      tC = go(chanSrc);
      inside_c = false;
    } else {
      if (type_has_fun(chanSrc))
        throw TranslateError("carried function types need a recursive channel type; coalesce first");
      tC = go(chanSrc);
    }
  }

  TypePtr ann() const { return inside_c ? Type::tvar(c_mu_var) : tC; }

  TypePtr go(const TypePtr& t) {
    switch (t->kind) {
      case TypeKind::Unit:
      case TypeKind::Int:
      case TypeKind::Var:
        return t;
      case TypeKind::Chan: {
        if (sync) {
          auto a = go(t->carried);
          return Type::actor2(Type::sum(a, Type::actor2(a, a)), Type::unit());
        }
        auto a = go(t->carried);
        return Type::actor(Type::sum(a, Type::actor(a)));
      }
      case TypeKind::Fun: {
        if (t->eff) throw TranslateError("actor arrow in a channel-calculus type");
        Effect e;
        if (sync) {
          e.mailbox = Type::unit();
          e.result = Type::unit();
        } else {
          e.mailbox = ann();
        }
        return Type::fun(go(t->arg), e, go(t->ret));
      }
      case TypeKind::Prod:
        return Type::prod(go(t->left), go(t->right));
      case TypeKind::Sum:
        return Type::sum(go(t->left), go(t->right));
      case TypeKind::Variant: {
        std::vector<std::pair<std::string, TypePtr>> ls;
        for (const auto& [l, lt] : t->labels) ls.emplace_back(l, go(lt));
        return Type::variant(std::move(ls));
      }
      case TypeKind::Mu:
        return Type::mu(t->var, go(t->body));
      case TypeKind::Actor:
      case TypeKind::Actor2:
        throw TranslateError("actor type in a channel-calculus program");
    }
    throw TranslateError("unreachable type kind");
  }
};

struct C2ATranslator {
  TypeTr types;
  C2AOptions opts;
  FreshNames* fresh;
  Checker checker;

  C2ATranslator(TypePtr chanTy, const C2AOptions& o, FreshNames& f)
      : types(std::move(chanTy), o.sync), opts(o), fresh(&f), checker(Calc::Ch, Extensions{}) {}

  Effect thread_eff() const {
    if (opts.sync) return Effect{Type::unit(), Type::unit()};
    return Effect{types.tC, nullptr};
  }

  ValuePtr value(const TypeEnv& g, const ValuePtr& v) {
    switch (v->kind) {
      case ValKind::Var:
      case ValKind::Name:
      case ValKind::Unit:
      case ValKind::Int:
      case ValKind::Error:
        return v;
      case ValKind::Lam: {
        if (v->eff) throw TranslateError("actor arrow in a channel-calculus program");
        TypeEnv inner = g;
        inner.bind_var(v->var, v->ty);
        return Value::lam(v->var, types.go(v->ty), thread_eff(), term(inner, v->body));
      }
      case ValKind::Rec: {
        if (v->eff) throw TranslateError("actor arrow in a channel-calculus program");
        TypeEnv inner = g;
        inner.bind_var(v->fname, Type::fun(v->ty, v->ret));
        inner.bind_var(v->var, v->ty);
        return Value::rec(v->fname, v->var, types.go(v->ty), types.go(v->ret), thread_eff(),
                          term(inner, v->body));
      }
      case ValKind::Pair:
        return Value::pair(value(g, v->v1), value(g, v->v2));
      case ValKind::Inl:
        return Value::inl(value(g, v->v1));
      case ValKind::Inr:
        return Value::inr(value(g, v->v1));
      case ValKind::Variant:
        return Value::variant(v->label, value(g, v->v1));
      case ValKind::Roll:
        return Value::roll(value(g, v->v1));
      case ValKind::Ascribe:
        return Value::ascribe(value(g, v->v1), types.go(v->ty));
      case ValKind::Nil:
      case ValKind::Cons:
      case ValKind::BoolLit:
        throw TranslateError("surface form in translation input; desugar first");
    }
    throw TranslateError("unreachable value kind");
  }

  CompPtr term(const TypeEnv& g, const CompPtr& m) {
    switch (m->kind) {
      case CompKind::Fork: {
        auto x = fresh->next();
        auto child = term(g, m->m1);
        auto sp = opts.sync ? Comp::spawn2(Type::unit(), Type::unit(), child)
                            : Comp::spawn(types.tC, child);
        return Comp::let(x, sp, Comp::ret(Value::unit()));
      }
      case CompKind::Give: {
        auto ct = checker.synth_value(g, m->v2);
        if (ct->kind != TypeKind::Chan) throw TranslateError("give to a non-channel");
        auto trA = types.go(ct->carried);
        auto pidTy = opts.sync ? Type::actor2(trA, trA) : Type::actor(trA);
        // ascribed so the payload stays inferable once it reaches a mailbox
        auto payload = Value::ascribe(Value::inl(value(g, m->v1)), Type::sum(trA, pidTy));
        return Comp::send(payload, value(g, m->v2));
      }
      case CompKind::Take: {
        auto ct = checker.synth_value(g, m->v1);
        if (ct->kind != TypeKind::Chan) throw TranslateError("take from a non-channel");
        auto trA = types.go(ct->carried);
        auto pidTy = opts.sync ? Type::actor2(trA, trA) : Type::actor(trA);
        auto mbTy = Type::sum(trA, pidTy);
        auto sp = fresh->next();
        auto x = fresh->next();
        auto requestor = Comp::let(
            sp, Comp::self(),
            Comp::let(x,
                      Comp::send(Value::ascribe(Value::inr(Value::mkvar(sp)), mbTy),
                                 value(g, m->v1)),
                      Comp::receive()));
        if (!opts.sync) return requestor;
        auto req = fresh->next();
        return Comp::let(req, Comp::spawn2(trA, trA, requestor),
                         Comp::wait(Value::mkvar(req)));
      }
      case CompKind::NewCh: {
        if (!opts.sync && !types_equal(m->ann, types.chanSrc))
          throw TranslateError("newCh at a different type than the common channel type");
        auto trA = types.go(m->ann);
        auto bodyv = c2a_body(trA, *fresh, opts);
        auto vals = make_list({}, Type::list(trA));
        auto pidTy = opts.sync ? Type::actor2(trA, trA) : Type::actor(trA);
        auto pids = make_list({}, Type::list(pidTy));
        auto call = Comp::app(bodyv, Value::pair(vals, pids));
        auto mbTy = Type::sum(trA, pidTy);
        return opts.sync ? Comp::spawn2(mbTy, Type::unit(), call) : Comp::spawn(mbTy, call);
      }
      case CompKind::Choose:
        throw TranslateError("input-guarded choice has no actor image");
      case CompKind::Let: {
        auto a = checker.synth_comp(g, nullptr, m->m1);
        TypeEnv inner = g;
        inner.bind_var(m->var, a);
        return Comp::let(m->var, term(g, m->m1), term(inner, m->m2));
      }
      case CompKind::App:
        return Comp::app(value(g, m->v1), value(g, m->v2));
      case CompKind::Return:
        return Comp::ret(value(g, m->v1));
      case CompKind::LetPair: {
        auto p = checker.synth_value(g, m->v1);
        TypeEnv inner = g;
        inner.bind_var(m->var, p->left);
        inner.bind_var(m->var2, p->right);
        return Comp::letpair(m->var, m->var2, value(g, m->v1), term(inner, m->m1));
      }
      case CompKind::CaseSum: {
        auto s = checker.synth_value(g, m->v1);
        TypeEnv le = g, re = g;
        le.bind_var(m->var, s->left);
        re.bind_var(m->var2, s->right);
        return Comp::casesum(value(g, m->v1), m->var, term(le, m->m1), m->var2, term(re, m->m2));
      }
      case CompKind::CaseVariant: {
        auto s = checker.synth_value(g, m->v1);
        std::vector<VariantArm> arms;
        for (const auto& arm : m->arms) {
          const TypePtr* lt = nullptr;
          for (const auto& [l, t] : s->labels)
            if (l == arm.label) lt = &t;
          if (!lt) throw TranslateError("case arm label not in scrutinee type");
          TypeEnv inner = g;
          inner.bind_var(arm.var, *lt);
          arms.push_back({arm.label, arm.var, term(inner, arm.body)});
        }
        return Comp::casevariant(value(g, m->v1), std::move(arms));
      }
      case CompKind::Unroll:
        return Comp::unroll(value(g, m->v1));
      case CompKind::Neg:
        return Comp::neg(value(g, m->v1));
      case CompKind::Add:
        return Comp::add(value(g, m->v1), value(g, m->v2));
      case CompKind::Gt:
        return Comp::gt(value(g, m->v1), value(g, m->v2));
      case CompKind::Concat:
        return Comp::concat(value(g, m->v1), value(g, m->v2));
      case CompKind::Spawn:
      case CompKind::Send:
      case CompKind::Receive:
      case CompKind::SelfPid:
      case CompKind::Wait:
      case CompKind::SelRecv:
        throw TranslateError("actor primitive in a channel-calculus program");
      case CompKind::Seq:
      case CompKind::CaseList:
      case CompKind::LetVal:
      case CompKind::If:
        throw TranslateError("surface form in translation input; desugar first");
    }
    throw TranslateError("unreachable computation kind");
  }
};

}  // namespace

TypePtr common_channel_type_config(const Config& cfg) {
  std::vector<TypePtr> found;
  for (const auto& b : cfg.binders) {
    found.push_back(b.carried);
    collect_chan_types(b.carried, found);
  }
  for (const auto& l : cfg.leaves) {
    collect_chan_types_comp(l.term, found);
    for (const auto& v : l.queue) collect_chan_types_value(v, found);
  }
  return common_of(std::move(found));
}

TypePtr common_channel_type_term(const CompPtr& m) {
  std::vector<TypePtr> found;
  collect_chan_types_comp(m, found);
  return common_of(std::move(found));
}

TypePtr translate_type_c2a(const TypePtr& t, const TypePtr& chan_type, const C2AOptions& opts) {
  TypeTr tr(chan_type, opts.sync);
  return tr.go(t);
}

ValuePtr c2a_body(const TypePtr& trC, FreshNames& fresh, const C2AOptions& opts) {
  (void)fresh;
  auto pidTy = opts.sync ? Type::actor2(trC, trC) : Type::actor(trC);
  auto mbTy = Type::sum(trC, pidTy);
  auto state = Type::prod(Type::list(trC), Type::list(pidTy));
  Effect eff{mbTy, opts.sync ? Type::unit() : nullptr};

  // drain: satisfies every request that can be satisfied; at most one of the
  // two lists is non-empty afterwards
  auto drain = Value::lam(
      "st", state, eff,
      Comp::letpair(
          "vals", "pids", Value::mkvar("st"),
          Comp::caselist(
              Value::mkvar("vals"),
              Comp::ret(Value::pair(Value::mkvar("vals"), Value::mkvar("pids"))), "v", "vs",
              Comp::caselist(
                  Value::mkvar("pids"),
                  Comp::ret(Value::pair(Value::mkvar("vals"), Value::mkvar("pids"))), "pid",
                  "pids'",
                  Comp::seq(Comp::send(Value::mkvar("v"), Value::mkvar("pid")),
                            Comp::ret(Value::pair(Value::mkvar("vs"), Value::mkvar("pids'"))))))));

  auto branch = [&](const char* queued, ValuePtr singleton, const char* updated,
                    bool into_vals) {
    ValuePtr vals = Value::mkvar(into_vals ? updated : "vals");
    ValuePtr pids = Value::mkvar(into_vals ? "pids" : updated);
    return Comp::let(
        updated, Comp::concat(Value::mkvar(queued), std::move(singleton)),
        Comp::let("st'", Comp::app(drain, Value::pair(vals, pids)),
                  Comp::app(Value::mkvar("g"), Value::mkvar("st'"))));
  };

  auto body = Value::rec(
      "g", "state", state, Type::unit(), eff,
      Comp::let(
          "recvVal", Comp::receive(),
          Comp::letpair(
              "vals", "pids", Value::mkvar("state"),
              Comp::casesum(Value::mkvar("recvVal"), "v",
                            branch("vals", make_list({Value::mkvar("v")}, Type::list(trC)),
                                   "vals'", true),
                            "pid",
                            branch("pids", make_list({Value::mkvar("pid")}, Type::list(pidTy)),
                                   "pids'", false)))));
  return desugar_value(body);
}

CompPtr translate_term_c2a(const CompPtr& m, const TypePtr& chan_type, const TypeEnv& env,
                           FreshNames& fresh, const C2AOptions& opts) {
  C2ATranslator tr(chan_type, opts, fresh);
  return tr.term(env, m);
}

Config translate_config_c2a(const Config& cfg, FreshNames& fresh, const C2AOptions& opts) {
  if (cfg.calc != Calc::Ch) throw TranslateError("expected a channel configuration");
  auto chanTy = opts.sync ? Type::unit() : common_channel_type_config(cfg);
  C2ATranslator tr(chanTy, opts, fresh);

  TypeEnv g;
  for (const auto& b : cfg.binders) g.bind_name(b.name, Type::chan(b.carried));

  Config out;
  out.calc = Calc::Act;
  std::vector<Leaf> leaves;
  for (const auto& b : cfg.binders) {
    auto trA = tr.types.go(b.carried);
    auto pidTy = opts.sync ? Type::actor2(trA, trA) : Type::actor(trA);
    out.binders.push_back({b.name, Type::sum(trA, pidTy), opts.sync ? Type::unit() : nullptr});
  }
  for (const auto& l : cfg.leaves) {
    switch (l.kind) {
      case LeafKind::Buffer: {
        const Binder* b = nullptr;
        for (const auto& bb : cfg.binders)
          if (bb.name == l.name) b = &bb;
        if (!b) throw TranslateError("buffer for unrestricted name '" + l.name + "'");
        auto trA = tr.types.go(b->carried);
        auto pidTy = opts.sync ? Type::actor2(trA, trA) : Type::actor(trA);
        std::vector<ValuePtr> vals;
        for (const auto& v : l.queue) vals.push_back(tr.value(g, v));
        auto call = Comp::app(c2a_body(trA, fresh, opts),
                              Value::pair(make_list(vals, Type::list(trA)),
                                          make_list({}, Type::list(pidTy))));
        out.leaves.push_back(Leaf::actor(l.name, call, {}));
        break;
      }
      case LeafKind::Thread: {
        std::string a = fresh.next();
        if (opts.sync) {
          out.binders.push_back({a, Type::unit(), Type::unit()});
        } else {
          out.binders.push_back({a, tr.types.tC, nullptr});
        }
        out.leaves.push_back(Leaf::actor(a, tr.term(g, l.term), {}));
        break;
      }
      case LeafKind::Actor:
        throw TranslateError("actor leaf in a channel configuration");
    }
  }
  return out;
}

}  // namespace mm
