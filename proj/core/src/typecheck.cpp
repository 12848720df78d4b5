#include "mm/typecheck.hpp"

#include <functional>

#include "mm/ops.hpp"

namespace mm {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw TypeError(msg); }

[[noreturn]] void fail_at(const std::string& msg, const CompPtr& m) {
  throw TypeError(msg + " in: " + print_comp(m));
}

bool effects_match(const Effect& a, const Effect& b) {
  if (!types_equal(a.mailbox, b.mailbox)) return false;
  if ((a.result == nullptr) != (b.result == nullptr)) return false;
  return !a.result || types_equal(a.result, b.result);
}

bool is_return_error(const CompPtr& m) {
  return m->kind == CompKind::Return && strip_ascribe(m->v1)->kind == ValKind::Error;
}

}  // namespace

TypePtr Checker::synth_value(const TypeEnv& env, const ValuePtr& v) const {
  switch (v->kind) {
    case ValKind::Var: {
      if (const auto* t = env.lookup_var(v->name)) return *t;
      fail("unbound variable '" + v->name + "'");
    }
    case ValKind::Name: {
      if (const auto* t = env.lookup_name(v->name)) return *t;
      fail("unbound name '" + v->name + "'");
    }
    case ValKind::Unit:
      return Type::unit();
    case ValKind::Int:
      return Type::integer();
    case ValKind::Pair:
      return Type::prod(synth_value(env, v->v1), synth_value(env, v->v2));
    case ValKind::Ascribe:
      check_value(env, v->v1, v->ty);
      return v->ty;
    case ValKind::Lam: {
      if (calc_ == Calc::Ch && v->eff) fail("channel-calculus function carries an effect");
      if (calc_ == Calc::Act && !v->eff) fail("actor-calculus function lacks an effect annotation");
      if (calc_ == Calc::Act) {
        if (exts_.sync && !v->eff->result) fail("sync mode requires paired effect annotations");
        if (!exts_.sync && v->eff->result) fail("paired effect annotation outside sync mode");
      }
      TypeEnv inner = env;
      inner.bind_var(v->var, v->ty);
      auto body = synth_comp(inner, v->eff ? &*v->eff : nullptr, v->body);
      return v->eff ? Type::fun(v->ty, *v->eff, body) : Type::fun(v->ty, body);
    }
    case ValKind::Rec: {
      if (calc_ == Calc::Ch && v->eff) fail("channel-calculus function carries an effect");
      if (calc_ == Calc::Act && !v->eff) fail("actor-calculus function lacks an effect annotation");
      auto fnty = v->eff ? Type::fun(v->ty, *v->eff, v->ret) : Type::fun(v->ty, v->ret);
      TypeEnv inner = env;
      inner.bind_var(v->fname, fnty);
      inner.bind_var(v->var, v->ty);
      auto body = synth_comp(inner, v->eff ? &*v->eff : nullptr, v->body);
      if (!types_equal(body, v->ret))
        fail("recursive function body has type " + print_type(body) + ", declared " +
             print_type(v->ret));
      return fnty;
    }
    case ValKind::Inl:
    case ValKind::Inr:
      fail("cannot infer a sum type for an injection; ascribe it");
    case ValKind::Variant:
      fail("cannot infer a variant type for <" + v->label + " = ...>; ascribe it");
    case ValKind::Roll:
      fail("cannot infer a recursive type for roll; ascribe it");
    case ValKind::Error:
      fail("the error constant has no inferable type");
    case ValKind::Nil:
    case ValKind::Cons:
    case ValKind::BoolLit:
      fail("surface form reached the checker; desugar first");
  }
  fail("unreachable value kind");
}

void Checker::check_value(const TypeEnv& env, const ValuePtr& v, const TypePtr& expected) const {
  switch (v->kind) {
    case ValKind::Ascribe: {
      if (!types_equal(v->ty, expected))
        fail("ascription " + print_type(v->ty) + " does not match expected " +
             print_type(expected));
      check_value(env, v->v1, v->ty);
      return;
    }
    case ValKind::Error:
      return;  // checks at any type
    case ValKind::Inl: {
      if (expected->kind != TypeKind::Sum)
        fail("inl checked against non-sum type " + print_type(expected));
      check_value(env, v->v1, expected->left);
      return;
    }
    case ValKind::Inr: {
      if (expected->kind != TypeKind::Sum)
        fail("inr checked against non-sum type " + print_type(expected));
      check_value(env, v->v1, expected->right);
      return;
    }
    case ValKind::Pair: {
      if (expected->kind != TypeKind::Prod)
        fail("pair checked against non-product type " + print_type(expected));
      check_value(env, v->v1, expected->left);
      check_value(env, v->v2, expected->right);
      return;
    }
    case ValKind::Variant: {
      if (expected->kind != TypeKind::Variant)
        fail("variant value checked against non-variant type " + print_type(expected));
      for (const auto& [l, lt] : expected->labels) {
        if (l == v->label) {
          check_value(env, v->v1, lt);
          return;
        }
      }
      fail("label '" + v->label + "' not in variant type " + print_type(expected));
    }
    case ValKind::Roll: {
      if (expected->kind != TypeKind::Mu)
        fail("roll checked against non-recursive type " + print_type(expected));
      check_value(env, v->v1, subst_type(expected->body, expected->var, expected));
      return;
    }
    case ValKind::Lam: {
      if (expected->kind != TypeKind::Fun)
        fail("function checked against non-function type " + print_type(expected));
      if (!types_equal(v->ty, expected->arg))
        fail("parameter annotated " + print_type(v->ty) + ", expected " +
             print_type(expected->arg));
      break;  // fall through to synthesis for the rest
    }
    default:
      break;
  }
  auto got = synth_value(env, v);
  if (!types_equal(got, expected))
    fail("value has type " + print_type(got) + ", expected " + print_type(expected) + ": " +
         print_value(v));
}

namespace {

// Joins case-arm types; arms that merely signal the coalescing error are
// transparent to the join.
TypePtr join_arms(const std::vector<std::pair<CompPtr, TypePtr>>& arms) {
  TypePtr out;
  for (const auto& [body, t] : arms) {
    if (is_return_error(body)) continue;
    if (!out) {
      out = t;
    } else if (!types_equal(out, t)) {
      fail("case branches disagree: " + print_type(out) + " vs " + print_type(t));
    }
  }
  if (!out) fail("cannot infer a type for a case whose arms are all error");
  return out;
}

}  // namespace

TypePtr Checker::synth_comp(const TypeEnv& env, const Effect* amb, const CompPtr& m) const {
  auto need_amb = [&]() -> const Effect& {
    if (calc_ != Calc::Act || !amb) fail_at("mailbox-sensitive primitive outside the actor calculus", m);
    return *amb;
  };
  switch (m->kind) {
    case CompKind::App: {
      auto fty = synth_value(env, m->v1);
      if (fty->kind != TypeKind::Fun)
        fail_at("application of non-function of type " + print_type(fty), m);
      if (calc_ == Calc::Act) {
        if (!fty->eff) fail_at("unannotated arrow applied in the actor calculus", m);
        if (!amb || !effects_match(*fty->eff, *amb))
          fail_at("arrow effect does not match the ambient mailbox", m);
      } else if (fty->eff) {
        fail_at("effect-annotated arrow applied in the channel calculus", m);
      }
      check_value(env, m->v2, fty->arg);
      return fty->ret;
    }
    case CompKind::Let: {
      auto a = synth_comp(env, amb, m->m1);
      TypeEnv inner = env;
      inner.bind_var(m->var, a);
      return synth_comp(inner, amb, m->m2);
    }
    case CompKind::Return:
      return synth_value(env, m->v1);
    case CompKind::LetPair: {
      auto p = synth_value(env, m->v1);
      if (p->kind != TypeKind::Prod) fail_at("pair let on non-product " + print_type(p), m);
      TypeEnv inner = env;
      inner.bind_var(m->var, p->left);
      inner.bind_var(m->var2, p->right);
      return synth_comp(inner, amb, m->m1);
    }
    case CompKind::CaseSum: {
      auto s = synth_value(env, m->v1);
      if (s->kind != TypeKind::Sum) fail_at("case on non-sum " + print_type(s), m);
      TypeEnv le = env;
      le.bind_var(m->var, s->left);
      TypeEnv re = env;
      re.bind_var(m->var2, s->right);
      std::vector<std::pair<CompPtr, TypePtr>> arms;
      arms.emplace_back(m->m1, is_return_error(m->m1) ? nullptr : synth_comp(le, amb, m->m1));
      arms.emplace_back(m->m2, is_return_error(m->m2) ? nullptr : synth_comp(re, amb, m->m2));
      return join_arms(arms);
    }
    case CompKind::CaseVariant: {
      auto s = synth_value(env, m->v1);
      if (s->kind != TypeKind::Variant) fail_at("case on non-variant " + print_type(s), m);
      if (m->arms.size() != s->labels.size())
        fail_at("case arms do not cover the variant exactly", m);
      std::vector<std::pair<CompPtr, TypePtr>> arms;
      for (const auto& arm : m->arms) {
        const TypePtr* lt = nullptr;
        for (const auto& [l, t] : s->labels)
          if (l == arm.label) lt = &t;
        if (!lt) fail_at("case arm for label '" + arm.label + "' not in scrutinee type", m);
        for (const auto& other : m->arms)
          if (&other != &arm && other.label == arm.label)
            fail_at("duplicate case arm for label '" + arm.label + "'", m);
        TypeEnv inner = env;
        inner.bind_var(arm.var, *lt);
        arms.emplace_back(arm.body,
                          is_return_error(arm.body) ? nullptr : synth_comp(inner, amb, arm.body));
      }
      return join_arms(arms);
    }
    case CompKind::Unroll: {
      auto t = synth_value(env, m->v1);
      if (t->kind != TypeKind::Mu) fail_at("unroll of non-recursive type " + print_type(t), m);
      return subst_type(t->body, t->var, t);
    }
    case CompKind::Give: {
      if (calc_ != Calc::Ch) fail_at("give outside the channel calculus", m);
      auto ct = synth_value(env, m->v2);
      if (ct->kind != TypeKind::Chan)
        fail_at("give to a non-channel of type " + print_type(ct), m);
      check_value(env, m->v1, ct->carried);
      return Type::unit();
    }
    case CompKind::Take: {
      if (calc_ != Calc::Ch) fail_at("take outside the channel calculus", m);
      auto ct = synth_value(env, m->v1);
      if (ct->kind != TypeKind::Chan)
        fail_at("take from a non-channel of type " + print_type(ct), m);
      return ct->carried;
    }
    case CompKind::Fork: {
      if (calc_ != Calc::Ch) fail_at("fork outside the channel calculus", m);
      auto t = synth_comp(env, nullptr, m->m1);
      if (t->kind != TypeKind::Unit) fail_at("forked process must have unit type", m);
      return Type::unit();
    }
    case CompKind::NewCh:
      if (calc_ != Calc::Ch) fail_at("newCh outside the channel calculus", m);
      if (!m->ann) fail_at("newCh lacks its carried-type annotation", m);
      return Type::chan(m->ann);
    case CompKind::Choose: {
      if (calc_ != Calc::Ch || !exts_.choice) fail_at("choose requires the choice extension", m);
      auto a = synth_value(env, m->v1);
      auto b = synth_value(env, m->v2);
      if (a->kind != TypeKind::Chan || b->kind != TypeKind::Chan)
        fail_at("choose on non-channels", m);
      return Type::sum(a->carried, b->carried);
    }
    case CompKind::Spawn: {
      if (calc_ != Calc::Act) fail_at("spawn outside the actor calculus", m);
      if (!m->ann) fail_at("spawn lacks its mailbox annotation", m);
      if (exts_.sync) {
        if (!m->ann2) fail_at("sync mode spawn needs a result annotation", m);
        Effect child{m->ann, m->ann2};
        auto t = synth_comp(env, &child, m->m1);
        if (!types_equal(t, m->ann2))
          fail_at("spawned body has type " + print_type(t) + ", declared " + print_type(m->ann2),
                  m);
        return Type::actor2(m->ann, m->ann2);
      }
      if (m->ann2) fail_at("result annotation on spawn outside sync mode", m);
      Effect child{m->ann, nullptr};
      auto t = synth_comp(env, &child, m->m1);
      if (t->kind != TypeKind::Unit) fail_at("spawned body must have unit type", m);
      return Type::actor(m->ann);
    }
    case CompKind::Send: {
      if (calc_ != Calc::Act) fail_at("send outside the actor calculus", m);
      auto at = synth_value(env, m->v2);
      if (exts_.sync ? at->kind != TypeKind::Actor2 : at->kind != TypeKind::Actor)
        fail_at("send to a non-actor of type " + print_type(at), m);
      check_value(env, m->v1, at->carried);
      return Type::unit();
    }
    case CompKind::Receive:
      return need_amb().mailbox;
    case CompKind::SelfPid: {
      const auto& e = need_amb();
      return exts_.sync ? Type::actor2(e.mailbox, e.result) : Type::actor(e.mailbox);
    }
    case CompKind::Wait: {
      if (calc_ != Calc::Act || !exts_.sync) fail_at("wait requires sync mode", m);
      auto t = synth_value(env, m->v1);
      if (t->kind != TypeKind::Actor2) fail_at("wait on a non-actor of type " + print_type(t), m);
      return t->result;
    }
    case CompKind::SelRecv: {
      if (calc_ != Calc::Act || !exts_.selrecv)
        fail_at("selective receive requires the selrecv extension", m);
      const auto& e = need_amb();
      if (e.mailbox->kind != TypeKind::Variant)
        fail_at("selective receive needs a variant mailbox type, got " + print_type(e.mailbox), m);
      if (m->rarms.empty()) fail_at("selective receive with no clauses", m);
      std::vector<std::pair<CompPtr, TypePtr>> arms;
      for (const auto& arm : m->rarms) {
        const TypePtr* lt = nullptr;
        for (const auto& [l, t] : e.mailbox->labels)
          if (l == arm.label) lt = &t;
        if (!lt)
          fail_at("receive clause label '" + arm.label + "' not in the mailbox type", m);
        if (!is_pure(arm.guard))
          fail_at("receive guard performs communication or concurrency", m);
        TypeEnv inner = env;
        inner.bind_var(arm.var, *lt);
        auto gt = synth_comp(inner, amb, arm.guard);
        if (!types_equal(gt, Type::boolean()))
          fail_at("receive guard has type " + print_type(gt) + ", expected Bool", m);
        arms.emplace_back(arm.body, synth_comp(inner, amb, arm.body));
      }
      return join_arms(arms);
    }
    case CompKind::Neg: {
      check_value(env, m->v1, Type::integer());
      return Type::integer();
    }
    case CompKind::Add: {
      check_value(env, m->v1, Type::integer());
      check_value(env, m->v2, Type::integer());
      return Type::integer();
    }
    case CompKind::Gt: {
      check_value(env, m->v1, Type::integer());
      check_value(env, m->v2, Type::integer());
      return Type::boolean();
    }
    case CompKind::Concat: {
      auto a = synth_value(env, m->v1);
      auto b = synth_value(env, m->v2);
      if (!list_elem_type(a) || !list_elem_type(b)) fail_at("concat of non-lists", m);
      if (!types_equal(a, b)) fail_at("concat of lists at different types", m);
      return a;
    }
    case CompKind::Seq:
    case CompKind::CaseList:
    case CompKind::LetVal:
    case CompKind::If:
      fail_at("surface form reached the checker; desugar first", m);
  }
  fail_at("unreachable computation kind", m);
}

TypePtr typecheck_term_ch(const TypeEnv& env, const CompPtr& m, const Extensions& exts) {
  return Checker(Calc::Ch, exts).synth_comp(env, nullptr, m);
}

TypePtr typecheck_term_act(const TypeEnv& env, const Effect& mailbox, const CompPtr& m,
                           const Extensions& exts) {
  return Checker(Calc::Act, exts).synth_comp(env, &mailbox, m);
}

void typecheck_config(const Config& cfg, const Extensions& exts, const ConfigCheckOptions& opts) {
  Checker chk(cfg.calc, exts);
  TypeEnv env = opts.outer_env;
  std::map<std::string, Binder> linear = opts.outer_linear;
  for (const auto& b : cfg.binders) {
    if (linear.count(b.name)) fail("duplicate restriction for name '" + b.name + "'");
    if (cfg.calc == Calc::Ch) {
      env.bind_name(b.name, Type::chan(b.carried));
    } else {
      env.bind_name(b.name, b.result ? Type::actor2(b.carried, b.result)
                                     : Type::actor(b.carried));
      if (exts.sync && !b.result) fail("sync-mode actor '" + b.name + "' lacks a result type");
    }
    linear[b.name] = b;
  }

  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < cfg.leaves.size(); i++) {
    const auto& leaf = cfg.leaves[i];
    auto where = [&](const std::string& msg) {
      return "leaf " + std::to_string(i) + ": " + msg;
    };
    switch (leaf.kind) {
      case LeafKind::Buffer: {
        if (cfg.calc != Calc::Ch) fail(where("buffer in an actor configuration"));
        auto it = linear.find(leaf.name);
        if (it == linear.end()) fail(where("buffer for unrestricted name '" + leaf.name + "'"));
        if (++seen[leaf.name] > 1)
          fail(where("linearity violation: two buffers for '" + leaf.name + "'"));
        for (const auto& v : leaf.queue) chk.check_value(env, v, it->second.carried);
        break;
      }
      case LeafKind::Thread: {
        if (cfg.calc != Calc::Ch) fail(where("bare term in an actor configuration"));
        auto t = chk.synth_comp(env, nullptr, leaf.term);
        if (t->kind != TypeKind::Unit)
          fail(where("thread has type " + print_type(t) + ", not unit"));
        break;
      }
      case LeafKind::Actor: {
        if (cfg.calc != Calc::Act) fail(where("actor leaf in a channel configuration"));
        auto it = linear.find(leaf.name);
        if (it == linear.end()) fail(where("actor for unrestricted name '" + leaf.name + "'"));
        if (++seen[leaf.name] > 1)
          fail(where("linearity violation: two actors named '" + leaf.name + "'"));
        for (const auto& v : leaf.queue) chk.check_value(env, v, it->second.carried);
        Effect amb{it->second.carried, it->second.result};
        auto t = chk.synth_comp(env, &amb, leaf.term);
        if (exts.sync) {
          if (!types_equal(t, it->second.result))
            fail(where("actor body has type " + print_type(t) + ", declared result " +
                       print_type(it->second.result)));
        } else if (t->kind != TypeKind::Unit) {
          fail(where("actor body has type " + print_type(t) + ", not unit"));
        }
        break;
      }
    }
  }
  for (const auto& [name, b] : linear) {
    (void)b;
    if (!seen.count(name))
      fail("restricted name '" + name + "' has no " +
           (cfg.calc == Calc::Ch ? std::string("buffer") : std::string("actor")));
  }
}

}  // namespace mm
