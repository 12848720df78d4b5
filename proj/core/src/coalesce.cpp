#include <algorithm>
#include <set>

#include "mm/ops.hpp"
#include "mm/translate.hpp"

namespace mm {

std::string TokenEnv::token_for(const TypePtr& carried) const {
  if (carried->kind == TypeKind::Chan) return chan_label;
  for (const auto& [t, tok] : tokens) {
    if (types_equal(t, carried)) return tok;
  }
  throw TranslateError("no token for carried type " + print_type(carried));
}

namespace {

void collect_mu_vars(const TypePtr& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == TypeKind::Mu) out.insert(t->var);
  if (t->kind == TypeKind::Var) out.insert(t->var);
  collect_mu_vars(t->arg, out);
  collect_mu_vars(t->ret, out);
  if (t->eff) {
    collect_mu_vars(t->eff->mailbox, out);
    collect_mu_vars(t->eff->result, out);
  }
  collect_mu_vars(t->carried, out);
  collect_mu_vars(t->result, out);
  collect_mu_vars(t->left, out);
  collect_mu_vars(t->right, out);
  collect_mu_vars(t->body, out);
  for (const auto& [l, lt] : t->labels) collect_mu_vars(lt, out);
}

struct BaseTypes {
  std::vector<TypePtr> types;  // deduplicated, insertion order
  std::set<std::string> seen;  // canonical keys
  std::set<std::string> mu_vars;

  void add_carried(const TypePtr& t) {
    if (t->kind != TypeKind::Chan) {
      auto key = canonical_type(t);
      if (seen.insert(key).second) types.push_back(t);
    }
  }
  void scan(const TypePtr& t) {
    if (!t) return;
    collect_mu_vars(t, mu_vars);
    if (t->kind == TypeKind::Chan) add_carried(t->carried);
    scan(t->arg);
    scan(t->ret);
    if (t->eff) {
      scan(t->eff->mailbox);
      scan(t->eff->result);
    }
    scan(t->carried);
    scan(t->result);
    scan(t->left);
    scan(t->right);
    scan(t->body);
    for (const auto& [l, lt] : t->labels) scan(lt);
  }
  void scan_value(const ValuePtr& v) {
    if (!v) return;
    scan(v->ty);
    scan(v->ret);
    if (v->eff) {
      scan(v->eff->mailbox);
      scan(v->eff->result);
    }
    scan_value(v->v1);
    scan_value(v->v2);
    scan_comp(v->body);
  }
  void scan_comp(const CompPtr& m) {
    if (!m) return;
    if (m->kind == CompKind::NewCh && m->ann) {
      scan(Type::chan(m->ann));  // the annotation is the carried type itself
    } else {
      scan(m->ann);
    }
    scan(m->ann2);
    scan_value(m->v1);
    scan_value(m->v2);
    scan_comp(m->m1);
    scan_comp(m->m2);
    scan_comp(m->nil_body);
    scan_comp(m->cons_body);
    for (const auto& arm : m->arms) scan_comp(arm.body);
    for (const auto& arm : m->rarms) {
      scan_comp(arm.guard);
      scan_comp(arm.body);
    }
  }
};

struct Coalescer {
  TokenEnv env;
  Extensions exts;
  Checker checker;
  FreshNames* fresh;
  std::string muvar;

  Coalescer(Extensions e, FreshNames& f) : exts(e), checker(Calc::Ch, e), fresh(&f) {}

  void build(BaseTypes& collected) {
    std::sort(collected.types.begin(), collected.types.end(),
              [](const TypePtr& a, const TypePtr& b) {
                return canonical_type(a) < canonical_type(b);
              });
    for (std::size_t i = 0; i < collected.types.size(); i++) {
      env.tokens.emplace_back(collected.types[i], "t" + std::to_string(i));
    }
    muvar = "X";
    while (collected.mu_vars.count(muvar)) muvar += "'";
    std::vector<std::pair<std::string, TypePtr>> labels;
    labels.emplace_back(env.chan_label, Type::chan(Type::tvar(muvar)));
    for (const auto& [t, tok] : env.tokens) labels.emplace_back(tok, floor_type(t));
    env.coalesced = Type::mu(muvar, Type::variant(std::move(labels)));
  }

  // the inner map: every channel points back at the coalesced type itself
  TypePtr floor_type(const TypePtr& t) {
    switch (t->kind) {
      case TypeKind::Unit:
      case TypeKind::Int:
      case TypeKind::Var:
        return t;
      case TypeKind::Chan:
        return Type::chan(Type::tvar(muvar));
      case TypeKind::Fun:
        return Type::fun(floor_type(t->arg), floor_type(t->ret));
      case TypeKind::Prod:
        return Type::prod(floor_type(t->left), floor_type(t->right));
      case TypeKind::Sum:
        return Type::sum(floor_type(t->left), floor_type(t->right));
      case TypeKind::Variant: {
        std::vector<std::pair<std::string, TypePtr>> ls;
        for (const auto& [l, lt] : t->labels) ls.emplace_back(l, floor_type(lt));
        return Type::variant(std::move(ls));
      }
      case TypeKind::Mu:
        return Type::mu(t->var, floor_type(t->body));
      case TypeKind::Actor:
      case TypeKind::Actor2:
        throw TranslateError("actor type in a channel-calculus program");
    }
    throw TranslateError("unreachable type kind");
  }

  TypePtr co_type(const TypePtr& t) {
    switch (t->kind) {
      case TypeKind::Unit:
      case TypeKind::Int:
      case TypeKind::Var:
        return t;
      case TypeKind::Chan:
        return Type::chan(env.coalesced);
      case TypeKind::Fun:
        return Type::fun(co_type(t->arg), co_type(t->ret));
      case TypeKind::Prod:
        return Type::prod(co_type(t->left), co_type(t->right));
      case TypeKind::Sum:
        return Type::sum(co_type(t->left), co_type(t->right));
      case TypeKind::Variant: {
        std::vector<std::pair<std::string, TypePtr>> ls;
        for (const auto& [l, lt] : t->labels) ls.emplace_back(l, co_type(lt));
        return Type::variant(std::move(ls));
      }
      case TypeKind::Mu:
        return Type::mu(t->var, co_type(t->body));
      case TypeKind::Actor:
      case TypeKind::Actor2:
        throw TranslateError("actor type in a channel-calculus program");
    }
    throw TranslateError("unreachable type kind");
  }

  ValuePtr wrap(const TypePtr& carried_orig, ValuePtr coalesced_value) {
    auto tok = env.token_for(carried_orig);
    // ascribed so the wrapped payload stays inferable after a take moves it
    // into the receiving term
    return Value::ascribe(Value::roll(Value::variant(tok, std::move(coalesced_value))),
                          env.coalesced);
  }

  CompPtr unwrap_take(CompPtr taken, const std::string& tok) {
    auto x = fresh->next();
    auto y = fresh->next();
    auto z = fresh->next();
    std::vector<VariantArm> arms;
    const auto& variant = env.coalesced->body;
    for (const auto& [l, lt] : variant->labels) {
      (void)lt;
      if (l == tok) {
        arms.push_back({l, z, Comp::ret(Value::mkvar(z))});
      } else {
        arms.push_back({l, z, Comp::ret(Value::error())});
      }
    }
    return Comp::let(x, std::move(taken),
                     Comp::let(y, Comp::unroll(Value::mkvar(x)),
                               Comp::casevariant(Value::mkvar(y), std::move(arms))));
  }

  ValuePtr co_value(const TypeEnv& g, const ValuePtr& v) {
    switch (v->kind) {
      case ValKind::Var:
      case ValKind::Name:
      case ValKind::Unit:
      case ValKind::Int:
      case ValKind::Error:
        return v;
      case ValKind::Lam: {
        TypeEnv inner = g;
        inner.bind_var(v->var, v->ty);
        return Value::lam(v->var, co_type(v->ty), co_comp(inner, v->body));
      }
      case ValKind::Rec: {
        TypeEnv inner = g;
        inner.bind_var(v->fname, Type::fun(v->ty, v->ret));
        inner.bind_var(v->var, v->ty);
        return Value::rec(v->fname, v->var, co_type(v->ty), co_type(v->ret),
                          co_comp(inner, v->body));
      }
      case ValKind::Pair:
        return Value::pair(co_value(g, v->v1), co_value(g, v->v2));
      case ValKind::Inl:
        return Value::inl(co_value(g, v->v1));
      case ValKind::Inr:
        return Value::inr(co_value(g, v->v1));
      case ValKind::Variant:
        return Value::variant(v->label, co_value(g, v->v1));
      case ValKind::Roll:
        return Value::roll(co_value(g, v->v1));
      case ValKind::Ascribe:
        return Value::ascribe(co_value(g, v->v1), co_type(v->ty));
      case ValKind::Nil:
      case ValKind::Cons:
      case ValKind::BoolLit:
        throw TranslateError("surface form in coalescing input; desugar first");
    }
    throw TranslateError("unreachable value kind");
  }

  CompPtr co_comp(const TypeEnv& g, const CompPtr& m) {
    switch (m->kind) {
      case CompKind::Give: {
        auto ct = checker.synth_value(g, m->v2);
        if (ct->kind != TypeKind::Chan) throw TranslateError("give to a non-channel");
        return Comp::give(wrap(ct->carried, co_value(g, m->v1)), co_value(g, m->v2));
      }
      case CompKind::Take: {
        auto ct = checker.synth_value(g, m->v1);
        if (ct->kind != TypeKind::Chan) throw TranslateError("take from a non-channel");
        return unwrap_take(Comp::take(co_value(g, m->v1)), env.token_for(ct->carried));
      }
      case CompKind::NewCh:
        return Comp::newch(env.coalesced);
      case CompKind::Fork:
        return Comp::fork(co_comp(g, m->m1));
      case CompKind::Choose:
        throw TranslateError("input-guarded choice is not supported by coalescing");
      case CompKind::Let: {
        auto a = checker.synth_comp(g, nullptr, m->m1);
        TypeEnv inner = g;
        inner.bind_var(m->var, a);
        return Comp::let(m->var, co_comp(g, m->m1), co_comp(inner, m->m2));
      }
      case CompKind::App:
        return Comp::app(co_value(g, m->v1), co_value(g, m->v2));
      case CompKind::Return:
        return Comp::ret(co_value(g, m->v1));
      case CompKind::LetPair: {
        auto p = checker.synth_value(g, m->v1);
        if (p->kind != TypeKind::Prod) throw TranslateError("pair let on a non-product");
        TypeEnv inner = g;
        inner.bind_var(m->var, p->left);
        inner.bind_var(m->var2, p->right);
        return Comp::letpair(m->var, m->var2, co_value(g, m->v1), co_comp(inner, m->m1));
      }
      case CompKind::CaseSum: {
        auto s = checker.synth_value(g, m->v1);
        if (s->kind != TypeKind::Sum) throw TranslateError("case on a non-sum");
        TypeEnv le = g, re = g;
        le.bind_var(m->var, s->left);
        re.bind_var(m->var2, s->right);
        return Comp::casesum(co_value(g, m->v1), m->var, co_comp(le, m->m1), m->var2,
                             co_comp(re, m->m2));
      }
      case CompKind::CaseVariant: {
        auto s = checker.synth_value(g, m->v1);
        if (s->kind != TypeKind::Variant) throw TranslateError("case on a non-variant");
        std::vector<VariantArm> arms;
        for (const auto& arm : m->arms) {
          const TypePtr* lt = nullptr;
          for (const auto& [l, t] : s->labels)
            if (l == arm.label) lt = &t;
          if (!lt) throw TranslateError("case arm label not in scrutinee type");
          TypeEnv inner = g;
          inner.bind_var(arm.var, *lt);
          arms.push_back({arm.label, arm.var, co_comp(inner, arm.body)});
        }
        return Comp::casevariant(co_value(g, m->v1), std::move(arms));
      }
      case CompKind::Unroll:
        return Comp::unroll(co_value(g, m->v1));
      case CompKind::Neg:
        return Comp::neg(co_value(g, m->v1));
      case CompKind::Add:
        return Comp::add(co_value(g, m->v1), co_value(g, m->v2));
      case CompKind::Gt:
        return Comp::gt(co_value(g, m->v1), co_value(g, m->v2));
      case CompKind::Concat:
        return Comp::concat(co_value(g, m->v1), co_value(g, m->v2));
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
        throw TranslateError("surface form in coalescing input; desugar first");
    }
    throw TranslateError("unreachable computation kind");
  }
};

}  // namespace

CoalescedConfig coalesce_config(const Config& cfg, const Extensions& exts, FreshNames& fresh) {
  if (cfg.calc != Calc::Ch) throw TranslateError("coalescing expects a channel configuration");
  typecheck_config(cfg, exts);
  Coalescer co(exts, fresh);
  BaseTypes bt;
  for (const auto& b : cfg.binders) bt.scan(Type::chan(b.carried));
  for (const auto& l : cfg.leaves) {
    bt.scan_comp(l.term);
    for (const auto& v : l.queue) bt.scan_value(v);
  }
  co.build(bt);

  TypeEnv g;
  for (const auto& b : cfg.binders) {
    g.bind_name(b.name, Type::chan(b.carried));
    co.env.original_type[b.name] = b.carried;
  }

  CoalescedConfig out;
  out.config.calc = Calc::Ch;
  for (const auto& b : cfg.binders) out.config.binders.push_back({b.name, co.env.coalesced, nullptr});
  for (const auto& l : cfg.leaves) {
    if (l.kind == LeafKind::Thread) {
      out.config.leaves.push_back(Leaf::thread(co.co_comp(g, l.term)));
    } else {
      const Binder* binder = nullptr;
      for (const auto& b : cfg.binders)
        if (b.name == l.name) binder = &b;
      if (!binder) throw TranslateError("buffer for unrestricted name '" + l.name + "'");
      std::vector<ValuePtr> values;
      for (const auto& v : l.queue) values.push_back(co.wrap(binder->carried, co.co_value(g, v)));
      out.config.leaves.push_back(Leaf::buffer(l.name, std::move(values)));
    }
  }
  out.env = std::move(co.env);
  return out;
}

CoalescedTerm coalesce_term(const CompPtr& m, const Extensions& exts, FreshNames& fresh) {
  TypeEnv empty;
  Checker(Calc::Ch, exts).synth_comp(empty, nullptr, m);  // validate
  Coalescer co(exts, fresh);
  BaseTypes bt;
  bt.scan_comp(m);
  co.build(bt);
  CoalescedTerm out;
  out.term = co.co_comp(empty, m);
  out.env = std::move(co.env);
  return out;
}

bool error_in_eval_position(const Config& cfg) {
  auto is_err = [](const ValuePtr& v) {
    return v && strip_ascribe(v)->kind == ValKind::Error;
  };
  for (const auto& leaf : cfg.leaves) {
    if (!leaf.term) continue;
    auto dec = decompose(leaf.term);
    const auto& head = dec.head;
    if (head->kind == CompKind::Return && is_err(head->v1)) return true;
    if (is_err(head->v1) || is_err(head->v2)) return true;
  }
  return false;
}

}  // namespace mm
