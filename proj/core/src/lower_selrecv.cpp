#include <algorithm>

#include "mm/ops.hpp"
#include "mm/translate.hpp"

namespace mm {

TypePtr lower_type(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::Unit:
    case TypeKind::Int:
    case TypeKind::Var:
      return t;
    case TypeKind::Actor:
      return Type::actor(lower_type(t->carried));
    case TypeKind::Actor2:
      throw TranslateError("sync actors are not lowered");
    case TypeKind::Chan:
      throw TranslateError("channel type in an actor-calculus program");
    case TypeKind::Fun: {
      if (!t->eff) throw TranslateError("unannotated arrow in an actor-calculus type");
      if (t->eff->result) throw TranslateError("sync arrows are not lowered");
      auto c = lower_type(t->eff->mailbox);
      Effect e{c, nullptr};
      auto inner = Type::fun(Type::list(c), e, Type::prod(lower_type(t->ret), Type::list(c)));
      return Type::fun(lower_type(t->arg), e, inner);
    }
    case TypeKind::Prod:
      return Type::prod(lower_type(t->left), lower_type(t->right));
    case TypeKind::Sum:
      return Type::sum(lower_type(t->left), lower_type(t->right));
    case TypeKind::Variant: {
      std::vector<std::pair<std::string, TypePtr>> ls;
      for (const auto& [l, lt] : t->labels) ls.emplace_back(l, lower_type(lt));
      return Type::variant(std::move(ls));
    }
    case TypeKind::Mu:
      return Type::mu(t->var, lower_type(t->body));
  }
  throw TranslateError("unreachable type kind");
}

namespace {

struct Lowerer {
  FreshNames* fresh;
  Checker checker;

  explicit Lowerer(FreshNames& f) : fresh(&f), checker(Calc::Act, Extensions{false, false, true}) {}

  ValuePtr value(const TypeEnv& g, const ValuePtr& v) {
    switch (v->kind) {
      case ValKind::Var:
      case ValKind::Name:
      case ValKind::Unit:
      case ValKind::Int:
      case ValKind::Error:
        return v;
      case ValKind::Lam: {
        if (!v->eff) throw TranslateError("unannotated function in an actor-calculus program");
        auto c = v->eff->mailbox;
        auto lc = lower_type(c);
        Effect e{lc, nullptr};
        auto mb = fresh->next();
        TypeEnv inner = g;
        inner.bind_var(v->var, v->ty);
        auto lowered = term(inner, v->body, Value::mkvar(mb), c);
        return Value::lam(v->var, lower_type(v->ty), e,
                          Comp::ret(Value::lam(mb, Type::list(lc), e, lowered)));
      }
      case ValKind::Rec: {
        if (!v->eff) throw TranslateError("unannotated function in an actor-calculus program");
        auto c = v->eff->mailbox;
        auto lc = lower_type(c);
        Effect e{lc, nullptr};
        auto mb = fresh->next();
        TypeEnv inner = g;
        inner.bind_var(v->fname, Type::fun(v->ty, *v->eff, v->ret));
        inner.bind_var(v->var, v->ty);
        auto lowered = term(inner, v->body, Value::mkvar(mb), c);
        auto innerTy = Type::fun(Type::list(lc), e, Type::prod(lower_type(v->ret), Type::list(lc)));
        return Value::rec(v->fname, v->var, lower_type(v->ty), innerTy, e,
                          Comp::ret(Value::lam(mb, Type::list(lc), e, lowered)));
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
        return Value::ascribe(value(g, v->v1), lower_type(v->ty));
      case ValKind::Nil:
      case ValKind::Cons:
      case ValKind::BoolLit:
        throw TranslateError("surface form in lowering input; desugar first");
    }
    throw TranslateError("unreachable value kind");
  }

  // pairs the result of a primitive with the unchanged save queue
  CompPtr paired(CompPtr m, const ValuePtr& mb) {
    auto x = fresh->next();
    return Comp::let(x, std::move(m), Comp::ret(Value::pair(Value::mkvar(x), mb)));
  }

  CompPtr term(const TypeEnv& g, const CompPtr& m, const ValuePtr& mb, const TypePtr& mailbox) {
    Effect amb{mailbox, nullptr};
    switch (m->kind) {
      case CompKind::App: {
        auto f = fresh->next();
        return Comp::let(f, Comp::app(value(g, m->v1), value(g, m->v2)),
                         Comp::app(Value::mkvar(f), mb));
      }
      case CompKind::Return:
        return Comp::ret(Value::pair(value(g, m->v1), mb));
      case CompKind::Let: {
        auto a = checker.synth_comp(g, &amb, m->m1);
        TypeEnv inner = g;
        inner.bind_var(m->var, a);
        auto rp = fresh->next();
        auto mb2 = fresh->next();
        return Comp::let(rp, term(g, m->m1, mb, mailbox),
                         Comp::letpair(m->var, mb2, Value::mkvar(rp),
                                       term(inner, m->m2, Value::mkvar(mb2), mailbox)));
      }
      case CompKind::SelfPid: {
        auto sp = fresh->next();
        return Comp::let(sp, Comp::self(), Comp::ret(Value::pair(Value::mkvar(sp), mb)));
      }
      case CompKind::Send:
        return paired(Comp::send(value(g, m->v1), value(g, m->v2)), mb);
      case CompKind::Spawn: {
        if (m->ann2) throw TranslateError("sync spawn is not lowered");
        auto childMb = lower_type(m->ann);
        auto child = term(g, m->m1, make_list({}, Type::list(childMb)), m->ann);
        // the spawned body returns a (unit, queue) pair; discard it to fit
        // the unit-typed spawn premise
        return paired(Comp::spawn(childMb, strip_pair(child)), mb);
      }
      case CompKind::Receive: {
        // plain receive behaves like a selective receive whose clauses accept
        // every label unconditionally
        if (mailbox->kind != TypeKind::Variant)
          throw TranslateError("lowering needs a variant mailbox type for receive");
        std::vector<ReceiveArm> arms;
        auto always = Comp::ret(Value::ascribe(Value::inl(Value::unit()), Type::boolean()));
        for (const auto& [l, lt] : mailbox->labels) {
          (void)lt;
          auto x = fresh->next();
          arms.push_back({l, x, always,
                          Comp::ret(Value::ascribe(Value::variant(l, Value::mkvar(x)), mailbox))});
        }
        return term(g, Comp::selrecv(std::move(arms)), mb, mailbox);
      }
      case CompKind::SelRecv: {
        if (mailbox->kind != TypeKind::Variant)
          throw TranslateError("selective receive at a non-variant mailbox type");
        auto resTy = checker.synth_comp(g, &amb, m);
        return emit_find(g, m->rarms, mb, mailbox, lower_type(resTy));
      }
      case CompKind::LetPair: {
        auto p = checker.synth_value(g, m->v1);
        TypeEnv inner = g;
        inner.bind_var(m->var, p->left);
        inner.bind_var(m->var2, p->right);
        return Comp::letpair(m->var, m->var2, value(g, m->v1), term(inner, m->m1, mb, mailbox));
      }
      case CompKind::CaseSum: {
        auto s = checker.synth_value(g, m->v1);
        TypeEnv le = g, re = g;
        le.bind_var(m->var, s->left);
        re.bind_var(m->var2, s->right);
        return Comp::casesum(value(g, m->v1), m->var, term(le, m->m1, mb, mailbox), m->var2,
                             term(re, m->m2, mb, mailbox));
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
          arms.push_back({arm.label, arm.var, term(inner, arm.body, mb, mailbox)});
        }
        return Comp::casevariant(value(g, m->v1), std::move(arms));
      }
      case CompKind::Unroll:
        return paired(Comp::unroll(value(g, m->v1)), mb);
      case CompKind::Neg:
        return paired(Comp::neg(value(g, m->v1)), mb);
      case CompKind::Add:
        return paired(Comp::add(value(g, m->v1), value(g, m->v2)), mb);
      case CompKind::Gt:
        return paired(Comp::gt(value(g, m->v1), value(g, m->v2)), mb);
      case CompKind::Concat:
        return paired(Comp::concat(value(g, m->v1), value(g, m->v2)), mb);
      case CompKind::Wait:
        throw TranslateError("wait is not lowered");
      case CompKind::Give:
      case CompKind::Take:
      case CompKind::Fork:
      case CompKind::NewCh:
      case CompKind::Choose:
        throw TranslateError("channel primitive in an actor-calculus program");
      case CompKind::Seq:
      case CompKind::CaseList:
      case CompKind::LetVal:
      case CompKind::If:
        throw TranslateError("surface form in lowering input; desugar first");
    }
    throw TranslateError("unreachable computation kind");
  }

  // discards the save-queue component of a lowered actor body so the result
  // fits the unit-typed spawn/actor premise
  CompPtr strip_pair(CompPtr lowered) {
    auto rp = fresh->next();
    auto r = fresh->next();
    auto q = fresh->next();
    return Comp::let(rp, std::move(lowered),
                     Comp::letpair(r, q, Value::mkvar(rp), Comp::ret(Value::mkvar(r))));
  }

  // find(cs, mb): scan the save queue first, then fall back to a receive loop
  CompPtr emit_find(const TypeEnv& g, const std::vector<ReceiveArm>& cs, const ValuePtr& mb,
                    const TypePtr& mailbox, const TypePtr& loweredRes) {
    auto mt = lower_type(mailbox);
    auto listTy = Type::list(mt);
    Effect e{mt, nullptr};
    auto retPair = Type::prod(loweredRes, listTy);

    auto fl = fresh->next();   // findLoop
    auto ms = fresh->next();
    auto mb1 = fresh->next();
    auto mb2 = fresh->next();
    auto x = fresh->next();
    auto mb2p = fresh->next();
    auto mbp = fresh->next();
    auto mb1p = fresh->next();
    auto y = fresh->next();

    auto deflt = Value::lam(
        y, mt, e,
        Comp::let(mb1p, Comp::concat(Value::mkvar(mb1), make_list({Value::mkvar(y)}, listTy)),
                  Comp::app(Value::mkvar(fl),
                            Value::pair(Value::mkvar(mb1p), Value::mkvar(mb2p)))));

    auto scan_arm = Comp::let(
        mbp, Comp::concat(Value::mkvar(mb1), Value::mkvar(mb2p)),
        Comp::casevariant(Value::mkvar(x), branches(g, cs, Value::mkvar(mbp), deflt, mailbox)));

    auto find_loop = Value::rec(
        fl, ms, Type::prod(listTy, listTy), retPair, e,
        Comp::letpair(mb1, mb2, Value::mkvar(ms),
                      Comp::caselist(Value::mkvar(mb2), emit_loop(g, cs, Value::mkvar(mb1),
                                                                  mailbox, loweredRes),
                                     x, mb2p, scan_arm)));

    return Comp::app(find_loop, Value::pair(make_list({}, listTy), mb));
  }

  // loop(cs, mb): receive new messages, saving the ones that match nothing
  CompPtr emit_loop(const TypeEnv& g, const std::vector<ReceiveArm>& cs, const ValuePtr& mb,
                    const TypePtr& mailbox, const TypePtr& loweredRes) {
    auto mt = lower_type(mailbox);
    auto listTy = Type::list(mt);
    Effect e{mt, nullptr};
    auto retPair = Type::prod(loweredRes, listTy);

    auto rl = fresh->next();  // recvLoop
    auto mbv = fresh->next();
    auto x = fresh->next();
    auto mbq = fresh->next();
    auto y = fresh->next();

    auto deflt = Value::lam(
        y, mt, e,
        Comp::let(mbq, Comp::concat(Value::mkvar(mbv), make_list({Value::mkvar(y)}, listTy)),
                  Comp::app(Value::mkvar(rl), Value::mkvar(mbq))));

    auto recv_loop = Value::rec(
        rl, mbv, listTy, retPair, e,
        Comp::let(x, Comp::receive(),
                  Comp::casevariant(Value::mkvar(x),
                                    branches(g, cs, Value::mkvar(mbv), deflt, mailbox))));
    return Comp::app(recv_loop, mb);
  }

  // one case arm per mailbox label: guard chains for handled labels, a
  // requeueing default for unhandled ones
  std::vector<VariantArm> branches(const TypeEnv& g, const std::vector<ReceiveArm>& cs,
                                   const ValuePtr& mbval, const ValuePtr& deflt,
                                   const TypePtr& mailbox) {
    auto mt = lower_type(mailbox);
    std::vector<std::string> handled;  // first-occurrence order
    for (const auto& c : cs) {
      if (std::find(handled.begin(), handled.end(), c.label) == handled.end())
        handled.push_back(c.label);
    }
    std::vector<VariantArm> arms;
    for (const auto& l : handled) {
      std::vector<ReceiveArm> matching;
      for (const auto& c : cs)
        if (c.label == l) matching.push_back(c);
      const TypePtr* lt = nullptr;
      for (const auto& [ml, t] : mailbox->labels)
        if (ml == l) lt = &t;
      if (!lt) throw TranslateError("receive clause label '" + l + "' not in the mailbox type");
      auto xv = fresh->next();
      arms.push_back({l, xv, if_pats(g, l, xv, *lt, matching, mbval, deflt, mailbox, mt)});
    }
    for (const auto& [l, lt] : mailbox->labels) {
      (void)lt;
      if (std::find(handled.begin(), handled.end(), l) != handled.end()) continue;
      auto xv = fresh->next();
      arms.push_back(
          {l, xv,
           Comp::app(deflt, Value::ascribe(Value::variant(l, Value::mkvar(xv)), mt))});
    }
    return arms;
  }

  CompPtr if_pats(const TypeEnv& g, const std::string& label, const std::string& y,
                  const TypePtr& payloadTy, const std::vector<ReceiveArm>& clauses,
                  const ValuePtr& mbval, const ValuePtr& deflt, const TypePtr& mailbox,
                  const TypePtr& mt) {
    if (clauses.empty()) {
      return Comp::app(deflt, Value::ascribe(Value::variant(label, Value::mkvar(y)), mt));
    }
    const auto& c = clauses.front();
    std::vector<ReceiveArm> rest(clauses.begin() + 1, clauses.end());
    TypeEnv inner = g;
    inner.bind_var(c.var, payloadTy);
    auto gl = subst(term(inner, c.guard, mbval, mailbox), Value::mkvar(y), c.var);
    auto bl = subst(term(inner, c.body, mbval, mailbox), Value::mkvar(y), c.var);
    auto rp = fresh->next();
    auto res = fresh->next();
    auto mbq = fresh->next();
    return Comp::let(
        rp, gl,
        Comp::letpair(res, mbq, Value::mkvar(rp),
                      Comp::ifthen(Value::mkvar(res), bl,
                                   if_pats(g, label, y, payloadTy, rest, mbval, deflt, mailbox,
                                           mt))));
  }
};

}  // namespace

ValuePtr lower_value(const ValuePtr& v, const TypeEnv& env, FreshNames& fresh) {
  Lowerer lo(fresh);
  return desugar_value(lo.value(env, v));
}

CompPtr lower_term(const CompPtr& m, const ValuePtr& mb, const TypePtr& mailbox,
                   const TypeEnv& env, FreshNames& fresh) {
  Lowerer lo(fresh);
  return desugar(lo.term(env, m, desugar_value(mb), mailbox));
}

std::vector<Config> lower_config(const Config& cfg, FreshNames& fresh) {
  if (cfg.calc != Calc::Act) throw TranslateError("expected an actor configuration");
  Lowerer lo(fresh);

  TypeEnv g;
  for (const auto& b : cfg.binders) {
    if (b.result) throw TranslateError("sync actors are not lowered");
    g.bind_name(b.name, Type::actor(b.carried));
  }

  // per-actor partition alternatives, then the cartesian product
  std::vector<std::vector<Leaf>> options;
  std::vector<Binder> binders;
  for (const auto& b : cfg.binders) binders.push_back({b.name, lower_type(b.carried), nullptr});
  for (const auto& leaf : cfg.leaves) {
    if (leaf.kind != LeafKind::Actor) throw TranslateError("non-actor leaf");
    const Binder* b = nullptr;
    for (const auto& bb : cfg.binders)
      if (bb.name == leaf.name) b = &bb;
    if (!b) throw TranslateError("actor for unrestricted name '" + leaf.name + "'");
    auto mt = lower_type(b->carried);
    std::vector<ValuePtr> lowered;
    for (const auto& v : leaf.queue) lowered.push_back(lo.value(g, v));
    std::vector<Leaf> alts;
    for (std::size_t i = 0; i <= lowered.size(); i++) {
      std::vector<ValuePtr> saved(lowered.begin(), lowered.begin() + static_cast<long>(i));
      std::vector<ValuePtr> boxed(lowered.begin() + static_cast<long>(i), lowered.end());
      auto save_list = make_list(saved, Type::list(mt));
      auto lterm = desugar(lo.strip_pair(lo.term(g, leaf.term, save_list, b->carried)));
      alts.push_back(Leaf::actor(leaf.name, lterm, boxed));
    }
    options.push_back(std::move(alts));
  }

  std::vector<Config> out;
  std::vector<std::size_t> pick(options.size(), 0);
  while (true) {
    Config c;
    c.calc = Calc::Act;
    c.binders = binders;
    for (std::size_t i = 0; i < options.size(); i++) c.leaves.push_back(options[i][pick[i]]);
    out.push_back(std::move(c));
    std::size_t k = 0;
    while (k < pick.size()) {
      if (++pick[k] < options[k].size()) break;
      pick[k] = 0;
      k++;
    }
    if (k == pick.size()) break;
  }
  return out;
}

}  // namespace mm
