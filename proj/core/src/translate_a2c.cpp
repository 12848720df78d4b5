#include "mm/ops.hpp"
#include "mm/translate.hpp"

namespace mm {

TypePtr translate_type_a2c(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::Unit:
    case TypeKind::Int:
    case TypeKind::Var:
      return t;
    case TypeKind::Actor:
      return Type::chan(translate_type_a2c(t->carried));
    case TypeKind::Actor2:
      throw TranslateError("sync actor references have no channel image");
    case TypeKind::Chan:
      throw TranslateError("channel type in an actor-calculus program");
    case TypeKind::Fun: {
      if (!t->eff) throw TranslateError("unannotated arrow in an actor-calculus type");
      if (t->eff->result) throw TranslateError("sync arrows have no channel image");
      auto mb = Type::chan(translate_type_a2c(t->eff->mailbox));
      return Type::fun(translate_type_a2c(t->arg), Type::fun(mb, translate_type_a2c(t->ret)));
    }
    case TypeKind::Prod:
      return Type::prod(translate_type_a2c(t->left), translate_type_a2c(t->right));
    case TypeKind::Sum:
      return Type::sum(translate_type_a2c(t->left), translate_type_a2c(t->right));
    case TypeKind::Variant: {
      std::vector<std::pair<std::string, TypePtr>> ls;
      for (const auto& [l, lt] : t->labels) ls.emplace_back(l, translate_type_a2c(lt));
      return Type::variant(std::move(ls));
    }
    case TypeKind::Mu:
      return Type::mu(t->var, translate_type_a2c(t->body));
  }
  throw TranslateError("unreachable type kind");
}

ValuePtr translate_value_a2c(const ValuePtr& v, FreshNames& fresh) {
  switch (v->kind) {
    case ValKind::Var:
    case ValKind::Name:
    case ValKind::Unit:
    case ValKind::Int:
    case ValKind::Error:
      return v;
    case ValKind::Lam: {
      if (!v->eff) throw TranslateError("unannotated function in an actor-calculus program");
      auto ch = fresh.next();
      auto chTy = Type::chan(translate_type_a2c(v->eff->mailbox));
      auto body = translate_term_a2c(v->body, Value::mkvar(ch), fresh);
      return Value::lam(v->var, translate_type_a2c(v->ty),
                        Comp::ret(Value::lam(ch, chTy, body)));
    }
    case ValKind::Rec: {
      if (!v->eff) throw TranslateError("unannotated function in an actor-calculus program");
      auto ch = fresh.next();
      auto chTy = Type::chan(translate_type_a2c(v->eff->mailbox));
      auto body = translate_term_a2c(v->body, Value::mkvar(ch), fresh);
      return Value::rec(v->fname, v->var, translate_type_a2c(v->ty),
                        Type::fun(chTy, translate_type_a2c(v->ret)),
                        Comp::ret(Value::lam(ch, chTy, body)));
    }
    case ValKind::Pair:
      return Value::pair(translate_value_a2c(v->v1, fresh), translate_value_a2c(v->v2, fresh));
    case ValKind::Inl:
      return Value::inl(translate_value_a2c(v->v1, fresh));
    case ValKind::Inr:
      return Value::inr(translate_value_a2c(v->v1, fresh));
    case ValKind::Variant:
      return Value::variant(v->label, translate_value_a2c(v->v1, fresh));
    case ValKind::Roll:
      return Value::roll(translate_value_a2c(v->v1, fresh));
    case ValKind::Ascribe:
      return Value::ascribe(translate_value_a2c(v->v1, fresh), translate_type_a2c(v->ty));
    case ValKind::Nil:
    case ValKind::Cons:
    case ValKind::BoolLit:
      throw TranslateError("surface form in translation input; desugar first");
  }
  throw TranslateError("unreachable value kind");
}

CompPtr translate_term_a2c(const CompPtr& m, const ValuePtr& ch, FreshNames& fresh) {
  auto tv = [&](const ValuePtr& v) { return translate_value_a2c(v, fresh); };
  auto tc = [&](const CompPtr& n) { return translate_term_a2c(n, ch, fresh); };
  switch (m->kind) {
    case CompKind::Let:
      return Comp::let(m->var, tc(m->m1), tc(m->m2));
    case CompKind::App: {
      auto f = fresh.next();
      return Comp::let(f, Comp::app(tv(m->v1), tv(m->v2)), Comp::app(Value::mkvar(f), ch));
    }
    case CompKind::Return:
      return Comp::ret(tv(m->v1));
    case CompKind::SelfPid:
      return Comp::ret(ch);
    case CompKind::Receive:
      return Comp::take(ch);
    case CompKind::Spawn: {
      if (m->ann2) throw TranslateError("sync spawn has no channel image");
      auto chMb = fresh.next();
      auto tmp = fresh.next();
      auto child = translate_term_a2c(m->m1, Value::mkvar(chMb), fresh);
      return Comp::let(chMb, Comp::newch(translate_type_a2c(m->ann)),
                       Comp::let(tmp, Comp::fork(child), Comp::ret(Value::mkvar(chMb))));
    }
    case CompKind::Send:
      return Comp::give(tv(m->v1), tv(m->v2));
    case CompKind::LetPair:
      return Comp::letpair(m->var, m->var2, tv(m->v1), tc(m->m1));
    case CompKind::CaseSum:
      return Comp::casesum(tv(m->v1), m->var, tc(m->m1), m->var2, tc(m->m2));
    case CompKind::CaseVariant: {
      std::vector<VariantArm> arms;
      for (const auto& arm : m->arms) arms.push_back({arm.label, arm.var, tc(arm.body)});
      return Comp::casevariant(tv(m->v1), std::move(arms));
    }
    case CompKind::Unroll:
      return Comp::unroll(tv(m->v1));
    case CompKind::Neg:
      return Comp::neg(tv(m->v1));
    case CompKind::Add:
      return Comp::add(tv(m->v1), tv(m->v2));
    case CompKind::Gt:
      return Comp::gt(tv(m->v1), tv(m->v2));
    case CompKind::Concat:
      return Comp::concat(tv(m->v1), tv(m->v2));
    case CompKind::Wait:
      throw TranslateError("wait has no channel image");
    case CompKind::SelRecv:
      throw TranslateError("selective receive must be lowered before this translation");
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
      throw TranslateError("surface form in translation input; desugar first");
  }
  throw TranslateError("unreachable computation kind");
}

Config translate_config_a2c(const Config& cfg, FreshNames& fresh) {
  if (cfg.calc != Calc::Act) throw TranslateError("expected an actor configuration");
  Config out;
  out.calc = Calc::Ch;
  for (const auto& b : cfg.binders) {
    if (b.result) throw TranslateError("sync actors have no channel image");
    out.binders.push_back({b.name, translate_type_a2c(b.carried), nullptr});
  }
  for (const auto& leaf : cfg.leaves) {
    if (leaf.kind != LeafKind::Actor) throw TranslateError("non-actor leaf in actor configuration");
    std::vector<ValuePtr> values;
    values.reserve(leaf.queue.size());
    for (const auto& v : leaf.queue) values.push_back(translate_value_a2c(v, fresh));
    out.leaves.push_back(Leaf::buffer(leaf.name, std::move(values)));
    out.leaves.push_back(Leaf::thread(translate_term_a2c(leaf.term, Value::mkname(leaf.name), fresh)));
  }
  return out;
}

}  // namespace mm
