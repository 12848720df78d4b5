#include "mm/ops.hpp"

namespace mm {

namespace {

bool is_comm_primitive(CompKind k) {
  switch (k) {
    case CompKind::Give:
    case CompKind::Take:
    case CompKind::Fork:
    case CompKind::NewCh:
    case CompKind::Choose:
    case CompKind::Spawn:
    case CompKind::Send:
    case CompKind::Receive:
    case CompKind::SelfPid:
    case CompKind::Wait:
    case CompKind::SelRecv:
      return true;
    default:
      return false;
  }
}

// One reduction of a head computation (not a let, not return-with-value).
// Returns nullptr when no term rule applies.
CompPtr step_head(const CompPtr& m, std::string& diag) {
  switch (m->kind) {
    case CompKind::App: {
      auto f = strip_ascribe(m->v1);
      if (f->kind == ValKind::Lam) return subst(f->body, m->v2, f->var);
      if (f->kind == ValKind::Rec) {
        auto body = subst(f->body, f, f->fname);
        return subst(body, m->v2, f->var);
      }
      diag = "application of a non-function value";
      return nullptr;
    }
    case CompKind::LetPair: {
      auto p = strip_ascribe(m->v1);
      if (p->kind == ValKind::Pair) {
        auto b = subst(m->m1, p->v1, m->var);
        return subst(b, p->v2, m->var2);
      }
      diag = "pair destructuring of a non-pair value";
      return nullptr;
    }
    case CompKind::CaseSum: {
      auto s = strip_ascribe(m->v1);
      if (s->kind == ValKind::Inl) return subst(m->m1, s->v1, m->var);
      if (s->kind == ValKind::Inr) return subst(m->m2, s->v1, m->var2);
      diag = "case on a non-sum value";
      return nullptr;
    }
    case CompKind::CaseVariant: {
      auto s = strip_ascribe(m->v1);
      if (s->kind == ValKind::Variant) {
        for (const auto& arm : m->arms) {
          if (arm.label == s->label) return subst(arm.body, s->v1, arm.var);
        }
        diag = "no case arm for label '" + s->label + "'";
        return nullptr;
      }
      diag = "case on a non-variant value";
      return nullptr;
    }
    case CompKind::Unroll: {
      auto r = strip_ascribe(m->v1);
      if (r->kind == ValKind::Roll) return Comp::ret(r->v1);
      diag = "unroll of a non-rolled value";
      return nullptr;
    }
    case CompKind::Neg: {
      auto n = strip_ascribe(m->v1);
      if (n->kind == ValKind::Int) return Comp::ret(Value::integer(-n->intval));
      diag = "neg of a non-integer";
      return nullptr;
    }
    case CompKind::Add: {
      auto a = strip_ascribe(m->v1);
      auto b = strip_ascribe(m->v2);
      if (a->kind == ValKind::Int && b->kind == ValKind::Int)
        return Comp::ret(Value::integer(a->intval + b->intval));
      diag = "add of non-integers";
      return nullptr;
    }
    case CompKind::Gt: {
      auto a = strip_ascribe(m->v1);
      auto b = strip_ascribe(m->v2);
      if (a->kind == ValKind::Int && b->kind == ValKind::Int) {
        auto inj = a->intval > b->intval ? Value::inl(Value::unit()) : Value::inr(Value::unit());
        return Comp::ret(Value::ascribe(inj, Type::boolean()));
      }
      diag = "gt of non-integers";
      return nullptr;
    }
    case CompKind::Concat: {
      auto xs = as_list(m->v1);
      auto ys = as_list(m->v2);
      if (xs && ys) {
        std::vector<ValuePtr> joined = xs->items;
        joined.insert(joined.end(), ys->items.begin(), ys->items.end());
        auto ann = ys->ann ? ys->ann : xs->ann;
        return Comp::ret(make_list(joined, ann));
      }
      diag = "concat of non-list values";
      return nullptr;
    }
    default:
      diag = "not a redex";
      return nullptr;
  }
}

}  // namespace

Decomp decompose(const CompPtr& m) {
  Decomp d;
  CompPtr cur = m;
  while (cur->kind == CompKind::Let) {
    d.frames.push_back({cur->var, cur->m2});
    cur = cur->m1;
  }
  d.head = cur;
  return d;
}

CompPtr plug(const std::vector<LetFrame>& frames, const CompPtr& head) {
  CompPtr out = head;
  for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
    out = Comp::let(it->var, out, it->rest);
  }
  return out;
}

TermStep step_term(const CompPtr& m) {
  // Walk down the let spine so stepping is O(depth) rather than
  // re-decomposing from the root on every call site.
  if (m->kind == CompKind::Let) {
    auto inner = step_term(m->m1);
    switch (inner.status) {
      case TermStatus::Stepped:
        return {TermStatus::Stepped, Comp::let(m->var, inner.next, m->m2), nullptr, ""};
      case TermStatus::Finished:
        return {TermStatus::Stepped, subst(m->m2, m->m1->v1, m->var), nullptr, ""};
      case TermStatus::Blocked:
        return {TermStatus::Blocked, nullptr, inner.redex, ""};
      case TermStatus::Stuck:
        return inner;
    }
  }
  if (m->kind == CompKind::Return) return {TermStatus::Finished, nullptr, nullptr, ""};
  if (is_comm_primitive(m->kind)) return {TermStatus::Blocked, nullptr, m, ""};
  std::string diag;
  if (auto next = step_head(m, diag)) return {TermStatus::Stepped, next, nullptr, ""};
  return {TermStatus::Stuck, nullptr, nullptr, diag};
}

EvalResult eval_term(const CompPtr& m, int fuel) {
  CompPtr cur = m;
  int steps = 0;
  while (steps < fuel) {
    auto s = step_term(cur);
    if (s.status == TermStatus::Stepped) {
      cur = s.next;
      steps++;
      continue;
    }
    return {s.status, cur, steps};
  }
  return {TermStatus::Stepped, cur, steps};
}

}  // namespace mm
