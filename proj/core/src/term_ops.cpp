#include <algorithm>
#include <functional>

#include "mm/ops.hpp"

namespace mm {

// ------------------------------
// free variables / names
// ------------------------------

namespace {

void fv_value(const ValuePtr& v, std::set<std::string>& bound, std::set<std::string>& out);

void fv_comp(const CompPtr& m, std::set<std::string>& bound, std::set<std::string>& out) {
  if (!m) return;
  auto with = [&](std::vector<std::string> vars, const CompPtr& body) {
    std::vector<std::string> added;
    for (auto& x : vars)
      if (bound.insert(x).second) added.push_back(x);
    fv_comp(body, bound, out);
    for (auto& x : added) bound.erase(x);
  };
  switch (m->kind) {
    case CompKind::App:
    case CompKind::Give:
    case CompKind::Send:
    case CompKind::Choose:
    case CompKind::Add:
    case CompKind::Gt:
    case CompKind::Concat:
      fv_value(m->v1, bound, out);
      fv_value(m->v2, bound, out);
      break;
    case CompKind::Return:
    case CompKind::Take:
    case CompKind::Unroll:
    case CompKind::Wait:
    case CompKind::Neg:
      fv_value(m->v1, bound, out);
      break;
    case CompKind::Let:
      fv_comp(m->m1, bound, out);
      with({m->var}, m->m2);
      break;
    case CompKind::LetPair:
      fv_value(m->v1, bound, out);
      with({m->var, m->var2}, m->m1);
      break;
    case CompKind::CaseSum:
      fv_value(m->v1, bound, out);
      with({m->var}, m->m1);
      with({m->var2}, m->m2);
      break;
    case CompKind::CaseVariant:
      fv_value(m->v1, bound, out);
      for (const auto& arm : m->arms) with({arm.var}, arm.body);
      break;
    case CompKind::Fork:
      fv_comp(m->m1, bound, out);
      break;
    case CompKind::NewCh:
    case CompKind::Receive:
    case CompKind::SelfPid:
      break;
    case CompKind::Spawn:
      fv_comp(m->m1, bound, out);
      break;
    case CompKind::SelRecv:
      for (const auto& arm : m->rarms) {
        with({arm.var}, arm.guard);
        with({arm.var}, arm.body);
      }
      break;
    case CompKind::Seq:
      fv_comp(m->m1, bound, out);
      fv_comp(m->m2, bound, out);
      break;
    case CompKind::CaseList:
      fv_value(m->v1, bound, out);
      fv_comp(m->nil_body, bound, out);
      with({m->var, m->var2}, m->cons_body);
      break;
    case CompKind::LetVal:
      fv_value(m->v1, bound, out);
      with({m->var}, m->m1);
      break;
    case CompKind::If:
      fv_value(m->v1, bound, out);
      fv_comp(m->m1, bound, out);
      fv_comp(m->m2, bound, out);
      break;
  }
}

void fv_value(const ValuePtr& v, std::set<std::string>& bound, std::set<std::string>& out) {
  if (!v) return;
  switch (v->kind) {
    case ValKind::Var:
      if (!bound.count(v->name)) out.insert(v->name);
      break;
    case ValKind::Name:
    case ValKind::Unit:
    case ValKind::Int:
    case ValKind::Error:
    case ValKind::Nil:
    case ValKind::BoolLit:
      break;
    case ValKind::Lam: {
      bool added = bound.insert(v->var).second;
      fv_comp(v->body, bound, out);
      if (added) bound.erase(v->var);
      break;
    }
    case ValKind::Rec: {
      bool af = bound.insert(v->fname).second;
      bool ax = bound.insert(v->var).second;
      fv_comp(v->body, bound, out);
      if (ax) bound.erase(v->var);
      if (af) bound.erase(v->fname);
      break;
    }
    case ValKind::Pair:
    case ValKind::Cons:
      fv_value(v->v1, bound, out);
      fv_value(v->v2, bound, out);
      break;
    case ValKind::Inl:
    case ValKind::Inr:
    case ValKind::Variant:
    case ValKind::Roll:
    case ValKind::Ascribe:
      fv_value(v->v1, bound, out);
      break;
  }
}

void walk_names_value(const ValuePtr& v, std::set<std::string>& out);

void walk_names_comp(const CompPtr& m, std::set<std::string>& out) {
  if (!m) return;
  walk_names_value(m->v1, out);
  walk_names_value(m->v2, out);
  walk_names_comp(m->m1, out);
  walk_names_comp(m->m2, out);
  walk_names_comp(m->nil_body, out);
  walk_names_comp(m->cons_body, out);
  for (const auto& arm : m->arms) walk_names_comp(arm.body, out);
  for (const auto& arm : m->rarms) {
    walk_names_comp(arm.guard, out);
    walk_names_comp(arm.body, out);
  }
}

void walk_names_value(const ValuePtr& v, std::set<std::string>& out) {
  if (!v) return;
  if (v->kind == ValKind::Name) out.insert(v->name);
  walk_names_value(v->v1, out);
  walk_names_value(v->v2, out);
  walk_names_comp(v->body, out);
}

}  // namespace

std::set<std::string> free_vars(const CompPtr& m) {
  std::set<std::string> bound, out;
  fv_comp(m, bound, out);
  return out;
}

std::set<std::string> free_names(const CompPtr& m) {
  std::set<std::string> out;
  walk_names_comp(m, out);
  return out;
}

std::set<std::string> free_names_value(const ValuePtr& v) {
  std::set<std::string> out;
  walk_names_value(v, out);
  return out;
}

// ------------------------------
// substitution
// ------------------------------

namespace {

std::string avoid(const std::string& base, const std::set<std::string>& taken) {
  std::string x = base;
  while (taken.count(x)) x += "'";
  return x;
}

CompPtr rename_var_comp(const CompPtr& m, const std::string& from, const std::string& to) {
  return subst(m, Value::mkvar(to), from);
}

}  // namespace

ValuePtr subst_value(const ValuePtr& w, const ValuePtr& v, const std::string& var) {
  if (!w) return w;
  switch (w->kind) {
    case ValKind::Var:
      return w->name == var ? v : w;
    case ValKind::Name:
    case ValKind::Unit:
    case ValKind::Int:
    case ValKind::Error:
    case ValKind::Nil:
    case ValKind::BoolLit:
      return w;
    case ValKind::Lam: {
      if (w->var == var) return w;
      std::string x = w->var;
      CompPtr body = w->body;
      auto fvv = free_vars(Comp::ret(v));
      if (fvv.count(x)) {
        auto taken = fvv;
        auto bodyfv = free_vars(body);
        taken.insert(bodyfv.begin(), bodyfv.end());
        std::string x2 = avoid(x, taken);
        body = rename_var_comp(body, x, x2);
        x = x2;
      }
      auto body2 = subst(body, v, var);
      if (body2 == w->body && x == w->var) return w;
      return w->eff ? Value::lam(x, w->ty, *w->eff, body2) : Value::lam(x, w->ty, body2);
    }
    case ValKind::Rec: {
      if (w->fname == var || w->var == var) return w;
      std::string f = w->fname, x = w->var;
      CompPtr body = w->body;
      auto fvv = free_vars(Comp::ret(v));
      auto bodyfv = free_vars(body);
      auto taken = fvv;
      taken.insert(bodyfv.begin(), bodyfv.end());
      if (fvv.count(f)) {
        std::string f2 = avoid(f, taken);
        body = rename_var_comp(body, f, f2);
        f = f2;
        taken.insert(f2);
      }
      if (fvv.count(x)) {
        std::string x2 = avoid(x, taken);
        body = rename_var_comp(body, x, x2);
        x = x2;
      }
      auto body2 = subst(body, v, var);
      if (body2 == w->body && f == w->fname && x == w->var) return w;
      return w->eff ? Value::rec(f, x, w->ty, w->ret, *w->eff, body2)
                    : Value::rec(f, x, w->ty, w->ret, body2);
    }
    case ValKind::Pair: {
      auto a = subst_value(w->v1, v, var), b = subst_value(w->v2, v, var);
      if (a == w->v1 && b == w->v2) return w;
      return Value::pair(a, b);
    }
    case ValKind::Cons: {
      auto a = subst_value(w->v1, v, var), b = subst_value(w->v2, v, var);
      if (a == w->v1 && b == w->v2) return w;
      return Value::cons(a, b);
    }
    case ValKind::Inl: {
      auto a = subst_value(w->v1, v, var);
      return a == w->v1 ? w : Value::inl(a);
    }
    case ValKind::Inr: {
      auto a = subst_value(w->v1, v, var);
      return a == w->v1 ? w : Value::inr(a);
    }
    case ValKind::Variant: {
      auto a = subst_value(w->v1, v, var);
      return a == w->v1 ? w : Value::variant(w->label, a);
    }
    case ValKind::Roll: {
      auto a = subst_value(w->v1, v, var);
      return a == w->v1 ? w : Value::roll(a);
    }
    case ValKind::Ascribe: {
      auto a = subst_value(w->v1, v, var);
      return a == w->v1 ? w : Value::ascribe(a, w->ty);
    }
  }
  return w;
}

namespace {

// Renames `binder` (inside the given bodies) when it would capture a free
// variable of `v`. Returns the possibly renamed binder.
std::string freshen_binder(const std::string& binder, const ValuePtr& v,
                           std::vector<CompPtr*> bodies,
                           const std::vector<std::string>& siblings = {}) {
  auto fvv = free_vars(Comp::ret(v));
  if (!fvv.count(binder)) return binder;
  auto taken = fvv;
  for (auto* b : bodies) {
    auto fb = free_vars(*b);
    taken.insert(fb.begin(), fb.end());
  }
  for (const auto& s : siblings) taken.insert(s);
  std::string nb = avoid(binder, taken);
  for (auto* b : bodies) *b = rename_var_comp(*b, binder, nb);
  return nb;
}

}  // namespace

CompPtr subst(const CompPtr& m, const ValuePtr& v, const std::string& var) {
  if (!m) return m;
  auto sv = [&](const ValuePtr& w) { return subst_value(w, v, var); };
  auto sc = [&](const CompPtr& n) { return subst(n, v, var); };
  switch (m->kind) {
    case CompKind::App: return Comp::app(sv(m->v1), sv(m->v2));
    case CompKind::Return: return Comp::ret(sv(m->v1));
    case CompKind::Let: {
      auto m1 = sc(m->m1);
      if (m->var == var) return Comp::let(m->var, m1, m->m2);
      CompPtr body = m->m2;
      std::string x = freshen_binder(m->var, v, {&body});
      return Comp::let(x, m1, subst(body, v, var));
    }
    case CompKind::LetPair: {
      auto v1 = sv(m->v1);
      if (m->var == var || m->var2 == var) return Comp::letpair(m->var, m->var2, v1, m->m1);
      CompPtr body = m->m1;
      std::string x = freshen_binder(m->var, v, {&body}, {m->var2});
      std::string y = freshen_binder(m->var2, v, {&body}, {x});
      return Comp::letpair(x, y, v1, subst(body, v, var));
    }
    case CompKind::CaseSum: {
      auto scrut = sv(m->v1);
      CompPtr ml = m->m1, mr = m->m2;
      std::string xl = m->var, xr = m->var2;
      if (xl != var) {
        xl = freshen_binder(xl, v, {&ml});
        ml = subst(ml, v, var);
      }
      if (xr != var) {
        xr = freshen_binder(xr, v, {&mr});
        mr = subst(mr, v, var);
      }
      return Comp::casesum(scrut, xl, ml, xr, mr);
    }
    case CompKind::CaseVariant: {
      auto scrut = sv(m->v1);
      std::vector<VariantArm> arms;
      arms.reserve(m->arms.size());
      for (const auto& arm : m->arms) {
        if (arm.var == var) {
          arms.push_back(arm);
          continue;
        }
        CompPtr body = arm.body;
        std::string x = freshen_binder(arm.var, v, {&body});
        arms.push_back({arm.label, x, subst(body, v, var)});
      }
      return Comp::casevariant(scrut, std::move(arms));
    }
    case CompKind::Unroll: return Comp::unroll(sv(m->v1));
    case CompKind::Give: return Comp::give(sv(m->v1), sv(m->v2));
    case CompKind::Take: return Comp::take(sv(m->v1));
    case CompKind::Fork: return Comp::fork(sc(m->m1));
    case CompKind::NewCh: return m;
    case CompKind::Choose: return Comp::choose(sv(m->v1), sv(m->v2));
    case CompKind::Spawn:
      return m->ann2 ? Comp::spawn2(m->ann, m->ann2, sc(m->m1)) : Comp::spawn(m->ann, sc(m->m1));
    case CompKind::Send: return Comp::send(sv(m->v1), sv(m->v2));
    case CompKind::Receive:
    case CompKind::SelfPid: return m;
    case CompKind::Wait: return Comp::wait(sv(m->v1));
    case CompKind::SelRecv: {
      std::vector<ReceiveArm> arms;
      arms.reserve(m->rarms.size());
      for (const auto& arm : m->rarms) {
        if (arm.var == var) {
          arms.push_back(arm);
          continue;
        }
        CompPtr guard = arm.guard, body = arm.body;
        std::string x = freshen_binder(arm.var, v, {&guard, &body});
        arms.push_back({arm.label, x, subst(guard, v, var), subst(body, v, var)});
      }
      return Comp::selrecv(std::move(arms));
    }
    case CompKind::Neg: return Comp::neg(sv(m->v1));
    case CompKind::Add: return Comp::add(sv(m->v1), sv(m->v2));
    case CompKind::Gt: return Comp::gt(sv(m->v1), sv(m->v2));
    case CompKind::Concat: return Comp::concat(sv(m->v1), sv(m->v2));
    case CompKind::Seq: return Comp::seq(sc(m->m1), sc(m->m2));
    case CompKind::CaseList: {
      auto scrut = sv(m->v1);
      auto nb = sc(m->nil_body);
      if (m->var == var || m->var2 == var)
        return Comp::caselist(scrut, nb, m->var, m->var2, m->cons_body);
      CompPtr body = m->cons_body;
      std::string h = freshen_binder(m->var, v, {&body}, {m->var2});
      std::string t = freshen_binder(m->var2, v, {&body}, {h});
      return Comp::caselist(scrut, nb, h, t, subst(body, v, var));
    }
    case CompKind::LetVal: {
      auto v1 = sv(m->v1);
      if (m->var == var) return Comp::letval(m->var, v1, m->m1);
      CompPtr body = m->m1;
      std::string x = freshen_binder(m->var, v, {&body});
      return Comp::letval(x, v1, subst(body, v, var));
    }
    case CompKind::If: return Comp::ifthen(sv(m->v1), sc(m->m1), sc(m->m2));
  }
  return m;
}

// ------------------------------
// runtime-name renaming
// ------------------------------

namespace {
using NameMap = std::vector<std::pair<std::string, std::string>>;

const std::string* lookup(const NameMap& map, const std::string& k) {
  for (const auto& [a, b] : map)
    if (a == k) return &b;
  return nullptr;
}
}  // namespace

ValuePtr rename_names_value(const ValuePtr& v, const NameMap& map) {
  if (!v) return v;
  switch (v->kind) {
    case ValKind::Name:
      if (const auto* to = lookup(map, v->name)) return Value::mkname(*to);
      return v;
    case ValKind::Var:
    case ValKind::Unit:
    case ValKind::Int:
    case ValKind::Error:
    case ValKind::Nil:
    case ValKind::BoolLit:
      return v;
    case ValKind::Lam: {
      auto b = rename_names(v->body, map);
      if (b == v->body) return v;
      return v->eff ? Value::lam(v->var, v->ty, *v->eff, b) : Value::lam(v->var, v->ty, b);
    }
    case ValKind::Rec: {
      auto b = rename_names(v->body, map);
      if (b == v->body) return v;
      return v->eff ? Value::rec(v->fname, v->var, v->ty, v->ret, *v->eff, b)
                    : Value::rec(v->fname, v->var, v->ty, v->ret, b);
    }
    case ValKind::Pair: return Value::pair(rename_names_value(v->v1, map), rename_names_value(v->v2, map));
    case ValKind::Cons: return Value::cons(rename_names_value(v->v1, map), rename_names_value(v->v2, map));
    case ValKind::Inl: return Value::inl(rename_names_value(v->v1, map));
    case ValKind::Inr: return Value::inr(rename_names_value(v->v1, map));
    case ValKind::Variant: return Value::variant(v->label, rename_names_value(v->v1, map));
    case ValKind::Roll: return Value::roll(rename_names_value(v->v1, map));
    case ValKind::Ascribe: return Value::ascribe(rename_names_value(v->v1, map), v->ty);
  }
  return v;
}

CompPtr rename_names(const CompPtr& m, const NameMap& map) {
  if (!m) return m;
  auto rv = [&](const ValuePtr& w) { return rename_names_value(w, map); };
  auto rc = [&](const CompPtr& n) { return rename_names(n, map); };
  auto c = std::make_shared<Comp>(*m);
  c->v1 = rv(m->v1);
  c->v2 = rv(m->v2);
  c->m1 = rc(m->m1);
  c->m2 = rc(m->m2);
  c->nil_body = rc(m->nil_body);
  c->cons_body = rc(m->cons_body);
  for (auto& arm : c->arms) arm.body = rc(arm.body);
  for (auto& arm : c->rarms) {
    arm.guard = rc(arm.guard);
    arm.body = rc(arm.body);
  }
  return c;
}

// ------------------------------
// alpha equality
// ------------------------------

namespace {

struct AlphaEnv {
  std::vector<std::pair<std::string, std::string>> pairs;

  bool var_eq(const std::string& a, const std::string& b) const {
    for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
      if (it->first == a || it->second == b) return it->first == a && it->second == b;
    }
    return a == b;
  }
  void push(const std::string& a, const std::string& b) { pairs.emplace_back(a, b); }
  void pop(std::size_t n) { pairs.resize(pairs.size() - n); }
};

bool aeq_value(const ValuePtr& a, const ValuePtr& b, AlphaEnv& env);

bool aeq_comp(const CompPtr& a, const CompPtr& b, AlphaEnv& env) {
  if (a == b && env.pairs.empty()) return true;
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  auto eqv = [&](const ValuePtr& x, const ValuePtr& y) { return aeq_value(x, y, env); };
  auto eqc = [&](const CompPtr& x, const CompPtr& y) { return aeq_comp(x, y, env); };
  auto under = [&](std::vector<std::pair<std::string, std::string>> bs, const CompPtr& x,
                   const CompPtr& y) {
    for (auto& [p, q] : bs) env.push(p, q);
    bool ok = aeq_comp(x, y, env);
    env.pop(bs.size());
    return ok;
  };
  switch (a->kind) {
    case CompKind::App:
    case CompKind::Give:
    case CompKind::Send:
    case CompKind::Choose:
    case CompKind::Add:
    case CompKind::Gt:
    case CompKind::Concat:
      return eqv(a->v1, b->v1) && eqv(a->v2, b->v2);
    case CompKind::Return:
    case CompKind::Take:
    case CompKind::Unroll:
    case CompKind::Wait:
    case CompKind::Neg:
      return eqv(a->v1, b->v1);
    case CompKind::Let:
      return eqc(a->m1, b->m1) && under({{a->var, b->var}}, a->m2, b->m2);
    case CompKind::LetPair:
      return eqv(a->v1, b->v1) &&
             under({{a->var, b->var}, {a->var2, b->var2}}, a->m1, b->m1);
    case CompKind::CaseSum:
      return eqv(a->v1, b->v1) && under({{a->var, b->var}}, a->m1, b->m1) &&
             under({{a->var2, b->var2}}, a->m2, b->m2);
    case CompKind::CaseVariant: {
      if (!eqv(a->v1, b->v1) || a->arms.size() != b->arms.size()) return false;
      for (std::size_t i = 0; i < a->arms.size(); i++) {
        const auto& x = a->arms[i];
        const auto& y = b->arms[i];
        if (x.label != y.label) return false;
        if (!under({{x.var, y.var}}, x.body, y.body)) return false;
      }
      return true;
    }
    case CompKind::Fork: return eqc(a->m1, b->m1);
    case CompKind::NewCh: return types_equal(a->ann, b->ann);
    case CompKind::Spawn:
      return types_equal(a->ann, b->ann) &&
             ((!a->ann2 && !b->ann2) || (a->ann2 && b->ann2 && types_equal(a->ann2, b->ann2))) &&
             eqc(a->m1, b->m1);
    case CompKind::Receive:
    case CompKind::SelfPid: return true;
    case CompKind::SelRecv: {
      if (a->rarms.size() != b->rarms.size()) return false;
      for (std::size_t i = 0; i < a->rarms.size(); i++) {
        const auto& x = a->rarms[i];
        const auto& y = b->rarms[i];
        if (x.label != y.label) return false;
        env.push(x.var, y.var);
        bool ok = aeq_comp(x.guard, y.guard, env) && aeq_comp(x.body, y.body, env);
        env.pop(1);
        if (!ok) return false;
      }
      return true;
    }
    case CompKind::Seq: return eqc(a->m1, b->m1) && eqc(a->m2, b->m2);
    case CompKind::CaseList:
      return eqv(a->v1, b->v1) && eqc(a->nil_body, b->nil_body) &&
             under({{a->var, b->var}, {a->var2, b->var2}}, a->cons_body, b->cons_body);
    case CompKind::LetVal:
      return eqv(a->v1, b->v1) && under({{a->var, b->var}}, a->m1, b->m1);
    case CompKind::If:
      return eqv(a->v1, b->v1) && eqc(a->m1, b->m1) && eqc(a->m2, b->m2);
  }
  return false;
}

bool effs_equal(const std::optional<Effect>& a, const std::optional<Effect>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  if (!types_equal(a->mailbox, b->mailbox)) return false;
  if ((a->result == nullptr) != (b->result == nullptr)) return false;
  return !a->result || types_equal(a->result, b->result);
}

bool aeq_value(const ValuePtr& a, const ValuePtr& b, AlphaEnv& env) {
  if (a == b && env.pairs.empty()) return true;
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ValKind::Var: return env.var_eq(a->name, b->name);
    case ValKind::Name: return a->name == b->name;
    case ValKind::Unit:
    case ValKind::Error:
    case ValKind::Nil: return true;
    case ValKind::Int: return a->intval == b->intval;
    case ValKind::BoolLit: return a->boolval == b->boolval;
    case ValKind::Lam: {
      if (!types_equal(a->ty, b->ty) || !effs_equal(a->eff, b->eff)) return false;
      env.push(a->var, b->var);
      bool ok = aeq_comp(a->body, b->body, env);
      env.pop(1);
      return ok;
    }
    case ValKind::Rec: {
      if (!types_equal(a->ty, b->ty) || !types_equal(a->ret, b->ret) ||
          !effs_equal(a->eff, b->eff))
        return false;
      env.push(a->fname, b->fname);
      env.push(a->var, b->var);
      bool ok = aeq_comp(a->body, b->body, env);
      env.pop(2);
      return ok;
    }
    case ValKind::Pair:
    case ValKind::Cons:
      return aeq_value(a->v1, b->v1, env) && aeq_value(a->v2, b->v2, env);
    case ValKind::Inl:
    case ValKind::Inr:
    case ValKind::Roll:
      return aeq_value(a->v1, b->v1, env);
    case ValKind::Variant:
      return a->label == b->label && aeq_value(a->v1, b->v1, env);
    case ValKind::Ascribe:
      return types_equal(a->ty, b->ty) && aeq_value(a->v1, b->v1, env);
  }
  return false;
}

}  // namespace

bool alpha_equal(const CompPtr& a, const CompPtr& b) {
  AlphaEnv env;
  return aeq_comp(a, b, env);
}

bool alpha_equal_value(const ValuePtr& a, const ValuePtr& b) {
  AlphaEnv env;
  return aeq_value(a, b, env);
}

// ------------------------------
// desugaring
// ------------------------------

namespace {

std::string fresh_avoiding(const std::string& base, const std::set<std::string>& taken) {
  return avoid(base, taken);
}

}  // namespace

ValuePtr desugar_value(const ValuePtr& v) {
  if (!v) return v;
  switch (v->kind) {
    case ValKind::Nil:
      return Value::roll(Value::inl(Value::unit()));
    case ValKind::Cons:
      return Value::roll(Value::inr(Value::pair(desugar_value(v->v1), desugar_value(v->v2))));
    case ValKind::BoolLit: {
      auto inj = v->boolval ? Value::inl(Value::unit()) : Value::inr(Value::unit());
      return Value::ascribe(inj, Type::boolean());
    }
    case ValKind::Var:
    case ValKind::Name:
    case ValKind::Unit:
    case ValKind::Int:
    case ValKind::Error:
      return v;
    case ValKind::Lam: {
      auto b = desugar(v->body);
      if (b == v->body) return v;
      return v->eff ? Value::lam(v->var, v->ty, *v->eff, b) : Value::lam(v->var, v->ty, b);
    }
    case ValKind::Rec: {
      auto b = desugar(v->body);
      if (b == v->body) return v;
      return v->eff ? Value::rec(v->fname, v->var, v->ty, v->ret, *v->eff, b)
                    : Value::rec(v->fname, v->var, v->ty, v->ret, b);
    }
    case ValKind::Pair: {
      auto a = desugar_value(v->v1), b = desugar_value(v->v2);
      return (a == v->v1 && b == v->v2) ? v : Value::pair(a, b);
    }
    case ValKind::Inl: {
      auto a = desugar_value(v->v1);
      return a == v->v1 ? v : Value::inl(a);
    }
    case ValKind::Inr: {
      auto a = desugar_value(v->v1);
      return a == v->v1 ? v : Value::inr(a);
    }
    case ValKind::Variant: {
      auto a = desugar_value(v->v1);
      return a == v->v1 ? v : Value::variant(v->label, a);
    }
    case ValKind::Roll: {
      auto a = desugar_value(v->v1);
      return a == v->v1 ? v : Value::roll(a);
    }
    case ValKind::Ascribe: {
      auto a = desugar_value(v->v1);
      return a == v->v1 ? v : Value::ascribe(a, v->ty);
    }
  }
  return v;
}

CompPtr desugar(const CompPtr& m) {
  if (!m) return m;
  auto dv = [&](const ValuePtr& w) { return desugar_value(w); };
  auto dc = [&](const CompPtr& n) { return desugar(n); };
  switch (m->kind) {
    case CompKind::Seq: {
      auto m1 = dc(m->m1);
      auto m2 = dc(m->m2);
      auto x = fresh_avoiding("_seq", free_vars(m2));
      return Comp::let(x, m1, m2);
    }
    case CompKind::LetVal:
      return Comp::let(m->var, Comp::ret(dv(m->v1)), dc(m->m1));
    case CompKind::If: {
      auto cond = dv(m->v1);
      auto thenb = dc(m->m1);
      auto elseb = dc(m->m2);
      auto xl = fresh_avoiding("_t", free_vars(thenb));
      auto xr = fresh_avoiding("_f", free_vars(elseb));
      return Comp::casesum(cond, xl, thenb, xr, elseb);
    }
    case CompKind::CaseList: {
      auto scrut = dv(m->v1);
      auto nilb = dc(m->nil_body);
      auto consb = dc(m->cons_body);
      std::set<std::string> taken = free_vars(nilb);
      auto fcons = free_vars(consb);
      taken.insert(fcons.begin(), fcons.end());
      taken.insert(m->var);
      taken.insert(m->var2);
      auto z = fresh_avoiding("_z", taken);
      taken.insert(z);
      auto w = fresh_avoiding("_u", taken);
      taken.insert(w);
      auto p = fresh_avoiding("_p", taken);
      return Comp::let(
          z, Comp::unroll(scrut),
          Comp::casesum(Value::mkvar(z), w, nilb, p,
                        Comp::letpair(m->var, m->var2, Value::mkvar(p), consb)));
    }
    case CompKind::App: return Comp::app(dv(m->v1), dv(m->v2));
    case CompKind::Return: return Comp::ret(dv(m->v1));
    case CompKind::Let: return Comp::let(m->var, dc(m->m1), dc(m->m2));
    case CompKind::LetPair: return Comp::letpair(m->var, m->var2, dv(m->v1), dc(m->m1));
    case CompKind::CaseSum:
      return Comp::casesum(dv(m->v1), m->var, dc(m->m1), m->var2, dc(m->m2));
    case CompKind::CaseVariant: {
      std::vector<VariantArm> arms;
      for (const auto& arm : m->arms) arms.push_back({arm.label, arm.var, dc(arm.body)});
      return Comp::casevariant(dv(m->v1), std::move(arms));
    }
    case CompKind::Unroll: return Comp::unroll(dv(m->v1));
    case CompKind::Give: return Comp::give(dv(m->v1), dv(m->v2));
    case CompKind::Take: return Comp::take(dv(m->v1));
    case CompKind::Fork: return Comp::fork(dc(m->m1));
    case CompKind::NewCh: return m;
    case CompKind::Choose: return Comp::choose(dv(m->v1), dv(m->v2));
    case CompKind::Spawn:
      return m->ann2 ? Comp::spawn2(m->ann, m->ann2, dc(m->m1)) : Comp::spawn(m->ann, dc(m->m1));
    case CompKind::Send: return Comp::send(dv(m->v1), dv(m->v2));
    case CompKind::Receive:
    case CompKind::SelfPid: return m;
    case CompKind::Wait: return Comp::wait(dv(m->v1));
    case CompKind::SelRecv: {
      std::vector<ReceiveArm> arms;
      for (const auto& arm : m->rarms)
        arms.push_back({arm.label, arm.var, dc(arm.guard), dc(arm.body)});
      return Comp::selrecv(std::move(arms));
    }
    case CompKind::Neg: return Comp::neg(dv(m->v1));
    case CompKind::Add: return Comp::add(dv(m->v1), dv(m->v2));
    case CompKind::Gt: return Comp::gt(dv(m->v1), dv(m->v2));
    case CompKind::Concat: return Comp::concat(dv(m->v1), dv(m->v2));
  }
  return m;
}

namespace {
bool sugar_value(const ValuePtr& v);

bool sugar_comp(const CompPtr& m) {
  if (!m) return false;
  switch (m->kind) {
    case CompKind::Seq:
    case CompKind::CaseList:
    case CompKind::LetVal:
    case CompKind::If:
      return true;
    default: break;
  }
  if (sugar_value(m->v1) || sugar_value(m->v2)) return true;
  if (sugar_comp(m->m1) || sugar_comp(m->m2)) return true;
  if (sugar_comp(m->nil_body) || sugar_comp(m->cons_body)) return true;
  for (const auto& arm : m->arms)
    if (sugar_comp(arm.body)) return true;
  for (const auto& arm : m->rarms)
    if (sugar_comp(arm.guard) || sugar_comp(arm.body)) return true;
  return false;
}

bool sugar_value(const ValuePtr& v) {
  if (!v) return false;
  if (v->kind == ValKind::Nil || v->kind == ValKind::Cons || v->kind == ValKind::BoolLit)
    return true;
  return sugar_value(v->v1) || sugar_value(v->v2) || sugar_comp(v->body);
}
}  // namespace

bool has_sugar(const CompPtr& m) { return sugar_comp(m); }

// ------------------------------
// value helpers
// ------------------------------

ValuePtr strip_ascribe(const ValuePtr& v) {
  auto w = v;
  while (w && w->kind == ValKind::Ascribe) w = w->v1;
  return w;
}

std::optional<ListView> as_list(const ValuePtr& v) {
  ListView out;
  if (v && v->kind == ValKind::Ascribe && list_elem_type(v->ty)) out.ann = v->ty;
  ValuePtr cur = v;
  while (true) {
    cur = strip_ascribe(cur);
    if (!cur || cur->kind != ValKind::Roll) return std::nullopt;
    auto inner = strip_ascribe(cur->v1);
    if (!inner) return std::nullopt;
    if (inner->kind == ValKind::Inl) return out;
    if (inner->kind != ValKind::Inr) return std::nullopt;
    auto p = strip_ascribe(inner->v1);
    if (!p || p->kind != ValKind::Pair) return std::nullopt;
    out.items.push_back(p->v1);
    cur = p->v2;
  }
}

ValuePtr make_list(const std::vector<ValuePtr>& items, const TypePtr& ann) {
  auto wrap = [&](ValuePtr raw) { return ann ? Value::ascribe(raw, ann) : raw; };
  ValuePtr acc = wrap(Value::roll(Value::inl(Value::unit())));
  for (auto it = items.rbegin(); it != items.rend(); ++it) {
    acc = wrap(Value::roll(Value::inr(Value::pair(*it, acc))));
  }
  return acc;
}

std::optional<bool> as_bool(const ValuePtr& v) {
  auto w = strip_ascribe(v);
  if (!w) return std::nullopt;
  if (w->kind == ValKind::Inl) return true;
  if (w->kind == ValKind::Inr) return false;
  return std::nullopt;
}

namespace {
bool pure_value(const ValuePtr& v);

bool pure_comp(const CompPtr& m) {
  if (!m) return true;
  switch (m->kind) {
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
      return false;
    default: break;
  }
  if (!pure_value(m->v1) || !pure_value(m->v2)) return false;
  if (!pure_comp(m->m1) || !pure_comp(m->m2)) return false;
  if (!pure_comp(m->nil_body) || !pure_comp(m->cons_body)) return false;
  for (const auto& arm : m->arms)
    if (!pure_comp(arm.body)) return false;
  for (const auto& arm : m->rarms)
    if (!pure_comp(arm.guard) || !pure_comp(arm.body)) return false;
  return true;
}

bool pure_value(const ValuePtr& v) {
  if (!v) return true;
  return pure_value(v->v1) && pure_value(v->v2) && pure_comp(v->body);
}
}  // namespace

bool is_pure(const CompPtr& m) { return pure_comp(m); }

}  // namespace mm
