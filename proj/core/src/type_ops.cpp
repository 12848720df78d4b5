#include <functional>
#include <sstream>

#include "mm/ops.hpp"

namespace mm {

namespace {

struct TAlphaEnv {
  std::vector<std::pair<std::string, std::string>> pairs;
};

bool teq(const TypePtr& a, const TypePtr& b, TAlphaEnv& env) {
  if (a == b && env.pairs.empty()) return true;
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TypeKind::Unit:
    case TypeKind::Int:
      return true;
    case TypeKind::Fun: {
      if (a->eff.has_value() != b->eff.has_value()) return false;
      if (a->eff) {
        if (!teq(a->eff->mailbox, b->eff->mailbox, env)) return false;
        if ((a->eff->result == nullptr) != (b->eff->result == nullptr)) return false;
        if (a->eff->result && !teq(a->eff->result, b->eff->result, env)) return false;
      }
      return teq(a->arg, b->arg, env) && teq(a->ret, b->ret, env);
    }
    case TypeKind::Chan:
    case TypeKind::Actor:
      return teq(a->carried, b->carried, env);
    case TypeKind::Actor2:
      return teq(a->carried, b->carried, env) && teq(a->result, b->result, env);
    case TypeKind::Prod:
    case TypeKind::Sum:
      return teq(a->left, b->left, env) && teq(a->right, b->right, env);
    case TypeKind::Variant: {
      if (a->labels.size() != b->labels.size()) return false;
      for (std::size_t i = 0; i < a->labels.size(); i++) {
        if (a->labels[i].first != b->labels[i].first) return false;
        if (!teq(a->labels[i].second, b->labels[i].second, env)) return false;
      }
      return true;
    }
    case TypeKind::Mu: {
      env.pairs.emplace_back(a->var, b->var);
      bool ok = teq(a->body, b->body, env);
      env.pairs.pop_back();
      return ok;
    }
    case TypeKind::Var: {
      for (auto it = env.pairs.rbegin(); it != env.pairs.rend(); ++it) {
        if (it->first == a->var || it->second == b->var)
          return it->first == a->var && it->second == b->var;
      }
      return a->var == b->var;
    }
  }
  return false;
}

std::set<std::string> free_tvars(const TypePtr& t) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  std::function<void(const TypePtr&)> go = [&](const TypePtr& u) {
    if (!u) return;
    switch (u->kind) {
      case TypeKind::Var:
        for (auto it = bound.rbegin(); it != bound.rend(); ++it)
          if (*it == u->var) return;
        out.insert(u->var);
        return;
      case TypeKind::Mu:
        bound.push_back(u->var);
        go(u->body);
        bound.pop_back();
        return;
      default: break;
    }
    go(u->arg);
    go(u->ret);
    if (u->eff) {
      go(u->eff->mailbox);
      go(u->eff->result);
    }
    go(u->carried);
    go(u->result);
    go(u->left);
    go(u->right);
    go(u->body);
    for (const auto& [l, lt] : u->labels) go(lt);
  };
  go(t);
  return out;
}

}  // namespace

bool types_equal(const TypePtr& a, const TypePtr& b) {
  TAlphaEnv env;
  return teq(a, b, env);
}

TypePtr subst_type(const TypePtr& body, const std::string& var, const TypePtr& replacement) {
  if (!body) return body;
  switch (body->kind) {
    case TypeKind::Unit:
    case TypeKind::Int:
      return body;
    case TypeKind::Var:
      return body->var == var ? replacement : body;
    case TypeKind::Mu: {
      if (body->var == var) return body;
      std::string x = body->var;
      TypePtr inner = body->body;
      auto fv = free_tvars(replacement);
      if (fv.count(x)) {
        std::string x2 = x;
        auto fvb = free_tvars(inner);
        do {
          x2 += "'";
        } while (fv.count(x2) || fvb.count(x2));
        inner = subst_type(inner, x, Type::tvar(x2));
        x = x2;
      }
      return Type::mu(x, subst_type(inner, var, replacement));
    }
    case TypeKind::Fun: {
      auto a = subst_type(body->arg, var, replacement);
      auto r = subst_type(body->ret, var, replacement);
      if (body->eff) {
        Effect e;
        e.mailbox = subst_type(body->eff->mailbox, var, replacement);
        e.result = body->eff->result ? subst_type(body->eff->result, var, replacement) : nullptr;
        return Type::fun(a, e, r);
      }
      return Type::fun(a, r);
    }
    case TypeKind::Chan: return Type::chan(subst_type(body->carried, var, replacement));
    case TypeKind::Actor: return Type::actor(subst_type(body->carried, var, replacement));
    case TypeKind::Actor2:
      return Type::actor2(subst_type(body->carried, var, replacement),
                          subst_type(body->result, var, replacement));
    case TypeKind::Prod:
      return Type::prod(subst_type(body->left, var, replacement),
                        subst_type(body->right, var, replacement));
    case TypeKind::Sum:
      return Type::sum(subst_type(body->left, var, replacement),
                       subst_type(body->right, var, replacement));
    case TypeKind::Variant: {
      std::vector<std::pair<std::string, TypePtr>> ls;
      ls.reserve(body->labels.size());
      for (const auto& [l, lt] : body->labels) ls.emplace_back(l, subst_type(lt, var, replacement));
      return Type::variant(std::move(ls));
    }
  }
  return body;
}

TypePtr list_elem_type(const TypePtr& t) {
  if (!t || t->kind != TypeKind::Mu) return nullptr;
  const auto& b = t->body;
  if (!b || b->kind != TypeKind::Sum) return nullptr;
  if (!b->left || b->left->kind != TypeKind::Unit) return nullptr;
  if (!b->right || b->right->kind != TypeKind::Prod) return nullptr;
  const auto& tail = b->right->right;
  if (!tail || tail->kind != TypeKind::Var || tail->var != t->var) return nullptr;
  return b->right->left;
}

// ------------------------------
// printing
// ------------------------------

namespace {

// levels: 0 arrow/mu, 1 sum, 2 prod, 3 atom
void pt(std::ostringstream& os, const TypePtr& t, int level, std::vector<std::string>* mu_env) {
  if (!t) {
    os << "?";
    return;
  }
  auto paren = [&](int mine, auto&& body) {
    if (mine < level) {
      os << "(";
      body();
      os << ")";
    } else {
      body();
    }
  };
  switch (t->kind) {
    case TypeKind::Unit: os << "1"; return;
    case TypeKind::Int: os << "Int"; return;
    case TypeKind::Fun:
      paren(0, [&] {
        pt(os, t->arg, 1, mu_env);
        if (t->eff) {
          os << " -[";
          pt(os, t->eff->mailbox, 0, mu_env);
          if (t->eff->result) {
            os << ", ";
            pt(os, t->eff->result, 0, mu_env);
          }
          os << "]-> ";
        } else {
          os << " -> ";
        }
        pt(os, t->ret, 0, mu_env);
      });
      return;
    case TypeKind::Chan:
      os << "ChanRef(";
      pt(os, t->carried, 0, mu_env);
      os << ")";
      return;
    case TypeKind::Actor:
      os << "ActorRef(";
      pt(os, t->carried, 0, mu_env);
      os << ")";
      return;
    case TypeKind::Actor2:
      os << "ActorRef(";
      pt(os, t->carried, 0, mu_env);
      os << ", ";
      pt(os, t->result, 0, mu_env);
      os << ")";
      return;
    case TypeKind::Prod:
      paren(2, [&] {
        pt(os, t->left, 3, mu_env);
        os << " * ";
        pt(os, t->right, 3, mu_env);
      });
      return;
    case TypeKind::Sum:
      paren(1, [&] {
        pt(os, t->left, 2, mu_env);
        os << " + ";
        pt(os, t->right, 2, mu_env);
      });
      return;
    case TypeKind::Variant: {
      os << "<";
      bool first = true;
      for (const auto& [l, lt] : t->labels) {
        if (!first) os << ", ";
        first = false;
        os << l << ": ";
        pt(os, lt, 0, mu_env);
      }
      os << ">";
      return;
    }
    case TypeKind::Mu:
      paren(0, [&] {
        if (mu_env) {
          mu_env->push_back(t->var);
          os << "mu %" << (mu_env->size() - 1) << ". ";
          pt(os, t->body, 0, mu_env);
          mu_env->pop_back();
        } else {
          os << "mu " << t->var << ". ";
          pt(os, t->body, 0, mu_env);
        }
      });
      return;
    case TypeKind::Var: {
      if (mu_env) {
        for (std::size_t i = mu_env->size(); i-- > 0;) {
          if ((*mu_env)[i] == t->var) {
            os << "%" << i;
            return;
          }
        }
      }
      os << t->var;
      return;
    }
  }
}

}  // namespace

std::string print_type(const TypePtr& t) {
  std::ostringstream os;
  pt(os, t, 0, nullptr);
  return os.str();
}

std::string canonical_type(const TypePtr& t) {
  std::ostringstream os;
  std::vector<std::string> env;
  pt(os, t, 0, &env);
  return os.str();
}

}  // namespace mm
