#ifndef MM_TESTS_ORACLES_HPP
#define MM_TESTS_ORACLES_HPP

// Test-side oracles, written independently of the library code paths they
// cross-check.

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mm/ast.hpp"

namespace mmtest {

// A direct de Bruijn rendering of terms: binders become indices, so two
// terms are alpha-equivalent exactly when their renderings coincide.
struct DeBruijn {
  std::vector<std::string> env;
  std::ostringstream os;

  void var(const std::string& x) {
    for (std::size_t i = env.size(); i-- > 0;) {
      if (env[i] == x) {
        os << "!" << (env.size() - 1 - i);
        return;
      }
    }
    os << "free:" << x;
  }

  template <typename F>
  void bind(std::initializer_list<std::string> xs, F&& f) {
    for (const auto& x : xs) env.push_back(x);
    f();
    env.resize(env.size() - xs.size());
  }

  void type(const mm::TypePtr& t) {
    using mm::TypeKind;
    if (!t) {
      os << "(null)";
      return;
    }
    switch (t->kind) {
      case TypeKind::Unit: os << "1"; return;
      case TypeKind::Int: os << "int"; return;
      case TypeKind::Fun:
        os << "(fn ";
        type(t->arg);
        if (t->eff) {
          os << " eff ";
          type(t->eff->mailbox);
          if (t->eff->result) {
            os << " ";
            type(t->eff->result);
          }
        }
        os << " ";
        type(t->ret);
        os << ")";
        return;
      case TypeKind::Chan:
        os << "(chan ";
        type(t->carried);
        os << ")";
        return;
      case TypeKind::Actor:
        os << "(actor ";
        type(t->carried);
        os << ")";
        return;
      case TypeKind::Actor2:
        os << "(actor2 ";
        type(t->carried);
        os << " ";
        type(t->result);
        os << ")";
        return;
      case TypeKind::Prod:
        os << "(prod ";
        type(t->left);
        os << " ";
        type(t->right);
        os << ")";
        return;
      case TypeKind::Sum:
        os << "(sum ";
        type(t->left);
        os << " ";
        type(t->right);
        os << ")";
        return;
      case TypeKind::Variant: {
        os << "(variant";
        for (const auto& [l, lt] : t->labels) {
          os << " " << l << ":";
          type(lt);
        }
        os << ")";
        return;
      }
      case TypeKind::Mu:
        os << "(mu ";
        bind({t->var}, [&] { type(t->body); });
        os << ")";
        return;
      case TypeKind::Var:
        var(t->var);
        return;
    }
  }

  void value(const mm::ValuePtr& v) {
    using mm::ValKind;
    if (!v) {
      os << "(null)";
      return;
    }
    switch (v->kind) {
      case ValKind::Var: var(v->name); return;
      case ValKind::Name: os << "name:" << v->name; return;
      case ValKind::Unit: os << "unit"; return;
      case ValKind::Int: os << "i" << v->intval; return;
      case ValKind::Error: os << "err"; return;
      case ValKind::Nil: os << "nil"; return;
      case ValKind::BoolLit: os << (v->boolval ? "tt" : "ff"); return;
      case ValKind::Lam:
        os << "(lam ";
        type(v->ty);
        if (v->eff) {
          os << " eff ";
          type(v->eff->mailbox);
          if (v->eff->result) type(v->eff->result);
        }
        os << " ";
        bind({v->var}, [&] { comp(v->body); });
        os << ")";
        return;
      case ValKind::Rec:
        os << "(rec ";
        type(v->ty);
        os << " ";
        type(v->ret);
        if (v->eff) {
          os << " eff ";
          type(v->eff->mailbox);
          if (v->eff->result) type(v->eff->result);
        }
        os << " ";
        bind({v->fname, v->var}, [&] { comp(v->body); });
        os << ")";
        return;
      case ValKind::Pair:
        os << "(pair ";
        value(v->v1);
        os << " ";
        value(v->v2);
        os << ")";
        return;
      case ValKind::Cons:
        os << "(cons ";
        value(v->v1);
        os << " ";
        value(v->v2);
        os << ")";
        return;
      case ValKind::Inl:
        os << "(inl ";
        value(v->v1);
        os << ")";
        return;
      case ValKind::Inr:
        os << "(inr ";
        value(v->v1);
        os << ")";
        return;
      case ValKind::Variant:
        os << "(tag " << v->label << " ";
        value(v->v1);
        os << ")";
        return;
      case ValKind::Roll:
        os << "(roll ";
        value(v->v1);
        os << ")";
        return;
      case ValKind::Ascribe:
        os << "(asc ";
        value(v->v1);
        os << " ";
        type(v->ty);
        os << ")";
        return;
    }
  }

  void comp(const mm::CompPtr& m) {
    using mm::CompKind;
    if (!m) {
      os << "(null)";
      return;
    }
    auto two = [&](const char* tag) {
      os << "(" << tag << " ";
      value(m->v1);
      os << " ";
      value(m->v2);
      os << ")";
    };
    auto one = [&](const char* tag) {
      os << "(" << tag << " ";
      value(m->v1);
      os << ")";
    };
    switch (m->kind) {
      case CompKind::App: two("app"); return;
      case CompKind::Return: one("ret"); return;
      case CompKind::Let:
        os << "(let ";
        comp(m->m1);
        os << " ";
        bind({m->var}, [&] { comp(m->m2); });
        os << ")";
        return;
      case CompKind::LetPair:
        os << "(letp ";
        value(m->v1);
        os << " ";
        bind({m->var, m->var2}, [&] { comp(m->m1); });
        os << ")";
        return;
      case CompKind::CaseSum:
        os << "(case ";
        value(m->v1);
        os << " ";
        bind({m->var}, [&] { comp(m->m1); });
        os << " ";
        bind({m->var2}, [&] { comp(m->m2); });
        os << ")";
        return;
      case CompKind::CaseVariant: {
        os << "(casev ";
        value(m->v1);
        for (const auto& arm : m->arms) {
          os << " " << arm.label << "=>";
          bind({arm.var}, [&] { comp(arm.body); });
        }
        os << ")";
        return;
      }
      case CompKind::Unroll: one("unroll"); return;
      case CompKind::Give: two("give"); return;
      case CompKind::Take: one("take"); return;
      case CompKind::Fork:
        os << "(fork ";
        comp(m->m1);
        os << ")";
        return;
      case CompKind::NewCh:
        os << "(newch ";
        type(m->ann);
        os << ")";
        return;
      case CompKind::Choose: two("choose"); return;
      case CompKind::Spawn:
        os << "(spawn ";
        type(m->ann);
        if (m->ann2) {
          os << " ";
          type(m->ann2);
        }
        os << " ";
        comp(m->m1);
        os << ")";
        return;
      case CompKind::Send: two("send"); return;
      case CompKind::Receive: os << "recv"; return;
      case CompKind::SelfPid: os << "self"; return;
      case CompKind::Wait: one("wait"); return;
      case CompKind::SelRecv: {
        os << "(selrecv";
        for (const auto& arm : m->rarms) {
          os << " " << arm.label << "=>";
          bind({arm.var}, [&] {
            comp(arm.guard);
            os << "->";
            comp(arm.body);
          });
        }
        os << ")";
        return;
      }
      case CompKind::Neg: one("neg"); return;
      case CompKind::Add: two("add"); return;
      case CompKind::Gt: two("gt"); return;
      case CompKind::Concat: two("concat"); return;
      case CompKind::Seq:
        os << "(seq ";
        comp(m->m1);
        os << " ";
        comp(m->m2);
        os << ")";
        return;
      case CompKind::CaseList:
        os << "(casel ";
        value(m->v1);
        os << " ";
        comp(m->nil_body);
        os << " ";
        bind({m->var, m->var2}, [&] { comp(m->cons_body); });
        os << ")";
        return;
      case CompKind::LetVal:
        os << "(letv ";
        value(m->v1);
        os << " ";
        bind({m->var}, [&] { comp(m->m1); });
        os << ")";
        return;
      case CompKind::If:
        os << "(if ";
        value(m->v1);
        os << " ";
        comp(m->m1);
        os << " ";
        comp(m->m2);
        os << ")";
        return;
    }
  }
};

inline std::string db_comp(const mm::CompPtr& m) {
  DeBruijn d;
  d.comp(m);
  return d.os.str();
}

inline std::string db_value(const mm::ValuePtr& v) {
  DeBruijn d;
  d.value(v);
  return d.os.str();
}

}  // namespace mmtest

#endif
