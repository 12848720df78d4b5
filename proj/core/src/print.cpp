#include <functional>
#include <sstream>

#include "mm/ops.hpp"

namespace mm {

namespace {

// Value levels: 0 cons, 1 atom-with-prefix (inl V, roll V), 2 atom.
// Comp levels: 0 seq, 1 single.
struct Printer {
  std::ostringstream os;
  bool canonical;
  std::vector<std::string> env;  // bound term variables, innermost last

  explicit Printer(bool canon) : canonical(canon) {}

  void var_ref(const std::string& x) {
    if (canonical) {
      for (std::size_t i = env.size(); i-- > 0;) {
        if (env[i] == x) {
          os << "$" << i;
          return;
        }
      }
    }
    os << x;
  }

  void type(const TypePtr& t) { os << (canonical ? canonical_type(t) : print_type(t)); }

  void eff(const std::optional<Effect>& e) {
    if (!e) {
      os << " -> ";
      return;
    }
    os << " -[";
    type(e->mailbox);
    if (e->result) {
      os << ", ";
      type(e->result);
    }
    os << "]-> ";
  }

  template <typename F>
  void scoped(std::vector<std::string> binders, F&& f) {
    for (auto& b : binders) env.push_back(b);
    f();
    env.resize(env.size() - binders.size());
  }

  void binder(const std::string& x) {
    if (canonical) {
      os << "$" << env.size();  // matches the index var_ref will use
    } else {
      os << x;
    }
  }

  void value(const ValuePtr& v, int level) {
    if (!v) {
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
    switch (v->kind) {
      case ValKind::Var:
        var_ref(v->name);
        return;
      case ValKind::Name:
        os << "@" << v->name;
        return;
      case ValKind::Unit:
        os << "()";
        return;
      case ValKind::Int:
        os << v->intval;
        return;
      case ValKind::Error:
        os << "error";
        return;
      case ValKind::Nil:
        os << "[]";
        return;
      case ValKind::BoolLit:
        os << (v->boolval ? "true" : "false");
        return;
      case ValKind::Cons:
        paren(0, [&] {
          value(v->v1, 1);
          os << " :: ";
          value(v->v2, 0);
        });
        return;
      case ValKind::Pair:
        os << "(";
        value(v->v1, 0);
        os << ", ";
        value(v->v2, 0);
        os << ")";
        return;
      case ValKind::Ascribe:
        os << "(";
        value(v->v1, 0);
        os << " : ";
        type(v->ty);
        os << ")";
        return;
      case ValKind::Inl:
        paren(1, [&] {
          os << "inl ";
          value(v->v1, 2);
        });
        return;
      case ValKind::Inr:
        paren(1, [&] {
          os << "inr ";
          value(v->v1, 2);
        });
        return;
      case ValKind::Roll:
        paren(1, [&] {
          os << "roll ";
          value(v->v1, 2);
        });
        return;
      case ValKind::Variant:
        os << "<" << v->label << " = ";
        value(v->v1, 0);
        os << ">";
        return;
      case ValKind::Lam:
        paren(1, [&] {
          os << "fun(";
          binder(v->var);
          os << ": ";
          type(v->ty);
          os << ")";
          eff(v->eff);
          scoped({v->var}, [&] { comp(v->body, 0); });
        });
        return;
      case ValKind::Rec:
        paren(1, [&] {
          os << "rec ";
          binder(v->fname);
          scoped({v->fname}, [&] {
            os << "(";
            binder(v->var);
            os << ": ";
            type(v->ty);
            os << "): ";
            type(v->ret);
            eff(v->eff);
            scoped({v->var}, [&] { comp(v->body, 0); });
          });
        });
        return;
    }
  }

  // Right-open forms swallow a following ';' unless parenthesized.
  static bool right_open(const CompPtr& m) {
    switch (m->kind) {
      case CompKind::Let:
      case CompKind::LetPair:
      case CompKind::LetVal:
      case CompKind::If:
        return true;
      default:
        return false;
    }
  }

  void comp(const CompPtr& m, int level) {
    if (!m) {
      os << "?";
      return;
    }
    if (m->kind == CompKind::Seq) {
      if (level > 0) os << "(";
      bool lp = right_open(m->m1);
      if (lp) os << "(";
      comp(m->m1, 1);
      if (lp) os << ")";
      os << "; ";
      comp(m->m2, 0);
      if (level > 0) os << ")";
      return;
    }
    switch (m->kind) {
      case CompKind::App:
        value(m->v1, 2);
        os << " ";
        value(m->v2, 2);
        return;
      case CompKind::Return:
        os << "return ";
        value(m->v1, 1);
        return;
      case CompKind::Let:
        os << "let ";
        binder(m->var);
        os << " <= ";
        comp(m->m1, 1);
        os << " in ";
        scoped({m->var}, [&] { comp(m->m2, 0); });
        return;
      case CompKind::LetPair:
        os << "let (";
        binder(m->var);
        os << ", ";
        scoped({m->var}, [&] { binder(m->var2); });
        os << ") = ";
        value(m->v1, 0);
        os << " in ";
        scoped({m->var, m->var2}, [&] { comp(m->m1, 0); });
        return;
      case CompKind::LetVal:
        os << "let ";
        binder(m->var);
        os << " = ";
        value(m->v1, 0);
        os << " in ";
        scoped({m->var}, [&] { comp(m->m1, 0); });
        return;
      case CompKind::CaseSum:
        os << "case ";
        value(m->v1, 1);
        os << " { inl ";
        binder(m->var);
        os << " -> ";
        scoped({m->var}, [&] { comp(m->m1, 0); });
        os << " | inr ";
        binder(m->var2);
        os << " -> ";
        scoped({m->var2}, [&] { comp(m->m2, 0); });
        os << " }";
        return;
      case CompKind::CaseVariant: {
        os << "case ";
        value(m->v1, 1);
        os << " { ";
        bool first = true;
        for (const auto& arm : m->arms) {
          if (!first) os << " | ";
          first = false;
          os << "<" << arm.label << " = ";
          binder(arm.var);
          os << "> -> ";
          scoped({arm.var}, [&] { comp(arm.body, 0); });
        }
        os << " }";
        return;
      }
      case CompKind::CaseList:
        os << "case ";
        value(m->v1, 1);
        os << " { [] -> ";
        comp(m->nil_body, 0);
        os << " | ";
        binder(m->var);
        os << " :: ";
        scoped({m->var}, [&] { binder(m->var2); });
        os << " -> ";
        scoped({m->var, m->var2}, [&] { comp(m->cons_body, 0); });
        os << " }";
        return;
      case CompKind::If: {
        os << "if ";
        value(m->v1, 1);
        os << " then ";
        bool lp = right_open(m->m1) || m->m1->kind == CompKind::Seq;
        if (lp) os << "(";
        comp(m->m1, 1);
        if (lp) os << ")";
        os << " else ";
        comp(m->m2, 1);
        return;
      }
      case CompKind::Unroll:
        os << "unroll ";
        value(m->v1, 2);
        return;
      case CompKind::Give:
        os << "give ";
        value(m->v1, 2);
        os << " ";
        value(m->v2, 2);
        return;
      case CompKind::Take:
        os << "take ";
        value(m->v1, 2);
        return;
      case CompKind::Fork:
        os << "fork (";
        comp(m->m1, 0);
        os << ")";
        return;
      case CompKind::NewCh:
        os << "newCh[";
        type(m->ann);
        os << "]";
        return;
      case CompKind::Choose:
        os << "choose ";
        value(m->v1, 2);
        os << " ";
        value(m->v2, 2);
        return;
      case CompKind::Spawn:
        os << "spawn[";
        type(m->ann);
        if (m->ann2) {
          os << ", ";
          type(m->ann2);
        }
        os << "] (";
        comp(m->m1, 0);
        os << ")";
        return;
      case CompKind::Send:
        os << "send ";
        value(m->v1, 2);
        os << " ";
        value(m->v2, 2);
        return;
      case CompKind::Receive:
        os << "receive";
        return;
      case CompKind::SelfPid:
        os << "self";
        return;
      case CompKind::Wait:
        os << "wait ";
        value(m->v1, 2);
        return;
      case CompKind::SelRecv: {
        os << "receive { ";
        bool first = true;
        for (const auto& arm : m->rarms) {
          if (!first) os << ", ";
          first = false;
          os << "<" << arm.label << " = ";
          binder(arm.var);
          os << "> when ";
          scoped({arm.var}, [&] {
            comp(arm.guard, 1);
            os << " -> ";
            comp(arm.body, 1);
          });
        }
        os << " }";
        return;
      }
      case CompKind::Neg:
        os << "neg ";
        value(m->v1, 2);
        return;
      case CompKind::Add:
        os << "add ";
        value(m->v1, 2);
        os << " ";
        value(m->v2, 2);
        return;
      case CompKind::Gt:
        os << "gt ";
        value(m->v1, 2);
        os << " ";
        value(m->v2, 2);
        return;
      case CompKind::Concat:
        os << "concat ";
        value(m->v1, 2);
        os << " ";
        value(m->v2, 2);
        return;
      case CompKind::Seq:
        return;  // handled above
    }
  }
};

}  // namespace

std::string print_value(const ValuePtr& v) {
  Printer p(false);
  p.value(v, 0);
  return p.os.str();
}

std::string print_comp(const CompPtr& m) {
  Printer p(false);
  p.comp(m, 0);
  return p.os.str();
}

std::string canonical_value(const ValuePtr& v) {
  Printer p(true);
  p.value(v, 0);
  return p.os.str();
}

std::string canonical_comp(const CompPtr& m) {
  Printer p(true);
  p.comp(m, 0);
  return p.os.str();
}

}  // namespace mm
