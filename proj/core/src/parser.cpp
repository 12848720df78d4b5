#include "mm/parser.hpp"

#include <cctype>
#include <set>

#include "mm/ops.hpp"

namespace mm {

namespace {

enum class Tok { Ident, Name, Int, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  std::int64_t value = 0;
  int line = 1, col = 1;
};

const std::set<std::string> kKeywords = {
    "let",  "in",   "return", "fun",    "rec",  "give",   "take", "fork",  "newCh",
    "choose", "spawn", "send", "receive", "self", "wait",  "case", "inl",  "inr",
    "roll", "unroll", "true",  "false",  "error", "if",    "then", "else", "when",
    "neg",  "add",  "gt",     "concat", "def",  "main",   "mu",   "Int",  "Bool",
    "List", "ChanRef", "ActorRef"};

struct Lexer {
  std::string src;
  std::size_t pos = 0;
  int line = 1, col = 1;
  std::vector<Token> toks;

  explicit Lexer(std::string s) : src(std::move(s)) { run(); }

  [[noreturn]] void err(const std::string& msg) { throw ParseError(msg, line, col); }

  char peek(std::size_t off = 0) const {
    return pos + off < src.size() ? src[pos + off] : '\0';
  }
  char advance() {
    char c = src[pos++];
    if (c == '\n') {
      line++;
      col = 1;
    } else {
      col++;
    }
    return c;
  }
  void push(Tok k, std::string text, std::int64_t v = 0) {
    toks.push_back({k, std::move(text), v, line, col});
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  std::string lex_ident() {
    std::string s;
    s += advance();
    while (ident_char(peek())) s += advance();
    return s;
  }

  void run() {
    while (pos < src.size()) {
      char c = peek();
      if (c == '#') {
        while (pos < src.size() && peek() != '\n') advance();
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      int l = line, co = col;
      auto record = [&](Tok k, std::string text, std::int64_t v = 0) {
        toks.push_back({k, std::move(text), v, l, co});
      };
      if (ident_start(c)) {
        record(Tok::Ident, lex_ident());
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string n;
        while (std::isdigit(static_cast<unsigned char>(peek()))) n += advance();
        record(Tok::Int, n, std::stoll(n));
        continue;
      }
      if (c == '@') {
        advance();
        if (!ident_start(peek())) err("expected a name after '@'");
        record(Tok::Name, lex_ident());
        continue;
      }
      if (c == '-') {
        if (peek(1) == '>') {
          advance();
          advance();
          record(Tok::Punct, "->");
          continue;
        }
        if (peek(1) == '[') {
          advance();
          advance();
          record(Tok::Punct, "-[");
          continue;
        }
        if (std::isdigit(static_cast<unsigned char>(peek(1)))) {
          advance();
          std::string n = "-";
          while (std::isdigit(static_cast<unsigned char>(peek()))) n += advance();
          record(Tok::Int, n, std::stoll(n));
          continue;
        }
        err("stray '-'");
      }
      if (c == ']') {
        if (peek(1) == '-' && peek(2) == '>') {
          advance();
          advance();
          advance();
          record(Tok::Punct, "]->");
          continue;
        }
        advance();
        record(Tok::Punct, "]");
        continue;
      }
      if (c == ':') {
        advance();
        if (peek() == ':') {
          advance();
          record(Tok::Punct, "::");
        } else {
          record(Tok::Punct, ":");
        }
        continue;
      }
      if (c == '<') {
        advance();
        if (peek() == '=') {
          advance();
          record(Tok::Punct, "<=");
        } else {
          record(Tok::Punct, "<");
        }
        continue;
      }
      std::string single(1, c);
      if (std::string("(){}[]>,;=|*+.").find(c) != std::string::npos) {
        advance();
        record(Tok::Punct, single);
        continue;
      }
      err("unsupported character '" + single + "'");
    }
    push(Tok::End, "");
  }
};

struct Parser {
  std::vector<Token> toks;
  std::size_t idx = 0;
  std::uint64_t max_fresh = 0;

  explicit Parser(const std::string& text) {
    Lexer lx(text);
    toks = std::move(lx.toks);
    for (const auto& t : toks) {
      if (t.kind == Tok::Ident && t.text.size() > 1 && t.text[0] == '_') {
        bool digits = true;
        for (std::size_t i = 1; i < t.text.size(); i++)
          if (!std::isdigit(static_cast<unsigned char>(t.text[i]))) digits = false;
        if (digits) {
          auto n = std::stoull(t.text.substr(1));
          if (n + 1 > max_fresh) max_fresh = n + 1;
        }
      }
    }
  }

  const Token& peek(std::size_t off = 0) const {
    return toks[std::min(idx + off, toks.size() - 1)];
  }
  [[noreturn]] void err(const std::string& msg) {
    const auto& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + ", got " + got, t.line, t.col);
  }
  bool at_punct(const std::string& p) const {
    return peek().kind == Tok::Punct && peek().text == p;
  }
  bool at_kw(const std::string& k) const {
    return peek().kind == Tok::Ident && peek().text == k;
  }
  Token take() { return toks[idx == toks.size() - 1 ? idx : idx++]; }
  void expect_punct(const std::string& p) {
    if (!at_punct(p)) err("expected '" + p + "'");
    take();
  }
  void expect_kw(const std::string& k) {
    if (!at_kw(k)) err("expected '" + k + "'");
    take();
  }
  std::string expect_ident() {
    if (peek().kind != Tok::Ident) err("expected an identifier");
    std::string s = take().text;
    if (kKeywords.count(s)) {
      idx--;
      err("keyword '" + s + "' used as an identifier");
    }
    return s;
  }

  // ---------------- types ----------------

  TypePtr type() {
    auto lhs = type_sum();
    if (at_punct("->")) {
      take();
      return Type::fun(lhs, type());
    }
    if (at_punct("-[")) {
      take();
      Effect e;
      e.mailbox = type();
      if (at_punct(",")) {
        take();
        e.result = type();
      }
      expect_punct("]->");
      return Type::fun(lhs, e, type());
    }
    return lhs;
  }

  TypePtr type_sum() {
    auto lhs = type_prod();
    while (at_punct("+")) {
      take();
      lhs = Type::sum(lhs, type_prod());
    }
    return lhs;
  }

  TypePtr type_prod() {
    auto lhs = type_atom();
    while (at_punct("*")) {
      take();
      lhs = Type::prod(lhs, type_atom());
    }
    return lhs;
  }

  TypePtr type_atom() {
    if (peek().kind == Tok::Int && peek().value == 1) {
      take();
      return Type::unit();
    }
    if (at_kw("Int")) {
      take();
      return Type::integer();
    }
    if (at_kw("Bool")) {
      take();
      return Type::boolean();
    }
    if (at_kw("List")) {
      take();
      expect_punct("(");
      auto t = type();
      expect_punct(")");
      return Type::list(t);
    }
    if (at_kw("ChanRef")) {
      take();
      expect_punct("(");
      auto t = type();
      expect_punct(")");
      return Type::chan(t);
    }
    if (at_kw("ActorRef")) {
      take();
      expect_punct("(");
      auto t = type();
      if (at_punct(",")) {
        take();
        auto r = type();
        expect_punct(")");
        return Type::actor2(t, r);
      }
      expect_punct(")");
      return Type::actor(t);
    }
    if (at_kw("mu")) {
      take();
      auto x = expect_ident();
      expect_punct(".");
      return Type::mu(x, type());
    }
    if (at_punct("<")) {
      take();
      std::vector<std::pair<std::string, TypePtr>> labels;
      if (!at_punct(">")) {
        while (true) {
          auto l = expect_ident();
          expect_punct(":");
          labels.emplace_back(l, type());
          if (at_punct(",")) {
            take();
            continue;
          }
          break;
        }
      }
      expect_punct(">");
      return Type::variant(std::move(labels));
    }
    if (at_punct("(")) {
      take();
      auto t = type();
      expect_punct(")");
      return t;
    }
    if (peek().kind == Tok::Ident && !kKeywords.count(peek().text)) {
      return Type::tvar(take().text);
    }
    err("expected a type");
  }

  // ---------------- values ----------------

  bool starts_value() const {
    const auto& t = peek();
    switch (t.kind) {
      case Tok::Int:
      case Tok::Name:
        return true;
      case Tok::Ident:
        if (!kKeywords.count(t.text)) return true;
        return t.text == "fun" || t.text == "rec" || t.text == "inl" || t.text == "inr" ||
               t.text == "roll" || t.text == "true" || t.text == "false" || t.text == "error";
      case Tok::Punct:
        return t.text == "(" || t.text == "<" || t.text == "[";
      default:
        return false;
    }
  }

  // arrow after a fun/rec header; returns the effect annotation if present
  std::optional<Effect> arrow() {
    if (at_punct("->")) {
      take();
      return std::nullopt;
    }
    if (at_punct("-[")) {
      take();
      Effect e;
      e.mailbox = type();
      if (at_punct(",")) {
        take();
        e.result = type();
      }
      expect_punct("]->");
      return e;
    }
    err("expected '->' or '-[..]->'");
  }

  ValuePtr value() {
    auto v = value_prefix();
    if (at_punct("::")) {
      take();
      return Value::cons(v, value());
    }
    return v;
  }

  ValuePtr value_prefix() {
    if (at_kw("inl")) {
      take();
      return Value::inl(value_atom());
    }
    if (at_kw("inr")) {
      take();
      return Value::inr(value_atom());
    }
    if (at_kw("roll")) {
      take();
      return Value::roll(value_atom());
    }
    if (at_kw("fun")) {
      take();
      expect_punct("(");
      auto x = expect_ident();
      expect_punct(":");
      auto t = type();
      expect_punct(")");
      auto e = arrow();
      auto body = comp();
      return e ? Value::lam(x, t, *e, body) : Value::lam(x, t, body);
    }
    if (at_kw("rec")) {
      take();
      auto f = expect_ident();
      expect_punct("(");
      auto x = expect_ident();
      expect_punct(":");
      auto argt = type();
      expect_punct(")");
      expect_punct(":");
      auto rett = type_sum();  // arrow-typed results need parentheses
      auto e = arrow();
      auto body = comp();
      return e ? Value::rec(f, x, argt, rett, *e, body) : Value::rec(f, x, argt, rett, body);
    }
    return value_atom();
  }

  ValuePtr value_atom() {
    if (peek().kind == Tok::Int) return Value::integer(take().value);
    if (peek().kind == Tok::Name) return Value::mkname(take().text);
    if (at_kw("true")) {
      take();
      return Value::boollit(true);
    }
    if (at_kw("false")) {
      take();
      return Value::boollit(false);
    }
    if (at_kw("error")) {
      take();
      return Value::error();
    }
    if (at_kw("inl") || at_kw("inr") || at_kw("roll") || at_kw("fun") || at_kw("rec"))
      return value_prefix();
    if (peek().kind == Tok::Ident && !kKeywords.count(peek().text))
      return Value::mkvar(take().text);
    if (at_punct("<")) {
      take();
      auto l = expect_ident();
      expect_punct("=");
      auto v = value();
      expect_punct(">");
      return Value::variant(l, v);
    }
    if (at_punct("[")) {
      take();
      expect_punct("]");
      return Value::nil();
    }
    if (at_punct("(")) {
      take();
      if (at_punct(")")) {
        take();
        return Value::unit();
      }
      auto v = value();
      if (at_punct(",")) {
        take();
        auto w = value();
        expect_punct(")");
        return Value::pair(v, w);
      }
      if (at_punct(":")) {
        take();
        auto t = type();
        expect_punct(")");
        return Value::ascribe(v, t);
      }
      expect_punct(")");
      return v;
    }
    err("expected a value");
  }

  // ---------------- computations ----------------

  CompPtr comp() {
    auto m = comp_single();
    if (at_punct(";")) {
      take();
      return Comp::seq(m, comp());
    }
    return m;
  }

  CompPtr comp_single() {
    if (at_kw("let")) return comp_let();
    if (at_kw("return")) {
      take();
      return Comp::ret(value());
    }
    if (at_kw("case")) return comp_case();
    if (at_kw("if")) {
      take();
      auto c = value();
      expect_kw("then");
      auto m = comp_single();
      expect_kw("else");
      auto n = comp_single();
      return Comp::ifthen(c, m, n);
    }
    if (at_kw("unroll")) {
      take();
      return Comp::unroll(value_atom());
    }
    if (at_kw("give")) {
      take();
      auto v = value_atom();
      return Comp::give(v, value_atom());
    }
    if (at_kw("take")) {
      take();
      return Comp::take(value_atom());
    }
    if (at_kw("fork")) {
      take();
      expect_punct("(");
      auto m = comp();
      expect_punct(")");
      return Comp::fork(m);
    }
    if (at_kw("newCh")) {
      take();
      expect_punct("[");
      auto t = type();
      expect_punct("]");
      return Comp::newch(t);
    }
    if (at_kw("choose")) {
      take();
      auto a = value_atom();
      return Comp::choose(a, value_atom());
    }
    if (at_kw("spawn")) {
      take();
      expect_punct("[");
      auto t = type();
      TypePtr r;
      if (at_punct(",")) {
        take();
        r = type();
      }
      expect_punct("]");
      expect_punct("(");
      auto m = comp();
      expect_punct(")");
      return r ? Comp::spawn2(t, r, m) : Comp::spawn(t, m);
    }
    if (at_kw("send")) {
      take();
      auto v = value_atom();
      return Comp::send(v, value_atom());
    }
    if (at_kw("receive")) {
      take();
      if (!at_punct("{")) return Comp::receive();
      take();
      std::vector<ReceiveArm> arms;
      while (true) {
        expect_punct("<");
        auto l = expect_ident();
        expect_punct("=");
        auto x = expect_ident();
        expect_punct(">");
        expect_kw("when");
        auto g = guard();
        expect_punct("->");
        auto b = comp_single();
        arms.push_back({l, x, g, b});
        if (at_punct(",") || at_punct("|")) {
          take();
          continue;
        }
        break;
      }
      expect_punct("}");
      return Comp::selrecv(std::move(arms));
    }
    if (at_kw("self")) {
      take();
      return Comp::self();
    }
    if (at_kw("wait")) {
      take();
      return Comp::wait(value_atom());
    }
    if (at_kw("neg")) {
      take();
      return Comp::neg(value_atom());
    }
    if (at_kw("add")) {
      take();
      auto a = value_atom();
      return Comp::add(a, value_atom());
    }
    if (at_kw("gt")) {
      take();
      auto a = value_atom();
      return Comp::gt(a, value_atom());
    }
    if (at_kw("concat")) {
      take();
      auto a = value_atom();
      return Comp::concat(a, value_atom());
    }
    if (at_punct("(")) {
      // either a parenthesized computation or an application of a
      // parenthesized function value
      std::size_t save = idx;
      bool ok = true;
      ValuePtr v;
      try {
        v = value_atom();
      } catch (const ParseError&) {
        ok = false;
      }
      if (ok && starts_value()) return Comp::app(v, value_atom());
      idx = save;
      take();
      auto m = comp();
      expect_punct(")");
      return m;
    }
    if (starts_value()) {
      auto f = value_atom();
      if (!starts_value()) err("expected an argument value (a bare value is not a computation)");
      return Comp::app(f, value_atom());
    }
    err("expected a computation");
  }

  // a guard is a computation, but a bare value like `true` is accepted and
  // wrapped in a return
  CompPtr guard() {
    std::size_t save = idx;
    try {
      return comp_single();
    } catch (const ParseError&) {
      idx = save;
      return Comp::ret(value());
    }
  }

  CompPtr comp_let() {
    expect_kw("let");
    if (at_punct("(")) {
      take();
      auto x = expect_ident();
      expect_punct(",");
      auto y = expect_ident();
      expect_punct(")");
      expect_punct("=");
      auto v = value();
      expect_kw("in");
      return Comp::letpair(x, y, v, comp());
    }
    auto x = expect_ident();
    if (at_punct("<=")) {
      take();
      auto m = comp_single();
      expect_kw("in");
      return Comp::let(x, m, comp());
    }
    expect_punct("=");
    auto v = value();
    expect_kw("in");
    return Comp::letval(x, v, comp());
  }

  CompPtr comp_case() {
    expect_kw("case");
    auto scrut = value();
    expect_punct("{");
    if (at_kw("inl")) {
      take();
      auto xl = expect_ident();
      expect_punct("->");
      auto ml = comp();
      expect_punct("|");
      expect_kw("inr");
      auto xr = expect_ident();
      expect_punct("->");
      auto mr = comp();
      expect_punct("}");
      return Comp::casesum(scrut, xl, ml, xr, mr);
    }
    if (at_punct("[")) {
      take();
      expect_punct("]");
      expect_punct("->");
      auto nb = comp();
      expect_punct("|");
      auto h = expect_ident();
      expect_punct("::");
      auto t = expect_ident();
      expect_punct("->");
      auto cb = comp();
      expect_punct("}");
      return Comp::caselist(scrut, nb, h, t, cb);
    }
    std::vector<VariantArm> arms;
    while (true) {
      expect_punct("<");
      auto l = expect_ident();
      expect_punct("=");
      auto x = expect_ident();
      expect_punct(">");
      expect_punct("->");
      arms.push_back({l, x, comp()});
      if (at_punct("|")) {
        take();
        continue;
      }
      break;
    }
    expect_punct("}");
    return Comp::casevariant(scrut, std::move(arms));
  }

  // ---------------- programs ----------------

  Program program() {
    std::vector<std::pair<std::string, ValuePtr>> defs;
    while (at_kw("def")) {
      take();
      auto name = expect_ident();
      expect_punct("=");
      defs.emplace_back(name, value());
    }
    expect_kw("main");
    Program p;
    if (at_punct("[")) {
      take();
      p.has_mailbox = true;
      p.mailbox = type();
      if (at_punct(",")) {
        take();
        p.result = type();
      }
      expect_punct("]");
    }
    expect_punct("=");
    p.main = comp();
    if (peek().kind != Tok::End) err("unexpected trailing input");
    // substitute definitions, later ones may refer to earlier ones
    for (std::size_t i = defs.size(); i-- > 0;) {
      for (std::size_t j = i + 1; j < defs.size(); j++) {
        defs[j].second = subst_value(defs[j].second, defs[i].second, defs[i].first);
      }
      p.main = subst(p.main, defs[i].second, defs[i].first);
    }
    p.used_fresh = max_fresh;
    return p;
  }
};

}  // namespace

Program parse_program(const std::string& text) { return Parser(text).program(); }

TypePtr parse_type_text(const std::string& text) {
  Parser p(text);
  auto t = p.type();
  if (p.peek().kind != Tok::End) p.err("unexpected trailing input");
  return t;
}

ValuePtr parse_value_text(const std::string& text) {
  Parser p(text);
  auto v = p.value();
  if (p.peek().kind != Tok::End) p.err("unexpected trailing input");
  return v;
}

CompPtr parse_comp_text(const std::string& text) {
  Parser p(text);
  auto m = p.comp();
  if (p.peek().kind != Tok::End) p.err("unexpected trailing input");
  return m;
}

}  // namespace mm
