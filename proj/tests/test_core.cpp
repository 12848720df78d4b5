#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mm/harness.hpp"
#include "mm/ops.hpp"
#include "mm/parser.hpp"
#include "support/oracles.hpp"

using namespace mm;

namespace {
CompPtr C(const std::string& s) { return desugar(parse_comp_text(s)); }
ValuePtr V(const std::string& s) { return desugar_value(parse_value_text(s)); }
}  // namespace

TEST_CASE("substitution: direct replacement") {
  auto m = C("return x");
  auto out = subst(m, Value::unit(), "x");
  CHECK(alpha_equal(out, C("return ()")));
}

TEST_CASE("substitution: capture forces a rename") {
  // (fun y -> return x){y/x}: the binder must move out of the way
  auto m = V("fun(y: 1) -> return x");
  auto out = subst_value(m, Value::mkvar("y"), "x");
  CHECK(alpha_equal_value(out, V("fun(z: 1) -> return y")));
  CHECK_FALSE(alpha_equal_value(out, V("fun(y: 1) -> return y")));
}

TEST_CASE("substitution: recursive unfolding") {
  // (rec f(x). f x) v steps to the body with the whole function for f
  auto f = V("rec f(x: 1): 1 -> f x");
  auto app = Comp::app(f, Value::unit());
  auto st = step_term(app);
  REQUIRE(st.status == TermStatus::Stepped);
  CHECK(alpha_equal(st.next, Comp::app(f, Value::unit())));
}

TEST_CASE("step_term: beta") {
  auto st = step_term(C("(fun(x: 1) -> return x) ()"));
  REQUIRE(st.status == TermStatus::Stepped);
  CHECK(alpha_equal(st.next, C("return ()")));
}

TEST_CASE("step_term: let over return substitutes") {
  auto st = step_term(C("let x <= return () in give x @c"));
  REQUIRE(st.status == TermStatus::Stepped);
  CHECK(alpha_equal(st.next, C("give () @c")));
}

TEST_CASE("step_term: unroll of roll inside a let") {
  auto m = C("let y <= unroll (roll (inl ())) in case y { inl a -> return () | inr b -> return () }");
  auto st = step_term(m);
  REQUIRE(st.status == TermStatus::Stepped);
  CHECK(alpha_equal(
      st.next,
      C("let y <= return (inl ()) in case y { inl a -> return () | inr b -> return () }")));
}

TEST_CASE("step_term: blocked and finished states") {
  CHECK(step_term(C("return ()")).status == TermStatus::Finished);
  auto blocked = step_term(C("let x <= take @c in return ()"));
  CHECK(blocked.status == TermStatus::Blocked);
  REQUIRE(blocked.redex);
  CHECK(blocked.redex->kind == CompKind::Take);
  auto stuck = step_term(Comp::unroll(Value::unit()));
  CHECK(stuck.status == TermStatus::Stuck);
  CHECK(!stuck.diagnostic.empty());
}

TEST_CASE("step_term is deterministic and agrees with eval") {
  auto m = C("let x <= (fun(y: 1) -> return y) () in let z <= return x in return z");
  auto a = step_term(m);
  auto b = step_term(m);
  REQUIRE(a.status == TermStatus::Stepped);
  CHECK(alpha_equal(a.next, b.next));
  auto r = eval_term(m, 100);
  CHECK(r.status == TermStatus::Finished);
  CHECK(alpha_equal(r.term, C("return ()")));
}

TEST_CASE("alpha equality basics") {
  CHECK(alpha_equal_value(V("fun(x: 1) -> return x"), V("fun(y: 1) -> return y")));
  CHECK_FALSE(alpha_equal_value(V("fun(x: 1) -> return x"), V("fun(x: 1) -> return ()")));
}

TEST_CASE("alpha equality agrees with the de Bruijn oracle") {
  // values equal up to binder names, including type binders in mu types
  auto a = V("roll (<l1 = 5> : mu X. <l1: Int, l2: ChanRef(X)>)");
  auto b = V("roll (<l1 = 5> : mu Y. <l1: Int, l2: ChanRef(Y)>)");
  CHECK(mmtest::db_value(a) == mmtest::db_value(b));
  CHECK(alpha_equal_value(a, b));

  std::vector<std::pair<std::string, std::string>> vsamples = {
      {"fun(x: 1) -> let y <= return x in return y",
       "fun(a: 1) -> let b <= return a in return b"},
      {"rec f(x: 1): 1 -> f x", "rec g(y: 1): 1 -> g y"},
      {"fun(x: 1) -> let y <= return x in return y",
       "fun(x: 1) -> let y <= return x in return x"},
      {"fun(x: 1) -> return x", "fun(x: Int) -> return x"},
  };
  for (const auto& [sa, sb] : vsamples) {
    auto va = V(sa);
    auto vb = V(sb);
    CHECK(alpha_equal_value(va, vb) == (mmtest::db_value(va) == mmtest::db_value(vb)));
  }
  std::vector<std::pair<std::string, std::string>> csamples = {
      {"case (inl () : 1 + 1) { inl a -> return a | inr b -> return b }",
       "case (inl () : 1 + 1) { inl c -> return c | inr d -> return d }"},
      {"let x <= return () in return x", "let y <= return () in return y"},
      {"let x <= return () in return x", "let x <= return () in return ()"},
  };
  for (const auto& [sa, sb] : csamples) {
    auto ca = C(sa);
    auto cb = C(sb);
    CHECK(alpha_equal(ca, cb) == (mmtest::db_comp(ca) == mmtest::db_comp(cb)));
  }
}

TEST_CASE("alpha equality is an equivalence relation") {
  auto xs = std::vector<ValuePtr>{V("fun(x: 1) -> return x"), V("fun(y: 1) -> return y"),
                                  V("fun(z: 1) -> return ()")};
  for (const auto& a : xs) CHECK(alpha_equal_value(a, a));
  CHECK(alpha_equal_value(xs[0], xs[1]));
  CHECK(alpha_equal_value(xs[1], xs[0]));
  for (const auto& a : xs)
    for (const auto& b : xs)
      for (const auto& c : xs)
        if (alpha_equal_value(a, b) && alpha_equal_value(b, c)) CHECK(alpha_equal_value(a, c));
}

TEST_CASE("desugar: lists") {
  CHECK(alpha_equal_value(desugar_value(Value::nil()), Value::roll(Value::inl(Value::unit()))));
  auto consed = desugar_value(Value::cons(Value::unit(), Value::nil()));
  CHECK(alpha_equal_value(
      consed, Value::roll(Value::inr(Value::pair(Value::unit(),
                                                 Value::roll(Value::inl(Value::unit())))))));
}

TEST_CASE("desugar: sequencing becomes a let with a fresh binder") {
  auto m = desugar(parse_comp_text("give () @c; return ()"));
  REQUIRE(m->kind == CompKind::Let);
  CHECK(m->m1->kind == CompKind::Give);
  CHECK(alpha_equal(m, Comp::let("q", C("give () @c"), C("return ()"))));
}

TEST_CASE("desugar is idempotent on core terms") {
  std::vector<std::string> sources = {
      "give () @c; take @c; return ()",
      "case [] { [] -> return () | h :: t -> return () }",
      "let x = () in if true then return x else return ()",
      "let r <= concat [] (() :: []) in return ()",
  };
  for (const auto& s : sources) {
    auto once = desugar(parse_comp_text(s));
    CHECK_FALSE(has_sugar(once));
    CHECK(alpha_equal(desugar(once), once));
    CHECK(alpha_equal(desugar(desugar(once)), once));
  }
}

TEST_CASE("value let and if desugar as recorded") {
  auto letval = desugar(parse_comp_text("let x = () in return x"));
  CHECK(alpha_equal(letval, C("let x <= return () in return x")));
  auto iff = desugar(parse_comp_text("if true then return 1 else return 2"));
  REQUIRE(iff->kind == CompKind::CaseSum);
}

namespace {
// replaces unit values by a free variable so substitution has work to do
ValuePtr punch_value(const ValuePtr& v, const std::string& x, int& budget);
CompPtr punch(const CompPtr& m, const std::string& x, int& budget) {
  if (!m || budget <= 0) return m;
  auto c = std::make_shared<Comp>(*m);
  c->v1 = punch_value(m->v1, x, budget);
  c->v2 = punch_value(m->v2, x, budget);
  c->m1 = punch(m->m1, x, budget);
  c->m2 = punch(m->m2, x, budget);
  for (auto& arm : c->arms) arm.body = punch(arm.body, x, budget);
  return c;
}
ValuePtr punch_value(const ValuePtr& v, const std::string& x, int& budget) {
  if (!v || budget <= 0) return v;
  if (v->kind == ValKind::Unit && budget-- > 0) return Value::mkvar(x);
  auto w = std::make_shared<Value>(*v);
  w->v1 = punch_value(v->v1, x, budget);
  w->v2 = punch_value(v->v2, x, budget);
  w->body = punch(v->body, x, budget);
  return w;
}
}  // namespace

TEST_CASE("substitution commutes with term reduction on generated terms") {
  SplitMix64 rng(2024);
  GenOptions g;
  g.allow_rec = true;
  int tested = 0;
  for (int i = 0; i < 200; i++) {
    auto cfg = gen_ch_config(rng, g);
    for (const auto& leaf : cfg.leaves) {
      if (leaf.kind != LeafKind::Thread) continue;
      int budget = 1 + static_cast<int>(rng.below(3));
      auto open = punch(leaf.term, "hole", budget);
      auto v = Value::unit();
      auto direct = step_term(subst(open, v, "hole"));
      auto staged = step_term(open);
      if (staged.status != TermStatus::Stepped) continue;
      REQUIRE(direct.status == TermStatus::Stepped);
      CHECK(alpha_equal(direct.next, subst(staged.next, v, "hole")));
      tested++;
    }
  }
  CHECK(tested > 50);
}

TEST_CASE("substitution output is stable under pre-renaming of inputs") {
  auto m = C("let y <= return x in give y x");
  auto renamed = subst(m, Value::mkvar("x2"), "x");  // alpha-vary the free var
  auto v = V("(inl () : 1 + 1)");
  auto a = subst(m, v, "x");
  auto b = subst(renamed, v, "x2");
  CHECK(alpha_equal(a, b));
}
