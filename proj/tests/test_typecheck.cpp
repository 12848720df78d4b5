#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mm/ops.hpp"
#include "mm/parser.hpp"
#include "mm/typecheck.hpp"

using namespace mm;

namespace {
CompPtr C(const std::string& s) { return desugar(parse_comp_text(s)); }
TypePtr T(const std::string& s) { return parse_type_text(s); }
}  // namespace

TEST_CASE("channel terms: give, return, choose") {
  TypeEnv env;
  env.bind_name("c", Type::chan(Type::unit()));
  CHECK(types_equal(typecheck_term_ch(env, C("give () @c")), Type::unit()));
  CHECK(types_equal(typecheck_term_ch(TypeEnv{}, C("return ()")), Type::unit()));

  TypeEnv env2;
  env2.bind_name("a", Type::chan(Type::integer()));
  env2.bind_name("b", Type::chan(Type::unit()));
  Extensions choice;
  choice.choice = true;
  CHECK(types_equal(typecheck_term_ch(env2, C("choose @a @b"), choice), T("Int + 1")));
  CHECK_THROWS_AS(typecheck_term_ch(env2, C("choose @a @b")), TypeError);  // flag off
  CHECK_THROWS_AS(typecheck_term_ch(env2, C("choose () @b"), choice), TypeError);
}

TEST_CASE("channel terms: located failures") {
  TypeEnv env;
  env.bind_name("c", Type::chan(Type::integer()));
  CHECK_THROWS_AS(typecheck_term_ch(TypeEnv{}, C("return x")), TypeError);      // unbound
  CHECK_THROWS_AS(typecheck_term_ch(env, C("give () @c")), TypeError);          // payload
  CHECK_THROWS_AS(typecheck_term_ch(env, C("(fun(x: 1) -> return x) 3")), TypeError);
  CHECK_THROWS_AS(typecheck_term_ch(env, C("take ()")), TypeError);
}

TEST_CASE("bidirectional checking needs ascriptions only in synthesis position") {
  TypeEnv env;
  env.bind_name("c", Type::chan(T("1 + Int")));
  // checked against the channel's carried type: no annotation required
  CHECK(types_equal(typecheck_term_ch(env, C("give (inl ()) @c")), Type::unit()));
  // bare injection in synthesis position cannot be inferred
  CHECK_THROWS_AS(typecheck_term_ch(env, C("return (inl ())")), TypeError);
  CHECK(types_equal(typecheck_term_ch(env, C("return (inl () : 1 + Int)")), T("1 + Int")));
  CHECK_THROWS_AS(typecheck_term_ch(env, C("return (inl () : 1)")), TypeError);
}

TEST_CASE("recursive types and lists") {
  CHECK(types_equal(typecheck_term_ch(TypeEnv{}, C("return ((() :: []) : List(1))")),
                    T("List(1)")));
  CHECK(types_equal(typecheck_term_ch(TypeEnv{}, C("unroll (roll (inl ()) : mu X. 1 + X)")),
                    T("1 + (mu X. 1 + X)")));
  CHECK(types_equal(
      typecheck_term_ch(TypeEnv{}, C("concat (() :: [] : List(1)) ([] : List(1))")),
      T("List(1)")));
  CHECK_THROWS_AS(typecheck_term_ch(TypeEnv{}, C("concat ([] : List(1)) ([] : List(Int))")),
                  TypeError);
}

TEST_CASE("actor terms: receive, self, effect annotations") {
  Effect amb{T("Int"), nullptr};
  CHECK(types_equal(typecheck_term_act(TypeEnv{}, amb, C("receive")), T("Int")));
  CHECK(types_equal(typecheck_term_act(TypeEnv{}, amb, C("self")), T("ActorRef(Int)")));
  // a function that receives an integer and negates it: 1 -[Int]-> Int
  auto recvAndNeg = parse_value_text("fun(u: 1) -[Int]-> let x <= receive in neg x");
  Checker chk(Calc::Act, {});
  CHECK(types_equal(chk.synth_value(TypeEnv{}, desugar_value(recvAndNeg)), T("1 -[Int]-> Int")));
  // the same function is not typeable at a boolean mailbox
  CHECK_THROWS_AS(
      typecheck_term_act(TypeEnv{}, Effect{T("Bool"), nullptr},
                         Comp::app(desugar_value(recvAndNeg), Value::unit())),
      TypeError);
  // arrows without annotations are rejected in the actor calculus
  CHECK_THROWS_AS(
      typecheck_term_act(TypeEnv{}, amb, C("(fun(x: 1) -> return x) ()")), TypeError);
}

TEST_CASE("actor terms: send and spawn") {
  TypeEnv env;
  env.bind_name("b", Type::actor(T("Int")));
  Effect amb{T("1"), nullptr};
  CHECK(types_equal(typecheck_term_act(env, amb, C("send 5 @b")), Type::unit()));
  CHECK_THROWS_AS(typecheck_term_act(env, amb, C("send () @b")), TypeError);
  CHECK(types_equal(typecheck_term_act(env, amb, C("spawn[Int] (return ())")),
                    T("ActorRef(Int)")));
  CHECK_THROWS_AS(typecheck_term_act(env, amb, C("spawn[Int] (return 5)")), TypeError);
}

TEST_CASE("channel configurations: the three shapes from the rules") {
  // (nu a)(a(eps) || take a) is fine at carried type 1
  Config ok;
  ok.calc = Calc::Ch;
  ok.binders.push_back({"a", Type::unit(), nullptr});
  ok.leaves.push_back(Leaf::buffer("a", {}));
  ok.leaves.push_back(Leaf::thread(C("take @a")));
  CHECK_NOTHROW(typecheck_config(ok));

  // two buffers for one restriction break linearity
  Config two = ok;
  two.leaves.push_back(Leaf::buffer("a", {}));
  CHECK_THROWS_WITH_AS(typecheck_config(two), doctest::Contains("linearity"), TypeError);

  // a restriction without its buffer
  Config missing;
  missing.calc = Calc::Ch;
  missing.binders.push_back({"a", Type::unit(), nullptr});
  missing.leaves.push_back(Leaf::thread(C("return ()")));
  CHECK_THROWS_WITH_AS(typecheck_config(missing), doctest::Contains("no buffer"), TypeError);

  // buffer contents must match the carried type
  Config bad = ok;
  bad.leaves[0].queue.push_back(Value::integer(3));
  CHECK_THROWS_AS(typecheck_config(bad), TypeError);

  // threads must have the unit type
  Config nonunit;
  nonunit.calc = Calc::Ch;
  nonunit.leaves.push_back(Leaf::thread(C("return 5")));
  CHECK_THROWS_WITH_AS(typecheck_config(nonunit), doctest::Contains("not unit"), TypeError);
}

TEST_CASE("actor configurations") {
  Config ok;
  ok.calc = Calc::Act;
  ok.binders.push_back({"a", Type::unit(), nullptr});
  ok.leaves.push_back(Leaf::actor("a", C("return ()"), {}));
  CHECK_NOTHROW(typecheck_config(ok));

  // a waiting actor with a queued message; the body must still be unit-typed
  Config waiting;
  waiting.calc = Calc::Act;
  waiting.binders.push_back({"a", T("<l: 1>"), nullptr});
  waiting.leaves.push_back(Leaf::actor(
      "a", C("let x <= receive in return ()"),
      {Value::ascribe(Value::variant("l", Value::unit()), T("<l: 1>"))}));
  CHECK_NOTHROW(typecheck_config(waiting));

  // a bare receive has the mailbox type, not unit, and is rejected
  Config bare = waiting;
  bare.leaves[0].term = C("receive");
  CHECK_THROWS_AS(typecheck_config(bare), TypeError);

  // mutating the mailbox to a value of the wrong type is rejected
  Config mutated = waiting;
  mutated.leaves[0].queue[0] = Value::integer(7);
  CHECK_THROWS_AS(typecheck_config(mutated), TypeError);
}

TEST_CASE("sync mode typing") {
  Extensions sync;
  sync.sync = true;
  Effect amb{T("1"), T("Int")};
  // self returns the two-parameter reference
  CHECK(types_equal(typecheck_term_act(TypeEnv{}, amb, C("self"), sync), T("ActorRef(1, Int)")));
  // spawn declares the child's result; wait retrieves it
  auto m = C("let p <= spawn[1, Int] (return 42) in wait p");
  CHECK(types_equal(typecheck_term_act(TypeEnv{}, amb, m, sync), T("Int")));
  CHECK_THROWS_AS(typecheck_term_act(TypeEnv{}, amb, C("let p <= spawn[1, Int] (return ()) in wait p"),
                                     sync),
                  TypeError);
  // wait needs sync mode
  Effect plain{T("1"), nullptr};
  CHECK_THROWS_AS(typecheck_term_act(TypeEnv{}, plain, C("wait ()")), TypeError);
}

TEST_CASE("selective receive typing") {
  Extensions sel;
  sel.selrecv = true;
  Effect amb{T("<l1: Int, l2: 1>"), nullptr};
  auto ok = C("receive { <l1 = x> when gt x 0 -> return x, <l2 = y> when true -> return 0 }");
  CHECK(types_equal(typecheck_term_act(TypeEnv{}, amb, ok, sel), T("Int")));
  // label not in the mailbox type
  auto badlabel = C("receive { <nope = x> when true -> return 0 }");
  CHECK_THROWS_AS(typecheck_term_act(TypeEnv{}, amb, badlabel, sel), TypeError);
  // guard must be pure
  auto impure = C("receive { <l1 = x> when (let s <= self in return true) -> return x }");
  CHECK_THROWS_AS(typecheck_term_act(TypeEnv{}, amb, impure, sel), TypeError);
  // guard must be boolean
  auto nonbool = C("receive { <l1 = x> when return x -> return x }");
  CHECK_THROWS_AS(typecheck_term_act(TypeEnv{}, amb, nonbool, sel), TypeError);
  // branch types must agree
  auto disagree = C("receive { <l1 = x> when true -> return x, <l2 = y> when true -> return () }");
  CHECK_THROWS_AS(typecheck_term_act(TypeEnv{}, amb, disagree, sel), TypeError);
}
