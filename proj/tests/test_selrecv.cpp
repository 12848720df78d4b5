#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mm/harness.hpp"
#include "mm/ops.hpp"
#include "mm/parser.hpp"
#include "mm/translate.hpp"
#include "mm/typecheck.hpp"

using namespace mm;

namespace {
CompPtr C(const std::string& s) { return desugar(parse_comp_text(s)); }
TypePtr T(const std::string& s) { return parse_type_text(s); }

ValuePtr tagged(const std::string& label, ValuePtr v, const std::string& ty) {
  return Value::ascribe(Value::variant(label, std::move(v)), parse_type_text(ty));
}

Config actconfig(std::vector<Binder> binders, std::vector<Leaf> leaves) {
  Config cfg;
  cfg.calc = Calc::Act;
  cfg.binders = std::move(binders);
  cfg.leaves = std::move(leaves);
  return cfg;
}
}  // namespace

TEST_CASE("lowered types") {
  CHECK(types_equal(lower_type(T("ActorRef(<l: 1>)")), T("ActorRef(<l: 1>)")));
  CHECK(types_equal(lower_type(T("1 -[<l: 1>]-> 1")),
                    T("1 -[<l: 1>]-> (List(<l: 1>) -[<l: 1>]-> 1 * List(<l: 1>))")));
  CHECK(types_equal(lower_type(T("mu X. 1 + X")), T("mu X. 1 + X")));
}

TEST_CASE("lowered terms pair their result with the save queue") {
  FreshNames fresh;
  auto mb = Value::mkvar("mb");
  auto mt = T("<l: 1>");
  auto ret = lower_term(C("return 5"), mb, mt, TypeEnv{}, fresh);
  CHECK(alpha_equal(ret, C("return (5, mb)")));
  auto send = lower_term(C("send <l = ()> @a"), mb, mt, [] {
    TypeEnv env;
    env.bind_name("a", Type::actor(parse_type_text("<l: 1>")));
    return env;
  }(), fresh);
  CHECK(alpha_equal(send, C("let x <= send <l = ()> @a in return (x, mb)")));
}

TEST_CASE("lowered spawn seeds the child with an empty save queue") {
  FreshNames fresh;
  auto mb = Value::mkvar("mb");
  auto mt = T("<l: 1>");
  auto sp = lower_term(C("let p <= spawn[<l: 1>] (return ()) in return ()"), mb, mt,
                       TypeEnv{}, fresh);
  // let rp <= (let sr <= spawn (...) in return (sr, mb)) in ...
  REQUIRE(sp->kind == CompKind::Let);
  const Comp* inner = sp->m1.get();
  REQUIRE(inner->kind == CompKind::Let);
  REQUIRE(inner->m1->kind == CompKind::Spawn);
  CHECK(types_equal(inner->m1->ann, T("<l: 1>")));
  // ... in return (sr, mb) pairing the spawned reference with the queue
  REQUIRE(inner->m2->kind == CompKind::Return);
  auto pr = strip_ascribe(inner->m2->v1);
  REQUIRE(pr->kind == ValKind::Pair);
  CHECK(strip_ascribe(pr->v2)->name == "mb");
  // the spawned body discards its own (result, queue) pair to stay unit-typed
  const Comp* child = inner->m1->m1.get();
  REQUIRE(child->kind == CompKind::Let);
  CHECK(child->m2->kind == CompKind::LetPair);
}

TEST_CASE("a lowered selective receive consumes a stored message") {
  // run the lowered term under the plain semantics and compare with the
  // native result: the payload pairs with an empty save queue
  FreshNames fresh;
  auto mt = T("<l: 1>");
  auto sel = C("receive { <l = x> when true -> return x }");
  Extensions selx;
  selx.selrecv = true;
  auto lowered = lower_term(sel, make_list({}, Type::list(lower_type(mt))), mt, TypeEnv{}, fresh);

  auto cfg = actconfig({{"a", lower_type(mt), nullptr}},
                       {Leaf::actor("a", lowered, {tagged("l", Value::unit(), "<l: 1>")})});
  Config cur = normalize_config(cfg, {});
  for (int i = 0; i < 200; i++) {
    auto succs = step_config_act(cur, {});
    if (succs.empty()) break;
    REQUIRE(succs.size() == 1);
    cur = succs[0].config;
  }
  REQUIRE(cur.leaves.size() == 1);
  auto st = step_term(cur.leaves[0].term);
  REQUIRE(st.status == TermStatus::Finished);
  auto pair = strip_ascribe(cur.leaves[0].term->v1);
  REQUIRE(pair->kind == ValKind::Pair);
  CHECK(strip_ascribe(pair->v1)->kind == ValKind::Unit);
  auto queue = as_list(pair->v2);
  REQUIRE(queue.has_value());
  CHECK(queue->items.empty());

  // native semantics agrees: the payload is the unit value
  auto native = eval_selective_receive(sel->rarms, {tagged("l", Value::unit(), "<l: 1>")});
  REQUIRE(native.has_value());
  CHECK(alpha_equal_value(strip_ascribe(native->bound), Value::unit()));
}

TEST_CASE("guarded clauses requeue scanned messages in order") {
  // mailbox [l2, l1], clauses only for l1: the l2 message survives in the
  // save queue after the lowered receive fires
  FreshNames fresh;
  auto mt = T("<l1: 1, l2: 1>");
  auto sel = C("receive { <l1 = x> when true -> return x }");
  auto lowered = lower_term(sel, make_list({}, Type::list(lower_type(mt))), mt, TypeEnv{}, fresh);
  auto cfg = actconfig({{"a", lower_type(mt), nullptr}},
                       {Leaf::actor("a", lowered,
                                    {tagged("l2", Value::unit(), "<l1: 1, l2: 1>"),
                                     tagged("l1", Value::unit(), "<l1: 1, l2: 1>")})});
  Config cur = normalize_config(cfg, {});
  for (int i = 0; i < 400; i++) {
    auto succs = step_config_act(cur, {});
    if (succs.empty()) break;
    REQUIRE(succs.size() == 1);
    cur = succs[0].config;
  }
  auto st = step_term(cur.leaves[0].term);
  REQUIRE(st.status == TermStatus::Finished);
  auto pair = strip_ascribe(cur.leaves[0].term->v1);
  REQUIRE(pair->kind == ValKind::Pair);
  auto queue = as_list(pair->v2);
  REQUIRE(queue.has_value());
  REQUIRE(queue->items.size() == 1);
  CHECK(strip_ascribe(queue->items[0])->label == "l2");
}

TEST_CASE("partition counts") {
  FreshNames fresh;
  auto mt = "<l: 1>";
  auto idle = C("let x <= receive in return ()");
  auto empty = actconfig({{"a", T(mt), nullptr}}, {Leaf::actor("a", idle, {})});
  CHECK(lower_config(empty, fresh).size() == 1);

  auto two = actconfig({{"a", T(mt), nullptr}},
                       {Leaf::actor("a", idle,
                                    {tagged("l", Value::unit(), mt),
                                     tagged("l", Value::unit(), mt)})});
  CHECK(lower_config(two, fresh).size() == 3);

  auto pairCfg = actconfig(
      {{"a", T(mt), nullptr}, {"b", T(mt), nullptr}},
      {Leaf::actor("a", idle, {tagged("l", Value::unit(), mt)}),
       Leaf::actor("b", idle, {tagged("l", Value::unit(), mt)})});
  CHECK(lower_config(pairCfg, fresh).size() == 4);
}

TEST_CASE("every partition of a lowered configuration typechecks") {
  FreshNames fresh;
  std::string mt = "<l1: Int, l2: 1>";
  auto term = C(
      "let x <= receive { <l1 = v> when gt v 1 -> return v, <l2 = u> when true -> return 0 } in "
      "return ()");
  auto cfg = actconfig({{"a", T(mt), nullptr}},
                       {Leaf::actor("a", term,
                                    {tagged("l1", Value::integer(1), mt),
                                     tagged("l2", Value::unit(), mt)})});
  Extensions selx;
  selx.selrecv = true;
  typecheck_config(cfg, selx);
  auto ds = lower_config(cfg, fresh);
  CHECK(ds.size() == 3);
  for (const auto& d : ds) {
    CHECK_NOTHROW(typecheck_config(d, Extensions{}));
  }
}

TEST_CASE("lowered terms have the paired type") {
  FreshNames fresh;
  auto mt = T("<l1: Int, l2: 1>");
  auto lmt = lower_type(mt);
  auto sel = C("receive { <l1 = v> when true -> return v, <l2 = u> when true -> return 0 }");
  auto lowered = lower_term(sel, Value::mkvar("mb"), mt, TypeEnv{}, fresh);
  TypeEnv env;
  env.bind_var("mb", Type::list(lmt));
  Extensions none;
  Effect amb{lmt, nullptr};
  auto ty = typecheck_term_act(env, amb, lowered, none);
  CHECK(types_equal(ty, Type::prod(Type::integer(), Type::list(lmt))));
}

TEST_CASE("pure guards reduce to a pair with the untouched queue") {
  // for a pure computation M with M ->* return V, the lowered form returns
  // (V, mb) for any queue mb
  FreshNames fresh;
  auto mt = T("<l: 1>");
  auto pure = C("let x <= add 2 3 in gt x 4");
  REQUIRE(is_pure(pure));
  auto mb = make_list({tagged("l", Value::unit(), "<l: 1>")}, Type::list(lower_type(mt)));
  auto lowered = lower_term(pure, mb, mt, TypeEnv{}, fresh);
  auto res = eval_term(lowered, 1000);
  REQUIRE(res.status == TermStatus::Finished);
  auto pair = strip_ascribe(res.term->v1);
  REQUIRE(pair->kind == ValKind::Pair);
  CHECK(as_bool(pair->v1) == true);
  CHECK(as_list(pair->v2)->items.size() == 1);
}

TEST_CASE("membership simulation on the priority actor partitions") {
  std::string mt = "<PriorityMessage: Int, StandardMessage: Int, Timeout: 1>";
  auto term = C(
      "let first <= receive { <PriorityMessage = m> when gt m 5 -> return m, "
      "<Timeout = t> when true -> return 0 } in "
      "let second <= receive { <PriorityMessage = m> when true -> return m, "
      "<StandardMessage = m> when true -> return m, "
      "<Timeout = t> when true -> return 0 } in return ()");
  auto cfg = actconfig({{"a", T(mt), nullptr}},
                       {Leaf::actor("a", term,
                                    {tagged("PriorityMessage", Value::integer(3), mt),
                                     tagged("Timeout", Value::unit(), mt)})});
  Extensions selx;
  selx.selrecv = true;
  typecheck_config(cfg, selx);
  FreshNames fresh;
  CHECK(lower_config(cfg, fresh).size() == 3);
  SimOptions so;
  so.depth = 3;
  so.exts = selx;
  auto rep = check_simulation(cfg, SimDirection::SelRecv, so, fresh);
  CHECK(rep.ok);
  // witnesses were found from every partition with at least one step
  int records = 0;
  for (const auto& s : rep.steps) {
    records++;
    CHECK(s.matched);
    CHECK(s.target_steps >= 1);
    CHECK(s.target_steps <= 64);
  }
  CHECK(records >= 3);
}
