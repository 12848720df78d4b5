#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mm/harness.hpp"
#include "mm/ops.hpp"
#include "mm/parser.hpp"
#include "mm/translate.hpp"
#include "mm/typecheck.hpp"
#include "support/corpus.hpp"

using namespace mm;

namespace {
CompPtr C(const std::string& s) { return desugar(parse_comp_text(s)); }
TypePtr T(const std::string& s) { return parse_type_text(s); }
}  // namespace

// ------------------------------
// actors into channels
// ------------------------------

TEST_CASE("a2c types: references and arrows") {
  CHECK(types_equal(translate_type_a2c(T("ActorRef(1)")), T("ChanRef(1)")));
  CHECK(types_equal(translate_type_a2c(T("1")), T("1")));
  CHECK(types_equal(translate_type_a2c(T("1 -[Int]-> 1")), T("1 -> ChanRef(Int) -> 1")));
  CHECK_THROWS_AS(translate_type_a2c(T("ActorRef(1, Int)")), TranslateError);
}

TEST_CASE("a2c terms: the clause table") {
  FreshNames fresh;
  auto ch = Value::mkname("a");
  CHECK(alpha_equal(translate_term_a2c(C("receive"), ch, fresh), C("take @a")));
  CHECK(alpha_equal(translate_term_a2c(C("self"), ch, fresh), C("return @a")));
  CHECK(alpha_equal(translate_term_a2c(C("send 5 @b"), ch, fresh), C("give 5 @b")));
  // receive-and-negate translates to a take from the mailbox channel
  auto body = translate_term_a2c(C("let x <= receive in neg x"), ch, fresh);
  CHECK(alpha_equal(body, C("let x <= take @a in neg x")));
  // spawn becomes a fresh channel plus a fork
  auto sp = translate_term_a2c(C("spawn[Int] (let x <= receive in return ())"), ch, fresh);
  CHECK(alpha_equal(
      sp, C("let mb <= newCh[Int] in let u <= fork (let x <= take mb in return ()) in return mb")));
}

TEST_CASE("a2c values: functions pick up the channel parameter") {
  FreshNames fresh;
  auto f = desugar_value(parse_value_text("fun(x: 1) -[Int]-> receive"));
  auto tf = translate_value_a2c(f, fresh);
  CHECK(alpha_equal_value(
      tf, desugar_value(parse_value_text("fun(x: 1) -> return (fun(c: ChanRef(Int)) -> take c)"))));
}

TEST_CASE("a2c configurations: an actor becomes a buffer and a thread") {
  FreshNames fresh;
  Config cfg;
  cfg.calc = Calc::Act;
  cfg.binders.push_back({"a", Type::unit(), nullptr});
  cfg.leaves.push_back(Leaf::actor("a", C("return ()"), {}));
  auto out = translate_config_a2c(cfg, fresh);
  REQUIRE(out.calc == Calc::Ch);
  REQUIRE(out.leaves.size() == 2);
  CHECK(out.leaves[0].kind == LeafKind::Buffer);
  CHECK(out.leaves[1].kind == LeafKind::Thread);
  CHECK_NOTHROW(typecheck_config(out));

  Config recv;
  recv.calc = Calc::Act;
  recv.binders.push_back({"a", Type::unit(), nullptr});
  recv.leaves.push_back(Leaf::actor("a", C("let x <= receive in return ()"), {Value::unit()}));
  auto out2 = translate_config_a2c(recv, fresh);
  CHECK(out2.leaves[0].queue.size() == 1);
  CHECK(alpha_equal(out2.leaves[1].term, C("let x <= take @a in return ()")));
  CHECK_NOTHROW(typecheck_config(out2));
}

TEST_CASE("a2c preserves typing on generated configurations") {
  SplitMix64 rng(11);
  GenOptions g;
  for (int i = 0; i < 60; i++) {
    auto cfg = gen_act_config(rng, g);
    FreshNames fresh;
    auto out = translate_config_a2c(cfg, fresh);
    CHECK_NOTHROW(typecheck_config(out));
  }
}

TEST_CASE("a2c simulation on small hand configurations") {
  FreshNames fresh;
  Config cfg;
  cfg.calc = Calc::Act;
  cfg.binders.push_back({"a", Type::integer(), nullptr});
  cfg.binders.push_back({"b", Type::integer(), nullptr});
  cfg.leaves.push_back(Leaf::actor("a", C("send 5 @b"), {}));
  cfg.leaves.push_back(
      Leaf::actor("b", C("let x <= receive in let p <= self in send x p"), {}));
  typecheck_config(cfg);
  SimOptions so;
  so.depth = 8;
  auto rep = check_simulation(cfg, SimDirection::A2C, so, fresh);
  CHECK(rep.ok);
  bool spawn_checked = false;
  Config sp;
  sp.calc = Calc::Act;
  sp.binders.push_back({"a", Type::unit(), nullptr});
  sp.leaves.push_back(
      Leaf::actor("a", C("let p <= spawn[1] (return ()) in return ()"), {}));
  auto rep2 = check_simulation(sp, SimDirection::A2C, so, fresh);
  CHECK(rep2.ok);
  for (const auto& s : rep2.steps) {
    if (s.source_rule == Rule::Spawn) {
      spawn_checked = true;
      CHECK(s.target_steps <= 4);  // the proof chain uses four steps
    }
  }
  CHECK(spawn_checked);
}

// ------------------------------
// coalescing
// ------------------------------

TEST_CASE("coalescing wraps gives with the right token") {
  FreshNames fresh;
  auto res = coalesce_term(C("let c <= newCh[Int] in give 5 c"), {}, fresh);
  // single base carried type Int with token t0, plus the channel token
  REQUIRE(res.env.tokens.size() == 1);
  CHECK(types_equal(res.env.tokens[0].first, Type::integer()));
  CHECK(res.env.tokens[0].second == "t0");
  auto expected = Comp::let(
      "c", Comp::newch(res.env.coalesced),
      Comp::give(Value::ascribe(Value::roll(Value::variant("t0", Value::integer(5))),
                                res.env.coalesced),
                 Value::mkvar("c")));
  CHECK(alpha_equal(res.term, expected));
  TypeEnv env;
  CHECK(types_equal(typecheck_term_ch(env, res.term), Type::unit()));
}

TEST_CASE("coalesced takes case over every token, errors elsewhere") {
  FreshNames fresh;
  auto res = coalesce_term(C("let c <= newCh[1] in let x <= take c in return x"), {}, fresh);
  // the take becomes unroll + case with exactly one good arm and the channel
  // arm mapped to the error constant
  const Comp* take_let = res.term->m2.get();
  REQUIRE(take_let->kind == CompKind::Let);
  // the expansion is let x' <= take c in let y <= unroll x' in case y {...}
  const Comp* expansion = take_let->m1.get();
  REQUIRE(expansion->kind == CompKind::Let);
  CHECK(expansion->m1->kind == CompKind::Take);
  const Comp* unroll_let = expansion->m2.get();
  REQUIRE(unroll_let->kind == CompKind::Let);
  CHECK(unroll_let->m1->kind == CompKind::Unroll);
  const Comp* scrutinee = unroll_let->m2.get();
  REQUIRE(scrutinee->kind == CompKind::CaseVariant);
  int error_arms = 0, good_arms = 0;
  for (const auto& arm : scrutinee->arms) {
    if (arm.body->kind == CompKind::Return &&
        strip_ascribe(arm.body->v1)->kind == ValKind::Error) {
      error_arms++;
    } else {
      good_arms++;
    }
  }
  CHECK(good_arms == 1);
  CHECK(error_arms == 1);  // just the channel token here
  TypeEnv env;
  CHECK_NOTHROW(typecheck_term_ch(env, res.term));
}

TEST_CASE("the three-type example coalesces to one recursive variant") {
  auto cp = mmtest::load_corpus("pollute.mm");
  auto res = coalesce_term(cp.core, {}, cp.fresh);
  // base carried types Bool and Int; channels over channels use the
  // distinguished token
  REQUIRE(res.env.tokens.size() == 2);
  CHECK(types_equal(res.env.tokens[0].first, Type::boolean()));
  CHECK(types_equal(res.env.tokens[1].first, Type::integer()));
  auto expect = Type::mu("X", Type::variant({{"chan", Type::chan(Type::tvar("X"))},
                                             {"t0", Type::boolean()},
                                             {"t1", Type::integer()}}));
  CHECK(types_equal(res.env.coalesced, expect));
  TypeEnv env;
  CHECK(types_equal(typecheck_term_ch(env, res.term), Type::unit()));
}

TEST_CASE("coalesced programs stay error-free along every schedule") {
  auto cp = mmtest::load_corpus("pollute.mm");
  auto res = coalesce_term(cp.core, {}, cp.fresh);
  Config cfg;
  cfg.calc = Calc::Ch;
  cfg.leaves.push_back(Leaf::thread(res.term));
  ExploreOptions eo;
  eo.depth = 100;
  auto graph = explore(cfg, eo);
  CHECK_FALSE(graph.truncated);
  CHECK(graph.nodes.size() > 3);
  for (const auto& node : graph.nodes) {
    CHECK_FALSE(error_in_eval_position(node.config));
  }
}

TEST_CASE("coalescing a configuration wraps buffer values") {
  FreshNames fresh;
  Config cfg;
  cfg.calc = Calc::Ch;
  cfg.binders.push_back({"a", Type::integer(), nullptr});
  cfg.leaves.push_back(Leaf::buffer("a", {Value::integer(3)}));
  cfg.leaves.push_back(Leaf::thread(C("let x <= take @a in return ()")));
  auto res = coalesce_config(cfg, {}, fresh);
  CHECK_NOTHROW(typecheck_config(res.config));
  const auto& buf = res.config.leaves[0];
  REQUIRE(buf.queue.size() == 1);
  auto wrapped = strip_ascribe(buf.queue[0]);
  REQUIRE(wrapped->kind == ValKind::Roll);
  CHECK(strip_ascribe(wrapped->v1)->label == "t0");
  CHECK(types_equal(res.env.original_type.at("a"), Type::integer()));
}

// ------------------------------
// channels into actors
// ------------------------------

TEST_CASE("c2a types") {
  CHECK(types_equal(translate_type_c2a(T("ChanRef(1)"), T("1")),
                    T("ActorRef(1 + ActorRef(1))")));
  CHECK(types_equal(translate_type_c2a(T("1"), T("1")), T("1")));
  CHECK(types_equal(translate_type_c2a(T("1 -> 1"), T("1")), T("1 -[1]-> 1")));
  C2AOptions sync;
  sync.sync = true;
  CHECK(types_equal(translate_type_c2a(T("ChanRef(Int)"), T("1"), sync),
                    T("ActorRef(Int + ActorRef(Int, Int), 1)")));
}

TEST_CASE("c2a terms: the clause table") {
  FreshNames fresh;
  TypeEnv env;
  env.bind_name("c", Type::chan(Type::unit()));
  auto give = translate_term_c2a(C("give () @c"), T("1"), env, fresh);
  CHECK(alpha_equal(give, C("send ((inl ()) : 1 + ActorRef(1)) @c")));
  auto take = translate_term_c2a(C("take @c"), T("1"), env, fresh);
  CHECK(alpha_equal(
      take, C("let p <= self in let u <= send ((inr p) : 1 + ActorRef(1)) @c in receive")));
  auto fork = translate_term_c2a(C("fork (return ())"), T("1"), env, fresh);
  REQUIRE(fork->kind == CompKind::Let);
  CHECK(fork->m1->kind == CompKind::Spawn);
  CHECK(alpha_equal(fork->m2, C("return ()")));
  auto nc = translate_term_c2a(C("let c <= newCh[1] in return ()"), T("1"), env, fresh);
  REQUIRE(nc->m1->kind == CompKind::Spawn);
  const auto& call = nc->m1->m1;
  REQUIRE(call->kind == CompKind::App);  // body ([], [])
  CHECK(strip_ascribe(call->v1)->kind == ValKind::Rec);
  auto pairv = strip_ascribe(call->v2);
  REQUIRE(pairv->kind == ValKind::Pair);
  CHECK(as_list(pairv->v1)->items.empty());
  CHECK(as_list(pairv->v2)->items.empty());
}

TEST_CASE("c2a rejects mixed channel types until coalescing has run") {
  FreshNames fresh;
  Config cfg;
  cfg.calc = Calc::Ch;
  cfg.binders.push_back({"a", Type::unit(), nullptr});
  cfg.binders.push_back({"b", Type::integer(), nullptr});
  cfg.leaves.push_back(Leaf::buffer("a", {}));
  cfg.leaves.push_back(Leaf::buffer("b", {}));
  cfg.leaves.push_back(Leaf::thread(C("return ()")));
  CHECK_THROWS_AS(translate_config_c2a(cfg, fresh), TranslateError);
  auto co = coalesce_config(cfg, {}, fresh);
  CHECK_NOTHROW(translate_config_c2a(co.config, fresh));
}

TEST_CASE("c2a configurations: threads get fresh actors, buffers become loops") {
  FreshNames fresh;
  Config cfg;
  cfg.calc = Calc::Ch;
  cfg.binders.push_back({"a", Type::unit(), nullptr});
  cfg.leaves.push_back(Leaf::buffer("a", {Value::unit()}));
  cfg.leaves.push_back(Leaf::thread(C("give () @a")));
  auto out = translate_config_c2a(cfg, fresh);
  REQUIRE(out.calc == Calc::Act);
  REQUIRE(out.binders.size() == 2);
  REQUIRE(out.leaves.size() == 2);
  CHECK(out.leaves[0].kind == LeafKind::Actor);
  CHECK(out.leaves[1].kind == LeafKind::Actor);
  CHECK_NOTHROW(typecheck_config(out));
}

TEST_CASE("c2a preserves typing on generated coalesced configurations") {
  SplitMix64 rng(23);
  GenOptions g;
  for (int i = 0; i < 40; i++) {
    auto cfg = gen_ch_config(rng, g);
    FreshNames fresh;
    auto co = coalesce_config(cfg, {}, fresh);
    CHECK_NOTHROW(typecheck_config(co.config));
    auto out = translate_config_c2a(co.config, fresh);
    CHECK_NOTHROW(typecheck_config(out));
  }
}

TEST_CASE("the translated give completes by a send and the body loop") {
  // E[give W a] || a(V) at a single channel type; the witness chain is the
  // send followed by internal steps of the channel actor only
  FreshNames fresh;
  Config cfg;
  cfg.calc = Calc::Ch;
  cfg.binders.push_back({"a", Type::unit(), nullptr});
  cfg.leaves.push_back(Leaf::buffer("a", {Value::unit()}));
  cfg.leaves.push_back(Leaf::thread(C("give () @a")));
  typecheck_config(cfg);

  auto image = normalize_config(translate_config_c2a(cfg, fresh), {});
  auto src_succs = step_config_ch(cfg);
  REQUIRE(src_succs.size() == 1);
  REQUIRE(src_succs[0].rule == Rule::Give);
  auto goal = normalize_config(translate_config_c2a(src_succs[0].config, fresh), {});

  // the send to the channel actor comes first; after it the only live leaf
  // is the channel actor working through its loop
  Config cur = image;
  auto first = step_config_act(cur);
  Config after_send;
  bool send_seen = false;
  for (const auto& s : first) {
    if (s.rule == Rule::Send) {
      send_seen = true;
      after_send = s.config;
    }
  }
  REQUIRE(send_seen);
  cur = after_send;
  std::vector<Rule> rules;
  int guard = 0;
  while (config_key(cur) != config_key(goal)) {
    auto succs = step_config_act(cur);
    REQUIRE(succs.size() == 1);  // only the channel actor can move now
    rules.push_back(succs[0].rule);
    cur = succs[0].config;
    REQUIRE(++guard <= 32);
  }
  for (auto r : rules) {
    bool internal = r == Rule::LiftM || r == Rule::Receive;
    CHECK(internal);
  }
}

TEST_CASE("the body/drain invariant: one pending list is always empty") {
  // run a channel under give/take traffic and inspect every reachable state
  FreshNames fresh;
  Config cfg;
  cfg.calc = Calc::Ch;
  cfg.binders.push_back({"a", Type::unit(), nullptr});
  cfg.leaves.push_back(Leaf::buffer("a", {Value::unit()}));
  cfg.leaves.push_back(Leaf::thread(C("give () @a; give () @a")));
  cfg.leaves.push_back(Leaf::thread(C("let x <= take @a in take @a")));
  typecheck_config(cfg);
  auto image = translate_config_c2a(cfg, fresh);
  ExploreOptions eo;
  eo.depth = 120;
  auto graph = explore(image, eo);
  CHECK_FALSE(graph.truncated);
  int inspected = 0;
  for (const auto& node : graph.nodes) {
    for (const auto& leaf : node.config.leaves) {
      if (leaf.kind != LeafKind::Actor || !leaf.term) continue;
      // at the loop boundary the term is exactly `body (vals, pids)`
      if (leaf.term->kind != CompKind::App) continue;
      auto fn = strip_ascribe(leaf.term->v1);
      auto arg = strip_ascribe(leaf.term->v2);
      if (fn->kind != ValKind::Rec || arg->kind != ValKind::Pair) continue;
      auto vals = as_list(arg->v1);
      auto pids = as_list(arg->v2);
      if (!vals || !pids) continue;
      inspected++;
      CHECK((vals->items.empty() || pids->items.empty()));
    }
  }
  CHECK(inspected > 0);
}

TEST_CASE("sync-mode take spawns a requestor and waits on it") {
  FreshNames fresh;
  TypeEnv env;
  env.bind_name("c", Type::chan(Type::integer()));
  C2AOptions sync;
  sync.sync = true;
  auto take = translate_term_c2a(C("take @c"), Type::unit(), env, fresh, sync);
  REQUIRE(take->kind == CompKind::Let);
  REQUIRE(take->m1->kind == CompKind::Spawn);
  CHECK(take->m1->ann2 != nullptr);
  CHECK(take->m2->kind == CompKind::Wait);
  CHECK(alpha_equal(
      take->m1->m1,
      C("let p <= self in let u <= send ((inr p) : Int + ActorRef(Int, Int)) @c in receive")));
}

TEST_CASE("sync-mode translation preserves typing without coalescing") {
  // channels at two different types translate directly in sync mode
  FreshNames fresh;
  Config cfg;
  cfg.calc = Calc::Ch;
  cfg.binders.push_back({"a", Type::unit(), nullptr});
  cfg.binders.push_back({"b", Type::integer(), nullptr});
  cfg.leaves.push_back(Leaf::buffer("a", {}));
  cfg.leaves.push_back(Leaf::buffer("b", {Value::integer(4)}));
  cfg.leaves.push_back(Leaf::thread(C("give () @a; let x <= take @b in return ()")));
  typecheck_config(cfg);
  C2AOptions sync;
  sync.sync = true;
  auto out = translate_config_c2a(cfg, fresh, sync);
  Extensions se;
  se.sync = true;
  CHECK_NOTHROW(typecheck_config(out, se));
}

TEST_CASE("sync-mode take is simulated through the wait rule") {
  FreshNames fresh;
  Config cfg;
  cfg.calc = Calc::Ch;
  cfg.binders.push_back({"a", Type::integer(), nullptr});
  cfg.leaves.push_back(Leaf::buffer("a", {Value::integer(8)}));
  cfg.leaves.push_back(Leaf::thread(C("let x <= take @a in return ()")));
  typecheck_config(cfg);
  C2AOptions copt;
  copt.sync = true;
  Extensions se;
  se.sync = true;
  auto image = translate_config_c2a(cfg, fresh, copt);
  auto succs = step_config_ch(cfg);
  REQUIRE(succs.size() == 1);
  auto goal = translate_config_c2a(succs[0].config, fresh, copt);
  auto hit = find_witness(image, goal, 32, se);
  REQUIRE(hit.has_value());
  CHECK(*hit <= 32);
}

// ------------------------------
// endpoint agreement on the stack corpus
// ------------------------------

namespace {
// collects the observable payloads of a ch-config: values held in buffers
// (unwrapped from coalescing tokens when present)
std::vector<std::string> buffer_payloads(const Config& cfg) {
  std::vector<std::string> out;
  for (const auto& l : cfg.leaves) {
    if (l.kind == LeafKind::Buffer) {
      for (const auto& v : l.queue) out.push_back(canonical_value(strip_ascribe(v)));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}
}  // namespace

TEST_CASE("the actor stack and its channel image deliver the same result") {
  auto cp = mmtest::load_corpus("actor_stack.mm");
  typecheck_config(cp.config);
  auto image = translate_config_a2c(cp.config, cp.fresh);
  typecheck_config(image);

  ExploreOptions eo;
  eo.depth = 200;
  auto g1 = explore(cp.config, eo);
  REQUIRE_FALSE(g1.truncated);
  REQUIRE_FALSE(g1.quiescent_nodes.empty());
  // every quiescent schedule of the source delivers Some 5 to the sink
  for (auto qi : g1.quiescent_nodes) {
    bool found = false;
    for (const auto& leaf : g1.nodes[qi].config.leaves) {
      for (const auto& v : leaf.queue) {
        auto w = strip_ascribe(v);
        if (w->kind == ValKind::Variant && w->label == "Some") {
          found = true;
          CHECK(strip_ascribe(w->v1)->intval == 5);
        }
      }
    }
    CHECK(found);
  }

  auto g2 = explore(image, eo);
  REQUIRE_FALSE(g2.truncated);
  REQUIRE_FALSE(g2.quiescent_nodes.empty());
  for (auto qi : g2.quiescent_nodes) {
    bool found = false;
    for (const auto& p : buffer_payloads(g2.nodes[qi].config)) {
      if (p.find("Some") != std::string::npos) {
        found = true;
        CHECK(p.find("5") != std::string::npos);
      }
    }
    CHECK(found);
  }
}
