// mm: a workbench for two concurrent lambda calculi (typed asynchronous
// channels and typed actors), the translations between them, and bounded
// checking of their metatheory on concrete programs.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mm/harness.hpp"
#include "mm/ops.hpp"
#include "mm/parser.hpp"
#include "mm/translate.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFalsified = 1;
constexpr int kExitInputError = 2;

struct LoadedProgram {
  mm::Program program;
  mm::Calc calc;
  mm::CompPtr core;  // desugared main term
  mm::FreshNames fresh;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mm::MMError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

mm::Calc parse_calc(const std::string& s) {
  if (s == "ch") return mm::Calc::Ch;
  if (s == "act") return mm::Calc::Act;
  throw mm::MMError("unknown calculus '" + s + "' (expected ch or act)");
}

mm::Extensions parse_exts(const std::vector<std::string>& names) {
  mm::Extensions e;
  for (const auto& n : names) {
    if (n == "sync")
      e.sync = true;
    else if (n == "selrecv")
      e.selrecv = true;
    else if (n == "choice")
      e.choice = true;
    else
      throw mm::MMError("unknown extension '" + n + "' (expected sync, selrecv or choice)");
  }
  return e;
}

LoadedProgram load(const std::string& path, const std::string& calc_flag) {
  LoadedProgram lp;
  lp.program = mm::parse_program(read_file(path));
  lp.fresh.reserve_at_least(lp.program.used_fresh);
  if (!calc_flag.empty()) {
    lp.calc = parse_calc(calc_flag);
  } else {
    lp.calc = lp.program.has_mailbox ? mm::Calc::Act : mm::Calc::Ch;
  }
  if (lp.calc == mm::Calc::Act && !lp.program.has_mailbox)
    throw mm::MMError("actor programs need a mailbox annotation: main[T] = ...");
  lp.core = mm::desugar(lp.program.main);
  return lp;
}

// The initial configuration of a program: a single thread, or a single actor
// under a restriction.
mm::Config initial_config(const LoadedProgram& lp) {
  mm::Config cfg;
  cfg.calc = lp.calc;
  if (lp.calc == mm::Calc::Ch) {
    cfg.leaves.push_back(mm::Leaf::thread(lp.core));
  } else {
    cfg.binders.push_back({"main", lp.program.mailbox, lp.program.result});
    cfg.leaves.push_back(mm::Leaf::actor("main", lp.core, {}));
  }
  return cfg;
}

std::size_t max_states_from_env() {
  if (const char* v = std::getenv("MM_MAX_STATES")) {
    auto n = std::strtoull(v, nullptr, 10);
    if (n > 0) return static_cast<std::size_t>(n);
  }
  return mm::kDefaultMaxStates;
}

// ------------------------------
// nested key-value record output
// ------------------------------

struct RecordWriter {
  std::ostream& os;
  int indent = 0;

  void line(const std::string& s) {
    for (int i = 0; i < indent; i++) os << "  ";
    os << s << "\n";
  }
  void field(const std::string& k, const std::string& v) { line(k + ": " + v); }
  template <typename F>
  void block(const std::string& k, F&& f) {
    line(k + " {");
    indent++;
    f();
    indent--;
    line("}");
  }
};

void emit_config_record(RecordWriter& w, const mm::Config& cfg) {
  for (const auto& b : cfg.binders) {
    w.field("restrict", b.name + ": " + mm::print_type(b.carried) +
                            (b.result ? ", " + mm::print_type(b.result) : ""));
  }
  for (const auto& l : cfg.leaves) {
    switch (l.kind) {
      case mm::LeafKind::Thread:
        w.field("thread", mm::print_comp(l.term));
        break;
      case mm::LeafKind::Buffer: {
        std::string q;
        for (std::size_t i = 0; i < l.queue.size(); i++)
          q += (i ? " . " : "") + mm::print_value(l.queue[i]);
        w.field("buffer", l.name + " [" + q + "]");
        break;
      }
      case mm::LeafKind::Actor: {
        std::string q;
        for (std::size_t i = 0; i < l.queue.size(); i++)
          q += (i ? " . " : "") + mm::print_value(l.queue[i]);
        w.block("actor", [&] {
          w.field("name", l.name);
          w.field("term", mm::print_comp(l.term));
          w.field("mailbox", "[" + q + "]");
        });
        break;
      }
    }
  }
}

void print_trace(const mm::TraceReport& trace, const std::string& format) {
  if (format == "record") {
    RecordWriter w{std::cout};
    w.block("trace", [&] {
      w.block("initial", [&] { emit_config_record(w, trace.initial); });
      for (const auto& s : trace.steps) {
        w.block("step", [&] {
          w.field("rule", mm::rule_name(s.rule));
          w.field("choice", std::to_string(s.choice));
          w.field("alternatives", std::to_string(s.n_choices));
        });
      }
      w.block("final", [&] { emit_config_record(w, trace.final_config); });
      w.field("steps", std::to_string(trace.steps.size()));
      w.field("fuel_exhausted", trace.fuel_exhausted ? "true" : "false");
      if (!trace.classification.empty()) {
        std::string tags;
        for (std::size_t i = 0; i < trace.classification.size(); i++)
          tags += (i ? " " : "") + std::string(mm::leaf_tag_name(trace.classification[i]));
        w.field("classification", tags);
      }
      w.field("wall_seconds", std::to_string(trace.wall_seconds));
    });
    return;
  }
  std::cout << "initial:\n" << mm::print_config(trace.initial);
  for (const auto& s : trace.steps) {
    std::cout << "  -> " << mm::rule_name(s.rule) << " (choice " << s.choice << "/"
              << s.n_choices << ")\n";
  }
  std::cout << (trace.fuel_exhausted ? "fuel exhausted after " : "quiescent after ")
            << trace.steps.size() << " steps\n";
  std::cout << "final:\n" << mm::print_config(trace.final_config);
  if (!trace.classification.empty()) {
    std::cout << "classification:";
    for (auto t : trace.classification) std::cout << " " << mm::leaf_tag_name(t);
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for channel- and actor-calculus programs"};
  app.require_subcommand(1);

  std::string file, calc_flag, format = "human";
  std::vector<std::string> ext_names;

  auto add_common = [&](CLI::App* cmd, bool with_ext = true) {
    cmd->add_option("file", file, "program file")->required();
    cmd->add_option("--calc", calc_flag, "calculus: ch or act (default: inferred)");
    if (with_ext) cmd->add_option("--ext", ext_names, "extensions: sync, selrecv, choice");
  };

  auto* check = app.add_subcommand("check", "typecheck a program");
  add_common(check);

  auto* runc = app.add_subcommand("run", "run a program under a scheduler");
  add_common(runc);
  std::uint64_t seed = 0;
  int fuel = 1000;
  bool round_robin = false;
  runc->add_option("--seed", seed, "scheduler seed (splitmix64 stream)");
  runc->add_option("--fuel", fuel, "maximum configuration steps");
  runc->add_flag("--round-robin", round_robin, "rotate choices instead of sampling");
  runc->add_option("--format", format, "human or record");

  auto* explorec = app.add_subcommand("explore", "exhaustive bounded state exploration");
  add_common(explorec);
  int depth = 200;
  explorec->add_option("--depth", depth, "depth bound");
  explorec->add_option("--format", format, "human or record");

  auto* translatec = app.add_subcommand("translate", "translate between the calculi");
  add_common(translatec, false);
  std::string to;
  bool sync_mode = false;
  translatec->add_option("--to", to, "target calculus: ch or act")->required();
  translatec->add_flag("--sync", sync_mode, "use the wait-based translation of take");

  auto* coalescec = app.add_subcommand("coalesce", "rewrite all channels to one shared type");
  add_common(coalescec, false);

  auto* lowerc = app.add_subcommand("lower-selrecv", "lower selective receive to plain actors");
  add_common(lowerc, false);

  auto* simulatec = app.add_subcommand("simulate", "check the simulation property stepwise");
  add_common(simulatec);
  std::string direction;
  int sim_depth = 5, budget = 0;
  simulatec->add_option("--direction", direction, "a2c, c2a or selrecv")->required();
  simulatec->add_option("--depth", sim_depth, "source exploration depth");
  simulatec->add_option("--budget", budget, "target step budget per source step");

  auto* fuzzc = app.add_subcommand("fuzz", "property fuzzing over generated programs");
  std::string mode_name;
  int count = 100;
  std::uint64_t fseed = 1;
  fuzzc->add_option("--mode", mode_name,
                    "preservation-ch|preservation-act|progress-ch|progress-act|a2c|c2a|selrecv")
      ->required();
  fuzzc->add_option("--count", count, "number of generated configurations");
  fuzzc->add_option("--seed", fseed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    auto exts = parse_exts(ext_names);

    if (check->parsed()) {
      auto lp = load(file, calc_flag);
      mm::TypeEnv env;
      mm::TypePtr ty;
      if (lp.calc == mm::Calc::Ch) {
        ty = mm::typecheck_term_ch(env, lp.core, exts);
      } else {
        mm::Effect amb{lp.program.mailbox, lp.program.result};
        if (exts.sync && !amb.result)
          throw mm::MMError("sync mode: annotate the program as main[Mailbox, Result]");
        ty = mm::typecheck_term_act(env, amb, lp.core, exts);
      }
      std::cout << "ok: " << mm::print_type(ty) << "\n";
      return kExitPass;
    }

    if (runc->parsed()) {
      auto lp = load(file, calc_flag);
      auto cfg = initial_config(lp);
      mm::typecheck_config(cfg, exts);
      mm::RunOptions ro;
      ro.scheduler = round_robin ? mm::SchedulerKind::RoundRobin : mm::SchedulerKind::Seeded;
      ro.seed = seed;
      ro.fuel = fuel;
      ro.exts = exts;
      auto trace = mm::run(cfg, ro);
      print_trace(trace, format);
      return kExitPass;
    }

    if (explorec->parsed()) {
      auto lp = load(file, calc_flag);
      auto cfg = initial_config(lp);
      mm::typecheck_config(cfg, exts);
      mm::ExploreOptions eo;
      eo.depth = depth;
      eo.exts = exts;
      eo.max_states = max_states_from_env();
      auto res = mm::explore(cfg, eo);
      if (format == "record") {
        RecordWriter w{std::cout};
        w.block("explore", [&] {
          w.field("states", std::to_string(res.nodes.size()));
          w.field("quiescent", std::to_string(res.quiescent_nodes.size()));
          w.field("truncated", res.truncated ? "true" : "false");
          for (auto qi : res.quiescent_nodes) {
            w.block("quiescent_state", [&] { emit_config_record(w, res.nodes[qi].config); });
          }
        });
      } else {
        std::cout << "states: " << res.nodes.size() << "\n"
                  << "quiescent: " << res.quiescent_nodes.size() << "\n"
                  << "truncated: " << (res.truncated ? "yes" : "no") << "\n";
        for (auto qi : res.quiescent_nodes) {
          std::cout << "quiescent state " << qi << ":\n"
                    << mm::print_config(res.nodes[qi].config);
        }
      }
      return kExitPass;
    }

    if (translatec->parsed()) {
      auto lp = load(file, calc_flag);
      auto target = parse_calc(to);
      if (target == mm::Calc::Ch) {
        if (lp.calc != mm::Calc::Act) throw mm::MMError("--to ch expects an actor program");
        mm::Effect amb{lp.program.mailbox, lp.program.result};
        mm::typecheck_term_act(mm::TypeEnv{}, amb, lp.core, exts);
        auto ch = lp.fresh.next();
        auto out = mm::translate_term_a2c(lp.core, mm::Value::mkvar(ch), lp.fresh);
        // the mailbox channel is free in the image; bind it so the output is
        // a self-contained program
        auto wrapped = mm::Comp::let(
            ch, mm::Comp::newch(mm::translate_type_a2c(lp.program.mailbox)), out);
        std::cout << "main = " << mm::print_comp(wrapped) << "\n";
      } else {
        if (lp.calc != mm::Calc::Ch) throw mm::MMError("--to act expects a channel program");
        mm::typecheck_term_ch(mm::TypeEnv{}, lp.core, exts);
        mm::C2AOptions copts;
        copts.sync = sync_mode;
        mm::CompPtr src = lp.core;
        mm::TypePtr chan_ty;
        if (sync_mode) {
          chan_ty = mm::Type::unit();
        } else {
          auto coalesced = mm::coalesce_term(lp.core, exts, lp.fresh);
          src = coalesced.term;
          chan_ty = coalesced.env.coalesced;
        }
        auto out = mm::translate_term_c2a(src, chan_ty, mm::TypeEnv{}, lp.fresh, copts);
        auto mb = sync_mode ? mm::Type::unit()
                            : mm::translate_type_c2a(chan_ty, chan_ty, copts);
        std::cout << "main[" << mm::print_type(mb);
        if (sync_mode) std::cout << ", 1";
        std::cout << "] = " << mm::print_comp(out) << "\n";
      }
      return kExitPass;
    }

    if (coalescec->parsed()) {
      auto lp = load(file, calc_flag);
      if (lp.calc != mm::Calc::Ch) throw mm::MMError("coalesce expects a channel program");
      auto res = mm::coalesce_term(lp.core, exts, lp.fresh);
      std::cout << "# coalesced channel type: " << mm::print_type(res.env.coalesced) << "\n";
      for (const auto& [t, tok] : res.env.tokens) {
        std::cout << "# token " << tok << " <- " << mm::print_type(t) << "\n";
      }
      std::cout << "main = " << mm::print_comp(res.term) << "\n";
      return kExitPass;
    }

    if (lowerc->parsed()) {
      auto lp = load(file, calc_flag);
      if (lp.calc != mm::Calc::Act) throw mm::MMError("lower-selrecv expects an actor program");
      mm::Extensions sel;
      sel.selrecv = true;
      mm::Effect amb{lp.program.mailbox, nullptr};
      mm::typecheck_term_act(mm::TypeEnv{}, amb, lp.core, sel);
      auto mt = lp.program.mailbox;
      auto lowered = mm::lower_term(
          lp.core, mm::make_list({}, mm::Type::list(mm::lower_type(mt))), mt, mm::TypeEnv{},
          lp.fresh);
      std::cout << "main[" << mm::print_type(mm::lower_type(mt)) << "] = "
                << mm::print_comp(lowered) << "\n";
      return kExitPass;
    }

    if (simulatec->parsed()) {
      auto lp = load(file, calc_flag);
      mm::SimDirection dir;
      if (direction == "a2c")
        dir = mm::SimDirection::A2C;
      else if (direction == "c2a")
        dir = mm::SimDirection::C2A;
      else if (direction == "selrecv")
        dir = mm::SimDirection::SelRecv;
      else
        throw mm::MMError("unknown direction '" + direction + "'");

      mm::Config cfg = initial_config(lp);
      mm::SimOptions so;
      so.depth = sim_depth;
      so.budget = budget;
      so.exts = exts;
      if (dir == mm::SimDirection::SelRecv) so.exts.selrecv = true;
      if (dir == mm::SimDirection::C2A) {
        mm::typecheck_config(cfg, exts);
        auto co = mm::coalesce_config(cfg, exts, lp.fresh);
        cfg = co.config;
      }
      mm::typecheck_config(cfg, so.exts);
      auto rep = mm::check_simulation(cfg, dir, so, lp.fresh);
      int checked = 0, matched = 0;
      for (const auto& s : rep.steps) {
        checked++;
        if (s.matched) matched++;
      }
      std::cout << "source steps checked: " << checked << "\n"
                << "matched: " << matched << "\n";
      if (!rep.ok) {
        std::cout << "FALSIFIED: " << rep.failure << "\n";
        return kExitFalsified;
      }
      std::cout << "simulation holds within the budget\n";
      return kExitPass;
    }

    if (fuzzc->parsed()) {
      auto mode = mm::fuzz_mode_from_name(mode_name);
      if (!mode) throw mm::MMError("unknown fuzz mode '" + mode_name + "'");
      mm::FuzzOptions fo;
      fo.count = count;
      fo.seed = fseed;
      auto rep = mm::fuzz(*mode, fo);
      std::cout << "mode: " << mm::fuzz_mode_name(rep.mode) << "\n"
                << "cases: " << rep.executed << "\n"
                << "failures: " << rep.failures << "\n";
      for (const auto& ex : rep.examples) {
        std::cout << "--- " << ex.what << "\n" << ex.config_text;
      }
      return rep.failures == 0 ? kExitPass : kExitFalsified;
    }
  } catch (const mm::MMError& e) {
    std::cerr << e.what() << "\n";
    return kExitInputError;
  }
  return kExitPass;
}
