#ifndef MM_TESTS_CORPUS_HPP
#define MM_TESTS_CORPUS_HPP

#include <fstream>
#include <sstream>
#include <string>

#include "mm/config.hpp"
#include "mm/ops.hpp"
#include "mm/parser.hpp"

namespace mmtest {

inline std::string corpus_text(const std::string& name) {
  std::ifstream in(std::string(MM_CORPUS_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing corpus file " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CorpusProgram {
  mm::Program program;
  mm::CompPtr core;
  mm::Config config;
  mm::FreshNames fresh;
};

inline CorpusProgram load_corpus(const std::string& name) {
  CorpusProgram cp;
  cp.program = mm::parse_program(corpus_text(name));
  cp.fresh.reserve_at_least(cp.program.used_fresh);
  cp.core = mm::desugar(cp.program.main);
  cp.config.calc = cp.program.has_mailbox ? mm::Calc::Act : mm::Calc::Ch;
  if (cp.program.has_mailbox) {
    cp.config.binders.push_back({"main", cp.program.mailbox, cp.program.result});
    cp.config.leaves.push_back(mm::Leaf::actor("main", cp.core, {}));
  } else {
    cp.config.leaves.push_back(mm::Leaf::thread(cp.core));
  }
  return cp;
}

}  // namespace mmtest

#endif
