#ifndef MM_PARSER_HPP
#define MM_PARSER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mm/ast.hpp"

namespace mm {

// A parsed program: `def` bindings already substituted into the main term.
// The term is still in surface form; run desugar() before checking or
// evaluating it.
struct Program {
  CompPtr main;
  bool has_mailbox = false;  // `main[T]` / `main[T, R]` annotation present
  TypePtr mailbox;
  TypePtr result;            // sync form `main[T, R]`
  std::uint64_t used_fresh = 0;  // seed for FreshNames to avoid collisions
};

Program parse_program(const std::string& text);

TypePtr parse_type_text(const std::string& text);
ValuePtr parse_value_text(const std::string& text);
CompPtr parse_comp_text(const std::string& text);

}  // namespace mm

#endif  // MM_PARSER_HPP
