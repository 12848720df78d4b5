#ifndef MM_AST_HPP
#define MM_AST_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mm {

// ------------------------------
// types
// ------------------------------

enum class TypeKind {
  Unit,
  Int,
  Fun,      // arg -> ret, with an effect annotation in the actor calculus
  Chan,     // channel reference carrying `carried`
  Actor,    // actor reference with mailbox `carried`
  Actor2,   // actor reference with mailbox `carried` and final result `result`
  Prod,
  Sum,
  Variant,  // n-ary, labels kept in canonical (lexicographic) order
  Mu,       // iso-recursive binder
  Var,      // type variable bound by an enclosing Mu
};

struct Type;
using TypePtr = std::shared_ptr<const Type>;

// Arrow annotation for the actor calculus. `result` is only populated in
// sync mode, where the ambient effect is a (mailbox, result) pair.
struct Effect {
  TypePtr mailbox;
  TypePtr result;  // null outside sync mode
};

struct Type {
  TypeKind kind;

  TypePtr arg, ret;             // Fun
  std::optional<Effect> eff;    // Fun (actor calculus only)
  TypePtr carried;              // Chan / Actor / Actor2
  TypePtr result;               // Actor2
  TypePtr left, right;          // Prod / Sum
  std::vector<std::pair<std::string, TypePtr>> labels;  // Variant
  std::string var;              // Mu / Var
  TypePtr body;                 // Mu

  static TypePtr unit();
  static TypePtr integer();
  static TypePtr fun(TypePtr a, TypePtr b);
  static TypePtr fun(TypePtr a, Effect e, TypePtr b);
  static TypePtr chan(TypePtr carried);
  static TypePtr actor(TypePtr mailbox);
  static TypePtr actor2(TypePtr mailbox, TypePtr result);
  static TypePtr prod(TypePtr l, TypePtr r);
  static TypePtr sum(TypePtr l, TypePtr r);
  static TypePtr variant(std::vector<std::pair<std::string, TypePtr>> labels);
  static TypePtr mu(std::string var, TypePtr body);
  static TypePtr tvar(std::string var);

  // List(A) = mu X. 1 + (A * X); Bool = 1 + 1.
  static TypePtr list(TypePtr elem);
  static TypePtr boolean();
};

bool types_equal(const TypePtr& a, const TypePtr& b);
// body{replacement/var}, capture-avoiding over Mu binders.
TypePtr subst_type(const TypePtr& body, const std::string& var, const TypePtr& replacement);
// Is `t` exactly a list type mu X. 1 + (A * X)? Returns A if so.
TypePtr list_elem_type(const TypePtr& t);

// ------------------------------
// terms (fine-grain call-by-value: values vs. computations)
// ------------------------------

enum class ValKind {
  Var,      // term variable
  Name,     // runtime name (channel or actor)
  Lam,
  Rec,
  Unit,
  Pair,
  Inl,
  Inr,
  Variant,
  Roll,
  Int,
  Error,    // distinguished constant introduced by coalescing
  Ascribe,  // (V : T), used where a constructor's type cannot be inferred
  // surface-only forms, removed by desugar()
  Nil,
  Cons,
  BoolLit,
};

enum class CompKind {
  App,
  Let,
  Return,
  LetPair,
  CaseSum,
  CaseVariant,
  Unroll,
  // channel calculus primitives
  Give,
  Take,
  Fork,
  NewCh,
  Choose,
  // actor calculus primitives
  Spawn,
  Send,
  Receive,
  SelfPid,
  Wait,
  SelRecv,
  // integer and list primitives
  Neg,
  Add,
  Gt,
  Concat,
  // surface-only forms, removed by desugar()
  Seq,
  CaseList,
  LetVal,
  If,
};

struct Value;
struct Comp;
using ValuePtr = std::shared_ptr<const Value>;
using CompPtr = std::shared_ptr<const Comp>;

struct VariantArm {
  std::string label;
  std::string var;
  CompPtr body;
};

struct ReceiveArm {
  std::string label;
  std::string var;
  CompPtr guard;  // pure computation of type Bool
  CompPtr body;
};

struct Value {
  ValKind kind;

  std::string name;                  // Var / Name / Variant label via `label`
  std::string label;                 // Variant
  ValuePtr v1, v2;                   // Pair, Cons(head, tail); v1 for unary wrappers
  TypePtr ty;                        // Lam param type, Ascribe type, Rec arg type
  TypePtr ret;                       // Rec return type
  std::optional<Effect> eff;         // Lam / Rec arrow annotation (actor calculus)
  std::string fname;                 // Rec function name
  std::string var;                   // Lam / Rec parameter
  CompPtr body;                      // Lam / Rec
  std::int64_t intval = 0;           // Int
  bool boolval = false;              // BoolLit

  static ValuePtr mkvar(std::string x);
  static ValuePtr mkname(std::string a);
  static ValuePtr lam(std::string x, TypePtr t, CompPtr body);
  static ValuePtr lam(std::string x, TypePtr t, Effect e, CompPtr body);
  static ValuePtr rec(std::string f, std::string x, TypePtr argt, TypePtr rett, CompPtr body);
  static ValuePtr rec(std::string f, std::string x, TypePtr argt, TypePtr rett, Effect e,
                      CompPtr body);
  static ValuePtr unit();
  static ValuePtr pair(ValuePtr a, ValuePtr b);
  static ValuePtr inl(ValuePtr v);
  static ValuePtr inr(ValuePtr v);
  static ValuePtr variant(std::string label, ValuePtr v);
  static ValuePtr roll(ValuePtr v);
  static ValuePtr integer(std::int64_t n);
  static ValuePtr error();
  static ValuePtr ascribe(ValuePtr v, TypePtr t);
  static ValuePtr nil();
  static ValuePtr cons(ValuePtr h, ValuePtr t);
  static ValuePtr boollit(bool b);
};

struct Comp {
  CompKind kind;

  ValuePtr v1, v2;                   // operands in value position
  CompPtr m1, m2;                    // subcomputations
  std::string var, var2;             // binders (Let, LetPair, CaseSum arms, ...)
  std::vector<VariantArm> arms;      // CaseVariant
  std::vector<ReceiveArm> rarms;     // SelRecv
  TypePtr ann;                       // NewCh / Spawn mailbox annotation
  TypePtr ann2;                      // Spawn result annotation (sync mode)
  CompPtr nil_body;                  // CaseList
  CompPtr cons_body;                 // CaseList

  static CompPtr app(ValuePtr f, ValuePtr a);
  static CompPtr let(std::string x, CompPtr m, CompPtr n);
  static CompPtr ret(ValuePtr v);
  static CompPtr letpair(std::string x, std::string y, ValuePtr v, CompPtr body);
  static CompPtr casesum(ValuePtr v, std::string xl, CompPtr ml, std::string xr, CompPtr mr);
  static CompPtr casevariant(ValuePtr v, std::vector<VariantArm> arms);
  static CompPtr unroll(ValuePtr v);
  static CompPtr give(ValuePtr v, ValuePtr chan);
  static CompPtr take(ValuePtr chan);
  static CompPtr fork(CompPtr m);
  static CompPtr newch(TypePtr carried);
  static CompPtr choose(ValuePtr a, ValuePtr b);
  static CompPtr spawn(TypePtr mailbox, CompPtr m);
  static CompPtr spawn2(TypePtr mailbox, TypePtr result, CompPtr m);
  static CompPtr send(ValuePtr v, ValuePtr target);
  static CompPtr receive();
  static CompPtr self();
  static CompPtr wait(ValuePtr v);
  static CompPtr selrecv(std::vector<ReceiveArm> arms);
  static CompPtr neg(ValuePtr v);
  static CompPtr add(ValuePtr a, ValuePtr b);
  static CompPtr gt(ValuePtr a, ValuePtr b);
  static CompPtr concat(ValuePtr a, ValuePtr b);
  static CompPtr seq(CompPtr m, CompPtr n);
  static CompPtr caselist(ValuePtr v, CompPtr nil_body, std::string hd, std::string tl,
                          CompPtr cons_body);
  static CompPtr letval(std::string x, ValuePtr v, CompPtr body);
  static CompPtr ifthen(ValuePtr cond, CompPtr then_m, CompPtr else_m);
};

// ------------------------------
// configurations
// ------------------------------

enum class Calc { Ch, Act };

struct Extensions {
  bool choice = false;
  bool sync = false;
  bool selrecv = false;
};

struct Binder {
  std::string name;
  TypePtr carried;   // channel carried type, or actor mailbox type
  TypePtr result;    // actor result type (sync mode only)
};

enum class LeafKind { Thread, Buffer, Actor };

struct Leaf {
  LeafKind kind;
  std::string name;               // Buffer / Actor
  CompPtr term;                   // Thread / Actor
  std::vector<ValuePtr> queue;    // Buffer contents / Actor mailbox

  static Leaf thread(CompPtr m);
  static Leaf buffer(std::string name, std::vector<ValuePtr> values);
  static Leaf actor(std::string name, CompPtr m, std::vector<ValuePtr> mailbox);
};

// A configuration kept in flattened form: all restrictions hoisted outside a
// multiset of leaves. Structural congruence is decided via normalize().
struct Config {
  Calc calc = Calc::Ch;
  std::vector<Binder> binders;
  std::vector<Leaf> leaves;
};

// Reduction rule labels for configuration steps.
enum class Rule {
  Give,
  Take,
  Fork,
  NewCh,
  ChooseL,
  ChooseR,
  Spawn,
  Send,
  SendSelf,
  Self,
  Receive,
  Wait,
  SelRecv,
  LiftM,
};

const char* rule_name(Rule r);

// ------------------------------
// errors
// ------------------------------

struct MMError : std::runtime_error {
  explicit MMError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : MMError {
  int line, column;
  ParseError(const std::string& msg, int line, int column)
      : MMError("parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " +
                msg),
        line(line),
        column(column) {}
};

struct TypeError : MMError {
  explicit TypeError(const std::string& msg) : MMError("type error: " + msg) {}
};

struct TranslateError : MMError {
  explicit TranslateError(const std::string& msg) : MMError("translate error: " + msg) {}
};

// Deterministic fresh-name source. Identifiers of the shape _<digits> are
// reserved for generated binders; parse() bumps the counter past any that
// appear in its input so generated names never collide.
class FreshNames {
 public:
  std::string next(const std::string& hint = "");
  void reserve_at_least(std::uint64_t n);

 private:
  std::uint64_t counter_ = 0;
};

}  // namespace mm

#endif  // MM_AST_HPP
