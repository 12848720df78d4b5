#include "mm/ast.hpp"

#include <algorithm>

namespace mm {

namespace {
std::shared_ptr<Type> mk(TypeKind k) {
  auto t = std::make_shared<Type>();
  t->kind = k;
  return t;
}
}  // namespace

TypePtr Type::unit() {
  static TypePtr t = mk(TypeKind::Unit);
  return t;
}

TypePtr Type::integer() {
  static TypePtr t = mk(TypeKind::Int);
  return t;
}

TypePtr Type::fun(TypePtr a, TypePtr b) {
  auto t = mk(TypeKind::Fun);
  t->arg = std::move(a);
  t->ret = std::move(b);
  return t;
}

TypePtr Type::fun(TypePtr a, Effect e, TypePtr b) {
  auto t = mk(TypeKind::Fun);
  t->arg = std::move(a);
  t->eff = std::move(e);
  t->ret = std::move(b);
  return t;
}

TypePtr Type::chan(TypePtr carried) {
  auto t = mk(TypeKind::Chan);
  t->carried = std::move(carried);
  return t;
}

TypePtr Type::actor(TypePtr mailbox) {
  auto t = mk(TypeKind::Actor);
  t->carried = std::move(mailbox);
  return t;
}

TypePtr Type::actor2(TypePtr mailbox, TypePtr result) {
  auto t = mk(TypeKind::Actor2);
  t->carried = std::move(mailbox);
  t->result = std::move(result);
  return t;
}

TypePtr Type::prod(TypePtr l, TypePtr r) {
  auto t = mk(TypeKind::Prod);
  t->left = std::move(l);
  t->right = std::move(r);
  return t;
}

TypePtr Type::sum(TypePtr l, TypePtr r) {
  auto t = mk(TypeKind::Sum);
  t->left = std::move(l);
  t->right = std::move(r);
  return t;
}

TypePtr Type::variant(std::vector<std::pair<std::string, TypePtr>> labels) {
  auto t = mk(TypeKind::Variant);
  std::sort(labels.begin(), labels.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < labels.size(); i++) {
    if (labels[i - 1].first == labels[i].first) {
      throw MMError("variant type has duplicate label '" + labels[i].first + "'");
    }
  }
  t->labels = std::move(labels);
  return t;
}

TypePtr Type::mu(std::string var, TypePtr body) {
  auto t = mk(TypeKind::Mu);
  t->var = std::move(var);
  t->body = std::move(body);
  return t;
}

TypePtr Type::tvar(std::string var) {
  auto t = mk(TypeKind::Var);
  t->var = std::move(var);
  return t;
}

TypePtr Type::list(TypePtr elem) {
  return mu("X", sum(unit(), prod(std::move(elem), tvar("X"))));
}

TypePtr Type::boolean() { return sum(unit(), unit()); }

namespace {
std::shared_ptr<Value> mkv(ValKind k) {
  auto v = std::make_shared<Value>();
  v->kind = k;
  return v;
}
std::shared_ptr<Comp> mkc(CompKind k) {
  auto c = std::make_shared<Comp>();
  c->kind = k;
  return c;
}
}  // namespace

ValuePtr Value::mkvar(std::string x) {
  auto v = mkv(ValKind::Var);
  v->name = std::move(x);
  return v;
}

ValuePtr Value::mkname(std::string a) {
  auto v = mkv(ValKind::Name);
  v->name = std::move(a);
  return v;
}

ValuePtr Value::lam(std::string x, TypePtr t, CompPtr body) {
  auto v = mkv(ValKind::Lam);
  v->var = std::move(x);
  v->ty = std::move(t);
  v->body = std::move(body);
  return v;
}

ValuePtr Value::lam(std::string x, TypePtr t, Effect e, CompPtr body) {
  auto v = lam(std::move(x), std::move(t), std::move(body));
  const_cast<Value*>(v.get())->eff = std::move(e);
  return v;
}

ValuePtr Value::rec(std::string f, std::string x, TypePtr argt, TypePtr rett, CompPtr body) {
  auto v = mkv(ValKind::Rec);
  v->fname = std::move(f);
  v->var = std::move(x);
  v->ty = std::move(argt);
  v->ret = std::move(rett);
  v->body = std::move(body);
  return v;
}

ValuePtr Value::rec(std::string f, std::string x, TypePtr argt, TypePtr rett, Effect e,
                    CompPtr body) {
  auto v = rec(std::move(f), std::move(x), std::move(argt), std::move(rett), std::move(body));
  const_cast<Value*>(v.get())->eff = std::move(e);
  return v;
}

ValuePtr Value::unit() {
  static ValuePtr v = mkv(ValKind::Unit);
  return v;
}

ValuePtr Value::pair(ValuePtr a, ValuePtr b) {
  auto v = mkv(ValKind::Pair);
  v->v1 = std::move(a);
  v->v2 = std::move(b);
  return v;
}

ValuePtr Value::inl(ValuePtr x) {
  auto v = mkv(ValKind::Inl);
  v->v1 = std::move(x);
  return v;
}

ValuePtr Value::inr(ValuePtr x) {
  auto v = mkv(ValKind::Inr);
  v->v1 = std::move(x);
  return v;
}

ValuePtr Value::variant(std::string label, ValuePtr x) {
  auto v = mkv(ValKind::Variant);
  v->label = std::move(label);
  v->v1 = std::move(x);
  return v;
}

ValuePtr Value::roll(ValuePtr x) {
  auto v = mkv(ValKind::Roll);
  v->v1 = std::move(x);
  return v;
}

ValuePtr Value::integer(std::int64_t n) {
  auto v = mkv(ValKind::Int);
  v->intval = n;
  return v;
}

ValuePtr Value::error() {
  static ValuePtr v = mkv(ValKind::Error);
  return v;
}

ValuePtr Value::ascribe(ValuePtr x, TypePtr t) {
  auto v = mkv(ValKind::Ascribe);
  v->v1 = std::move(x);
  v->ty = std::move(t);
  return v;
}

ValuePtr Value::nil() {
  static ValuePtr v = mkv(ValKind::Nil);
  return v;
}

ValuePtr Value::cons(ValuePtr h, ValuePtr t) {
  auto v = mkv(ValKind::Cons);
  v->v1 = std::move(h);
  v->v2 = std::move(t);
  return v;
}

ValuePtr Value::boollit(bool b) {
  auto v = mkv(ValKind::BoolLit);
  v->boolval = b;
  return v;
}

CompPtr Comp::app(ValuePtr f, ValuePtr a) {
  auto c = mkc(CompKind::App);
  c->v1 = std::move(f);
  c->v2 = std::move(a);
  return c;
}

CompPtr Comp::let(std::string x, CompPtr m, CompPtr n) {
  auto c = mkc(CompKind::Let);
  c->var = std::move(x);
  c->m1 = std::move(m);
  c->m2 = std::move(n);
  return c;
}

CompPtr Comp::ret(ValuePtr v) {
  auto c = mkc(CompKind::Return);
  c->v1 = std::move(v);
  return c;
}

CompPtr Comp::letpair(std::string x, std::string y, ValuePtr v, CompPtr body) {
  auto c = mkc(CompKind::LetPair);
  c->var = std::move(x);
  c->var2 = std::move(y);
  c->v1 = std::move(v);
  c->m1 = std::move(body);
  return c;
}

CompPtr Comp::casesum(ValuePtr v, std::string xl, CompPtr ml, std::string xr, CompPtr mr) {
  auto c = mkc(CompKind::CaseSum);
  c->v1 = std::move(v);
  c->var = std::move(xl);
  c->m1 = std::move(ml);
  c->var2 = std::move(xr);
  c->m2 = std::move(mr);
  return c;
}

CompPtr Comp::casevariant(ValuePtr v, std::vector<VariantArm> arms) {
  auto c = mkc(CompKind::CaseVariant);
  c->v1 = std::move(v);
  c->arms = std::move(arms);
  return c;
}

CompPtr Comp::unroll(ValuePtr v) {
  auto c = mkc(CompKind::Unroll);
  c->v1 = std::move(v);
  return c;
}

CompPtr Comp::give(ValuePtr v, ValuePtr chan) {
  auto c = mkc(CompKind::Give);
  c->v1 = std::move(v);
  c->v2 = std::move(chan);
  return c;
}

CompPtr Comp::take(ValuePtr chan) {
  auto c = mkc(CompKind::Take);
  c->v1 = std::move(chan);
  return c;
}

CompPtr Comp::fork(CompPtr m) {
  auto c = mkc(CompKind::Fork);
  c->m1 = std::move(m);
  return c;
}

CompPtr Comp::newch(TypePtr carried) {
  auto c = mkc(CompKind::NewCh);
  c->ann = std::move(carried);
  return c;
}

CompPtr Comp::choose(ValuePtr a, ValuePtr b) {
  auto c = mkc(CompKind::Choose);
  c->v1 = std::move(a);
  c->v2 = std::move(b);
  return c;
}

CompPtr Comp::spawn(TypePtr mailbox, CompPtr m) {
  auto c = mkc(CompKind::Spawn);
  c->ann = std::move(mailbox);
  c->m1 = std::move(m);
  return c;
}

CompPtr Comp::spawn2(TypePtr mailbox, TypePtr result, CompPtr m) {
  auto c = spawn(std::move(mailbox), std::move(m));
  const_cast<Comp*>(c.get())->ann2 = std::move(result);
  return c;
}

CompPtr Comp::send(ValuePtr v, ValuePtr target) {
  auto c = mkc(CompKind::Send);
  c->v1 = std::move(v);
  c->v2 = std::move(target);
  return c;
}

CompPtr Comp::receive() {
  static CompPtr c = mkc(CompKind::Receive);
  return c;
}

CompPtr Comp::self() {
  static CompPtr c = mkc(CompKind::SelfPid);
  return c;
}

CompPtr Comp::wait(ValuePtr v) {
  auto c = mkc(CompKind::Wait);
  c->v1 = std::move(v);
  return c;
}

CompPtr Comp::selrecv(std::vector<ReceiveArm> arms) {
  auto c = mkc(CompKind::SelRecv);
  c->rarms = std::move(arms);
  return c;
}

CompPtr Comp::neg(ValuePtr v) {
  auto c = mkc(CompKind::Neg);
  c->v1 = std::move(v);
  return c;
}

CompPtr Comp::add(ValuePtr a, ValuePtr b) {
  auto c = mkc(CompKind::Add);
  c->v1 = std::move(a);
  c->v2 = std::move(b);
  return c;
}

CompPtr Comp::gt(ValuePtr a, ValuePtr b) {
  auto c = mkc(CompKind::Gt);
  c->v1 = std::move(a);
  c->v2 = std::move(b);
  return c;
}

CompPtr Comp::concat(ValuePtr a, ValuePtr b) {
  auto c = mkc(CompKind::Concat);
  c->v1 = std::move(a);
  c->v2 = std::move(b);
  return c;
}

CompPtr Comp::seq(CompPtr m, CompPtr n) {
  auto c = mkc(CompKind::Seq);
  c->m1 = std::move(m);
  c->m2 = std::move(n);
  return c;
}

CompPtr Comp::caselist(ValuePtr v, CompPtr nil_body, std::string hd, std::string tl,
                       CompPtr cons_body) {
  auto c = mkc(CompKind::CaseList);
  c->v1 = std::move(v);
  c->nil_body = std::move(nil_body);
  c->var = std::move(hd);
  c->var2 = std::move(tl);
  c->cons_body = std::move(cons_body);
  return c;
}

CompPtr Comp::letval(std::string x, ValuePtr v, CompPtr body) {
  auto c = mkc(CompKind::LetVal);
  c->var = std::move(x);
  c->v1 = std::move(v);
  c->m1 = std::move(body);
  return c;
}

CompPtr Comp::ifthen(ValuePtr cond, CompPtr then_m, CompPtr else_m) {
  auto c = mkc(CompKind::If);
  c->v1 = std::move(cond);
  c->m1 = std::move(then_m);
  c->m2 = std::move(else_m);
  return c;
}

Leaf Leaf::thread(CompPtr m) {
  Leaf l;
  l.kind = LeafKind::Thread;
  l.term = std::move(m);
  return l;
}

Leaf Leaf::buffer(std::string name, std::vector<ValuePtr> values) {
  Leaf l;
  l.kind = LeafKind::Buffer;
  l.name = std::move(name);
  l.queue = std::move(values);
  return l;
}

Leaf Leaf::actor(std::string name, CompPtr m, std::vector<ValuePtr> mailbox) {
  Leaf l;
  l.kind = LeafKind::Actor;
  l.name = std::move(name);
  l.term = std::move(m);
  l.queue = std::move(mailbox);
  return l;
}

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Give: return "Give";
    case Rule::Take: return "Take";
    case Rule::Fork: return "Fork";
    case Rule::NewCh: return "NewCh";
    case Rule::ChooseL: return "ChooseL";
    case Rule::ChooseR: return "ChooseR";
    case Rule::Spawn: return "Spawn";
    case Rule::Send: return "Send";
    case Rule::SendSelf: return "SendSelf";
    case Rule::Self: return "Self";
    case Rule::Receive: return "Receive";
    case Rule::Wait: return "Wait";
    case Rule::SelRecv: return "SelRecv";
    case Rule::LiftM: return "LiftM";
  }
  return "?";
}

std::string FreshNames::next(const std::string& hint) {
  (void)hint;
  return "_" + std::to_string(counter_++);
}

void FreshNames::reserve_at_least(std::uint64_t n) {
  if (counter_ < n) counter_ = n;
}

}  // namespace mm
