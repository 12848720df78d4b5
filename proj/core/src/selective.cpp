#include "mm/ops.hpp"
#include "mm/semantics.hpp"

namespace mm {

namespace {

// matches(c, <l' = V>): the labels agree and the guard, with the payload
// substituted, reduces to true.
bool clause_matches(const ReceiveArm& clause, const ValuePtr& message, int fuel) {
  auto msg = strip_ascribe(message);
  if (!msg || msg->kind != ValKind::Variant) {
    throw GuardIllTypedError("mailbox value is not a variant: " + print_value(message));
  }
  if (msg->label != clause.label) return false;
  auto guard = subst(clause.guard, msg->v1, clause.var);
  auto res = eval_term(guard, fuel);
  switch (res.status) {
    case TermStatus::Finished: {
      auto b = as_bool(res.term->v1);
      if (!b) throw GuardIllTypedError("guard returned a non-boolean: " + print_value(res.term->v1));
      return *b;
    }
    case TermStatus::Stepped:
      throw GuardFuelError(print_comp(clause.guard));
    default:
      throw GuardIllTypedError("guard got stuck: " + print_comp(res.term));
  }
}

}  // namespace

std::optional<SelRecvMatch> eval_selective_receive(const std::vector<ReceiveArm>& clauses,
                                                   const std::vector<ValuePtr>& mailbox,
                                                   int fuel) {
  for (std::size_t k = 0; k < mailbox.size(); k++) {
    for (std::size_t l = 0; l < clauses.size(); l++) {
      if (clause_matches(clauses[l], mailbox[k], fuel)) {
        SelRecvMatch m;
        m.message_index = k;
        m.clause_index = l;
        m.bound = strip_ascribe(mailbox[k])->v1;
        m.residual = mailbox;
        m.residual.erase(m.residual.begin() + static_cast<long>(k));
        return m;
      }
    }
  }
  return std::nullopt;
}

const char* leaf_tag_name(LeafTag t) {
  switch (t) {
    case LeafTag::Buffer: return "Buffer";
    case LeafTag::FullyReduced: return "FullyReduced";
    case LeafTag::BlockedTake: return "BlockedTake";
    case LeafTag::BlockedChoose: return "BlockedChoose";
    case LeafTag::BlockedReceive: return "BlockedReceive";
    case LeafTag::BlockedSelRecv: return "BlockedSelRecv";
    case LeafTag::BlockedWait: return "BlockedWait";
  }
  return "?";
}

}  // namespace mm
