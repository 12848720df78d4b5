#include "mm/ops.hpp"
#include "mm/semantics.hpp"

namespace mm {

namespace {

[[noreturn]] void misclassified(const char* what, const Leaf& leaf) {
  throw MMError(std::string("progress classification failed (") + what +
                "): " + (leaf.term ? print_comp(leaf.term) : leaf.name));
}

void require_quiescent(const Config& cfg, const Extensions& exts) {
  if (!step_config(cfg, exts).empty())
    throw MMError("classify_progress called on a configuration that can still step");
}

std::optional<std::string> blocked_name(const ValuePtr& v) {
  auto w = strip_ascribe(v);
  if (w && w->kind == ValKind::Name) return w->name;
  return std::nullopt;
}

}  // namespace

std::vector<LeafTag> classify_progress_ch(const Config& cfg, const Extensions& exts) {
  require_quiescent(cfg, exts);
  std::vector<LeafTag> tags;
  tags.reserve(cfg.leaves.size());
  for (const auto& leaf : cfg.leaves) {
    if (leaf.kind == LeafKind::Buffer) {
      tags.push_back(LeafTag::Buffer);
      continue;
    }
    if (leaf.kind != LeafKind::Thread) misclassified("unexpected leaf kind", leaf);
    auto st = step_term(leaf.term);
    if (st.status == TermStatus::Finished) {
      tags.push_back(LeafTag::FullyReduced);
      continue;
    }
    if (st.status != TermStatus::Blocked) misclassified("stuck term", leaf);
    auto dec = decompose(leaf.term);
    if (dec.head->kind == CompKind::Take) {
      auto a = blocked_name(dec.head->v1);
      if (!a) misclassified("take on a non-name", leaf);
      for (const auto& other : cfg.leaves) {
        if (other.kind == LeafKind::Buffer && other.name == *a && !other.queue.empty())
          misclassified("take reported blocked with a non-empty buffer", leaf);
      }
      tags.push_back(LeafTag::BlockedTake);
      continue;
    }
    if (exts.choice && dec.head->kind == CompKind::Choose) {
      tags.push_back(LeafTag::BlockedChoose);
      continue;
    }
    misclassified("blocked on an unexpected primitive", leaf);
  }
  return tags;
}

std::vector<LeafTag> classify_progress_act(const Config& cfg, const Extensions& exts) {
  require_quiescent(cfg, exts);
  std::vector<LeafTag> tags;
  tags.reserve(cfg.leaves.size());
  for (const auto& leaf : cfg.leaves) {
    if (leaf.kind != LeafKind::Actor) misclassified("unexpected leaf kind", leaf);
    auto st = step_term(leaf.term);
    if (st.status == TermStatus::Finished) {
      tags.push_back(LeafTag::FullyReduced);
      continue;
    }
    if (st.status != TermStatus::Blocked) misclassified("stuck term", leaf);
    auto dec = decompose(leaf.term);
    switch (dec.head->kind) {
      case CompKind::Receive:
        if (!leaf.queue.empty()) misclassified("receive blocked with a non-empty mailbox", leaf);
        tags.push_back(LeafTag::BlockedReceive);
        break;
      case CompKind::SelRecv: {
        if (!exts.selrecv) misclassified("selective receive outside extension mode", leaf);
        if (eval_selective_receive(dec.head->rarms, leaf.queue))
          misclassified("selective receive blocked with a matching message", leaf);
        tags.push_back(LeafTag::BlockedSelRecv);
        break;
      }
      case CompKind::Wait: {
        if (!exts.sync) misclassified("wait outside sync mode", leaf);
        tags.push_back(LeafTag::BlockedWait);
        break;
      }
      default:
        misclassified("blocked on an unexpected primitive", leaf);
    }
  }
  return tags;
}

}  // namespace mm
