#include "proviq/errors.hpp"

namespace proviq {

const char* to_string(ModuleErrorKind kind) noexcept {
  switch (kind) {
    case ModuleErrorKind::Backend: return "Backend";
    case ModuleErrorKind::EmptyClip: return "EmptyClip";
    case ModuleErrorKind::EmptyCounter: return "EmptyCounter";
    case ModuleErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ModuleErrorKind::NoTranscript: return "NoTranscript";
    case ModuleErrorKind::UnparseableChoice: return "UnparseableChoice";
    case ModuleErrorKind::SummaryFailed: return "SummaryFailed";
    case ModuleErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

const char* to_string(BudgetKind kind) noexcept {
  switch (kind) {
    case BudgetKind::Statements: return "statements";
    case BudgetKind::BackendCalls: return "backend_calls";
    case BudgetKind::WallClock: return "wall_clock";
  }
  return "unknown";
}

}  // namespace proviq
