#pragma once

#include <stdexcept>
#include <string>

namespace linhyp {

enum class errc {
  wrong_edge_size,
  vertex_out_of_range,
  duplicate_edge,
  bad_set_size,
  too_few_vertices,
  regime_mismatch,
  out_of_range,
  budget_exceeded,
  not_linear_k,
  negative_t,
  precondition_failed,
  no_such_cluster,
  too_few_free_edges,
  stale_descriptor,
  edge_absent,
  edge_present,
  zero_trials,
  acceptance_too_low,
  parse_error,
  usage_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::wrong_edge_size: return "WrongEdgeSize";
    case errc::vertex_out_of_range: return "VertexOutOfRange";
    case errc::duplicate_edge: return "DuplicateEdge";
    case errc::bad_set_size: return "BadSetSize";
    case errc::too_few_vertices: return "TooFewVertices";
    case errc::regime_mismatch: return "RegimeMismatch";
    case errc::out_of_range: return "OutOfRange";
    case errc::budget_exceeded: return "BudgetExceeded";
    case errc::not_linear_k: return "NotLinearK";
    case errc::negative_t: return "NegativeT";
    case errc::precondition_failed: return "PreconditionFailed";
    case errc::no_such_cluster: return "NoSuchCluster";
    case errc::too_few_free_edges: return "TooFewFreeEdges";
    case errc::stale_descriptor: return "StaleDescriptor";
    case errc::edge_absent: return "EdgeAbsent";
    case errc::edge_present: return "EdgePresent";
    case errc::zero_trials: return "ZeroTrials";
    case errc::acceptance_too_low: return "AcceptanceTooLow";
    case errc::parse_error: return "ParseError";
    case errc::usage_error: return "UsageError";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace linhyp
