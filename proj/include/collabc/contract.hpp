#pragma once

#include <map>
#include <string>
#include <vector>

#include "collabc/csp.hpp"
#include "collabc/relations.hpp"
#include "collabc/verify.hpp"

namespace collabc::contract {

enum class AtomState { Disabled, Waiting, Executing, Done };

const char* state_name(AtomState s);

struct Atomic {
  std::string id;     // qualified name, e.g. "Broker.P1"
  std::string owner;  // owning participant
  enum Kind { Internal, Send, Receive } kind = Internal;
  std::string channel;
  std::string message;
  std::string label;     // work event or channel operation; empty when silent
  std::string receiver;  // receiving participant, send atomics only
  std::vector<int> activate;    // successor atomics made Waiting on completion
  std::vector<int> inactivate;  // rival atomics Disabled on completion
  std::vector<int> group;       // parallel join members (incl. self), empty if none
};

// The guard tables both the Solidity emitter and the twin simulator run on.
struct ContractModel {
  std::string name = "Collaboration";
  bool two_call = false;  // start/complete split instead of one-shot requests
  std::vector<Atomic> atomics;  // sorted by participant, then model order
  std::vector<std::pair<std::string, std::string>> counters;  // (channel, message)
  std::vector<std::string> participants;
  std::map<std::string, std::vector<int>> initials;  // participant -> atomic index
  std::map<std::string, std::vector<int>> finals;

  int find_atomic(const std::string& id) const;  // -1 when unknown
  int counter_index(const std::string& channel, const std::string& message) const;
};

struct RequestResult {
  bool accepted = false;
  std::string reason;  // set on rejection
  std::vector<std::tuple<int, AtomState, AtomState>> changes;
  // (channel, message, receiver) for messages forwarded by this request
  std::vector<std::tuple<std::string, std::string, std::string>> forwarded;
};

ContractModel build_contract_model(const relations::ReducedRelationSet& red,
                                   const csp::SyntaxTree& tree,
                                   const std::string& name = "Collaboration",
                                   bool two_call = false);

// One request against explicit runtime state. Rejected requests leave both
// vectors untouched. The atomic index must be valid.
RequestResult handle_request(const ContractModel& model,
                             std::vector<AtomState>& states,
                             std::vector<int>& pending, int atomic_index);

// Executes the contract semantics off-chain; behavior matches the emitted
// Solidity function for function.
class TwinSimulator {
 public:
  explicit TwinSimulator(const ContractModel& model);

  RequestResult request(const std::string& atomic_id);
  AtomState state(const std::string& atomic_id) const;
  bool is_final() const;

  struct LogEntry {
    int seq = 0;
    std::string atomic;
    bool accepted = false;
    std::string reason;
  };
  const std::vector<LogEntry>& log() const { return log_; }
  std::string render_log() const;  // seq<TAB>atomic<TAB>accepted<TAB>reason

  const std::vector<AtomState>& states() const { return states_; }
  const std::vector<int>& pending() const { return pending_; }

 private:
  const ContractModel& model_;
  std::vector<AtomState> states_;
  std::vector<int> pending_;
  std::vector<LogEntry> log_;
};

std::string emit_solidity(const ContractModel& model);

// Trace-set equality between the contract semantics and the verifier's
// bounded exploration of the specification (both directions).
verify::Verdict conformance_check(const csp::CspSpec& spec,
                                  const ContractModel& model,
                                  const verify::Bounds& bounds = {},
                                  std::size_t max_traces = 10000);

}  // namespace collabc::contract
