#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "collabc/csp.hpp"

namespace collabc::verify {

struct Bounds {
  std::size_t max_states = 1'000'000;
  std::size_t max_queue_depth = 1;  // cap on per-channel FIFO occupancy
};

struct Transition {
  enum Kind { Internal, Send, Receive };
  int from = -1;
  int to = -1;
  std::string participant;
  std::string label;  // event name, "ch!m" or "ch?m"
  Kind kind = Internal;
};

struct GlobalState {
  std::vector<csp::ProcessRef> procs;            // one continuation per participant
  std::vector<std::vector<std::string>> queues;  // one FIFO per channel
};

// Reachable portion of the interleaving semantics, explored breadth-first.
// States are deduplicated on a canonical textual key, so exploration order
// and counterexample extraction are deterministic.
struct StateGraph {
  std::vector<std::string> participants;
  std::vector<std::string> channels;
  std::vector<GlobalState> states;
  std::vector<Transition> transitions;
  std::vector<std::vector<int>> out;  // state index -> transition indices
  std::vector<int> pred;              // BFS tree: incoming transition index, -1 at root
  std::vector<std::size_t> depth;     // BFS distance from the initial state
  std::vector<bool> expanded;         // false only when exploration was cut short
  int initial = 0;
  bool truncated = false;
  std::string truncation_reason;

  bool is_terminal(int state) const;        // every participant reduced to Skip
  std::vector<Transition> trace_to(int state) const;
};

struct Verdict {
  enum Result { Pass, Fail, Inconclusive };
  std::string property;
  Result result = Pass;
  std::string detail;
  std::vector<Transition> counterexample;  // replayable from the initial state
  std::size_t states_explored = 0;
  std::size_t max_depth = 0;
  bool truncated = false;
};

StateGraph explore(const csp::CspSpec& spec, const Bounds& bounds = {});

// The four soundness properties, in order: deadlock-freedom, terminability,
// task-reachability, message-drainage.
std::vector<Verdict> check_soundness(const csp::CspSpec& spec,
                                     const Bounds& bounds = {});

// Is a transition with the given label (event name or channel operation)
// reachable? Passing verdicts carry a witness trace ending in that step.
Verdict check_reachability(const csp::CspSpec& spec, const std::string& label,
                           const Bounds& bounds = {});

// One line per step: "participant<TAB>label".
std::string format_trace(const std::vector<Transition>& trace);

// Every projected label sequence (channel operations and work events; framing
// events dropped) over all paths of the graph, prefix-closed. `exact` is
// cleared when a cycle is met or the path budget runs out.
std::set<std::vector<std::string>> projected_traces(const StateGraph& graph,
                                                    std::size_t max_traces,
                                                    bool& exact);

bool projectable_label(const std::string& label);

}  // namespace collabc::verify
