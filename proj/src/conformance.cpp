#include <functional>
#include <set>

#include "collabc/contract.hpp"

namespace collabc::contract {

namespace {

std::string runtime_key(const std::vector<AtomState>& states,
                        const std::vector<int>& pending) {
  std::string k;
  for (AtomState s : states) k += static_cast<char>('0' + static_cast<int>(s));
  k += '|';
  for (int p : pending) {
    k += std::to_string(p);
    k += ',';
  }
  return k;
}

std::string join_labels(const std::vector<std::string>& trace) {
  if (trace.empty()) return "<empty>";
  std::string out;
  for (const auto& l : trace) {
    if (!out.empty()) out += " ";
    out += l;
  }
  return out;
}

// All label sequences of accepted request runs, prefix-closed. A request
// contributes its label at the step where the observable effect happens: the
// single completing call normally, the reserving start call for receives in
// two-call mode.
std::set<std::vector<std::string>> contract_traces(const ContractModel& model,
                                                   std::size_t max_traces,
                                                   bool& exact) {
  exact = true;
  std::set<std::vector<std::string>> out;
  out.emplace();  // the empty trace; every prefix-closed set contains it

  // Runtime states and prefixes are interned, and visited (state, prefix)
  // pairs skipped -- the same scheme as verify::projected_traces -- so runs
  // differing only in unobservable call order are walked once.
  std::map<std::string, int> state_ids;
  std::vector<std::vector<std::string>> prefixes{{}};
  std::map<std::pair<int, std::string>, int> trie;  // (prefix, label) -> prefix
  std::set<std::pair<int, int>> visited;            // (state, prefix)
  std::set<std::pair<int, int>> on_path;

  auto intern_state = [&](const std::string& key) {
    int fresh = static_cast<int>(state_ids.size());
    return state_ids.emplace(key, fresh).first->second;
  };

  std::function<void(std::vector<AtomState>&, std::vector<int>&, int, int)>
      walk = [&](std::vector<AtomState>& states, std::vector<int>& pending,
                 int sid, int pre) {
        on_path.insert({sid, pre});
        for (std::size_t i = 0; i < model.atomics.size(); ++i) {
          std::vector<AtomState> s2 = states;
          std::vector<int> p2 = pending;
          RequestResult res = handle_request(model, s2, p2, static_cast<int>(i));
          if (!res.accepted) continue;
          bool observable = false;
          for (const auto& [atom, from, to] : res.changes) {
            if (atom != static_cast<int>(i)) continue;
            if (model.two_call && model.atomics[i].kind == Atomic::Receive)
              observable = to == AtomState::Executing;
            else
              observable = to == AtomState::Done;
          }
          int next_pre = pre;
          if (observable && !model.atomics[i].label.empty()) {
            auto probe = trie.find({pre, model.atomics[i].label});
            if (probe != trie.end()) {
              next_pre = probe->second;
            } else {
              if (out.size() >= max_traces) {
                exact = false;  // budget spent; the result is a strict subset
                break;
              }
              next_pre = static_cast<int>(prefixes.size());
              std::vector<std::string> ext = prefixes[pre];
              ext.push_back(model.atomics[i].label);
              out.insert(ext);
              prefixes.push_back(std::move(ext));
              trie.emplace(std::pair{pre, model.atomics[i].label}, next_pre);
            }
          }
          int next_sid = intern_state(runtime_key(s2, p2));
          if (on_path.count({next_sid, next_pre})) {
            exact = false;  // a loop admits unboundedly many traces
            continue;
          }
          if (visited.insert({next_sid, next_pre}).second)
            walk(s2, p2, next_sid, next_pre);
          if (!exact) break;
        }
        on_path.erase({sid, pre});
      };

  std::vector<AtomState> states(model.atomics.size(), AtomState::Disabled);
  std::vector<int> pending(model.counters.size(), 0);
  for (const auto& [participant, atoms] : model.initials)
    for (int i : atoms) states[static_cast<std::size_t>(i)] = AtomState::Waiting;
  int sid = intern_state(runtime_key(states, pending));
  visited.insert({sid, 0});
  walk(states, pending, sid, 0);
  return out;
}

}  // namespace

verify::Verdict conformance_check(const csp::CspSpec& spec,
                                  const ContractModel& model,
                                  const verify::Bounds& bounds,
                                  std::size_t max_traces) {
  verify::Verdict v;
  v.property = "conformance";

  verify::StateGraph graph = verify::explore(spec, bounds);
  v.states_explored = graph.states.size();
  for (std::size_t d : graph.depth) v.max_depth = std::max(v.max_depth, d);
  v.truncated = graph.truncated;
  if (graph.truncated) {
    v.result = verify::Verdict::Inconclusive;
    v.detail = "exploration truncated: " + graph.truncation_reason;
    return v;
  }

  bool model_exact = true;
  auto model_side = verify::projected_traces(graph, max_traces, model_exact);
  bool contract_exact = true;
  auto contract_side = contract_traces(model, max_traces, contract_exact);
  if (!model_exact || !contract_exact) {
    v.result = verify::Verdict::Inconclusive;
    v.detail = "trace budget of " + std::to_string(max_traces) + " exceeded";
    return v;
  }

  for (const auto& t : model_side)
    if (!contract_side.count(t)) {
      v.result = verify::Verdict::Fail;
      v.detail = "model trace rejected by contract: " + join_labels(t);
      return v;
    }
  for (const auto& t : contract_side)
    if (!model_side.count(t)) {
      v.result = verify::Verdict::Fail;
      v.detail = "contract accepts a sequence outside the model: " + join_labels(t);
      return v;
    }
  v.result = verify::Verdict::Pass;
  v.detail = std::to_string(model_side.size()) + " traces equal in both directions";
  return v;
}

}  // namespace collabc::contract
