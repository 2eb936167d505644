#pragma once

// Shared fixtures for the test binaries: file loading plus a seeded random
// model generator feeding the property suites.

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "collabc/contract.hpp"
#include "collabc/error.hpp"
#include "collabc/model.hpp"
#include "collabc/relations.hpp"
#include "collabc/translate.hpp"
#include "collabc/verify.hpp"

namespace testsupport {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Replays a counterexample transition by transition against a fresh
// exploration of the same specification. Several transitions out of a state
// can share one (participant, label) pair — duplicated framing events across
// parallel branches do — so the walk keeps every state the prefix can reach.
inline bool replayable(const collabc::csp::CspSpec& spec,
                       const std::vector<collabc::verify::Transition>& trace) {
  collabc::verify::StateGraph g = collabc::verify::explore(spec);
  std::vector<int> frontier{g.initial};
  for (const collabc::verify::Transition& step : trace) {
    std::vector<int> next;
    for (int at : frontier) {
      for (int t : g.out[static_cast<std::size_t>(at)]) {
        const collabc::verify::Transition& cand =
            g.transitions[static_cast<std::size_t>(t)];
        if (cand.participant == step.participant && cand.label == step.label)
          next.push_back(cand.to);
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (next.empty()) return false;
    frontier = std::move(next);
  }
  return true;
}

// Size envelope for generated models. Exploration-backed properties use the
// small envelope so state spaces stay in the low thousands.
struct GenLimits {
  int max_pools = 3;
  int max_flows = 5;
  int max_depth = 2;
};

inline constexpr GenLimits kSmallLimits{2, 3, 1};

// Generates structurally valid collaboration models: every declared message
// flow is matched by exactly one sndTask in its sender pool and one rcvTask
// in its receiver pool, gateways have at least two non-empty branches, and
// event gates lead every branch with a receive. Soundness is not guaranteed
// (a receive may sit on a branch whose sender never fires), which is exactly
// the input class the robustness properties want.
class ModelGen {
 public:
  explicit ModelGen(unsigned seed, GenLimits limits = {})
      : rng_(seed), limits_(limits) {}

  collabc::model::CollaborationModel operator()() {
    namespace m = collabc::model;
    m::CollaborationModel out;
    id_counter_ = 0;
    static const char* kNames[] = {"OrgA", "OrgB", "OrgC", "OrgD"};
    int pools = pick(2, limits_.max_pools);
    int flows = pick(0, limits_.max_flows);
    std::vector<std::vector<Obligation>> duty(static_cast<std::size_t>(pools));
    for (int k = 0; k < flows; ++k) {
      int snd = pick(0, pools - 1);
      int rcv = (snd + pick(1, pools - 1)) % pools;
      std::string ch = "ch" + std::to_string(k + 1);
      std::string msg = "Msg" + std::to_string(k + 1);
      out.message_flows.push_back({ch, kNames[snd], kNames[rcv], msg});
      duty[static_cast<std::size_t>(snd)].push_back({true, ch, msg});
      duty[static_cast<std::size_t>(rcv)].push_back({false, ch, msg});
    }
    for (int i = 0; i < pools; ++i) {
      m::Pool pool;
      pool.name = kNames[i];
      auto& pot = duty[static_cast<std::size_t>(i)];
      std::shuffle(pot.begin(), pot.end(), rng_);
      pool.elements = shape(pot, limits_.max_depth);
      flow_counter_ = 0;
      pool_tag_ = std::string(1, static_cast<char>('a' + i));
      std::string entry = fresh_flow();
      std::string exit = fresh_flow();
      assign_flows(pool.elements, entry, exit);
      out.pools.push_back(std::move(pool));
    }
    return out;
  }

 private:
  struct Obligation {
    bool send = false;
    std::string channel, message;
  };

  int pick(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool coin(int num, int den) { return pick(1, den) <= num; }

  std::string next_id(const char* tag) {
    return tag + std::to_string(++id_counter_);
  }
  std::string fresh_flow() {
    return pool_tag_ + std::to_string(++flow_counter_);
  }

  collabc::model::Element internal_task() {
    collabc::model::Element e;
    e.kind = collabc::model::ElementKind::Task;
    e.id = next_id("t");
    return e;
  }

  collabc::model::Element message_task(const Obligation& o) {
    collabc::model::Element e;
    e.kind = o.send ? collabc::model::ElementKind::SndTask
                    : collabc::model::ElementKind::RcvTask;
    e.id = next_id("t");
    e.channel = o.channel;
    e.message = o.message;
    return e;
  }

  // Consumes the whole pot into a non-empty element sequence; flows are
  // filled in by assign_flows afterwards.
  collabc::model::ElementList shape(std::vector<Obligation>& pot, int depth) {
    collabc::model::ElementList out;
    int extras = 0;
    while (!pot.empty()) {
      int roll = pick(0, 9);
      if (depth > 0 && roll >= 7 && pot.size() >= 2) {
        out.push_back(gateway(pot, depth));
      } else if (roll == 6 && extras < 2) {
        ++extras;
        out.push_back(internal_task());
      } else {
        Obligation o = pot.front();
        pot.erase(pot.begin());
        out.push_back(message_task(o));
      }
    }
    if (out.empty() || coin(3, 10)) out.push_back(internal_task());
    return out;
  }

  collabc::model::Element gateway(std::vector<Obligation>& pot, int depth) {
    namespace m = collabc::model;
    int take = pick(2, static_cast<int>(pot.size()));
    std::vector<Obligation> slice(pot.begin(), pot.begin() + take);
    pot.erase(pot.begin(), pot.begin() + take);
    int branches = pick(2, 3);
    int recvs = static_cast<int>(std::count_if(
        slice.begin(), slice.end(), [](const Obligation& o) { return !o.send; }));

    m::Element gate;
    gate.id = next_id("g");
    if (recvs >= branches && coin(2, 5)) {
      gate.kind = m::ElementKind::EventGate;
      std::vector<Obligation> heads;
      for (auto it = slice.begin();
           it != slice.end() && static_cast<int>(heads.size()) < branches;) {
        if (!it->send) {
          heads.push_back(*it);
          it = slice.erase(it);
        } else {
          ++it;
        }
      }
      auto sub = split(slice, branches);
      for (int b = 0; b < branches; ++b) {
        m::ElementList body = shape(sub[static_cast<std::size_t>(b)], depth - 1);
        body.insert(body.begin(), message_task(heads[static_cast<std::size_t>(b)]));
        gate.branches.push_back(std::move(body));
      }
    } else {
      gate.kind = coin(1, 2) ? m::ElementKind::AndGate : m::ElementKind::XorGate;
      auto sub = split(slice, branches);
      for (int b = 0; b < branches; ++b)
        gate.branches.push_back(shape(sub[static_cast<std::size_t>(b)], depth - 1));
    }
    return gate;
  }

  std::vector<std::vector<Obligation>> split(std::vector<Obligation>& slice,
                                             int n) {
    std::vector<std::vector<Obligation>> sub(static_cast<std::size_t>(n));
    for (Obligation& o : slice)
      sub[static_cast<std::size_t>(pick(0, n - 1))].push_back(std::move(o));
    return sub;
  }

  // Chains flow names through a sequence; gateway branches share the gate's
  // own boundary flows, matching the textual format's convention.
  void assign_flows(collabc::model::ElementList& elems, const std::string& in,
                    const std::string& out) {
    std::string cur = in;
    for (std::size_t i = 0; i < elems.size(); ++i) {
      collabc::model::Element& e = elems[i];
      e.flow_in = cur;
      e.flow_out = i + 1 == elems.size() ? out : fresh_flow();
      for (collabc::model::ElementList& b : e.branches)
        assign_flows(b, e.flow_in, e.flow_out);
      cur = e.flow_out;
    }
  }

  std::mt19937 rng_;
  GenLimits limits_;
  int id_counter_ = 0;
  int flow_counter_ = 0;
  std::string pool_tag_;
};

// --- randomized property families -----------------------------------------
//
// Each family runs `n` independent seeds and reports how many cases executed
// and how many violated the property. The first violation is kept verbatim
// so a failing run points straight at a reproducer seed.

struct PropertyOutcome {
  int cases = 0;
  int failures = 0;
  std::string first_failure;

  void fail(unsigned seed, const std::string& what) {
    ++failures;
    if (first_failure.empty())
      first_failure = "seed " + std::to_string(seed) + ": " + what;
  }
};

// Printing a generated model and parsing the text back must reproduce the
// model up to ids and display names.
inline PropertyOutcome prop_bnf_roundtrip(unsigned seed0, int n,
                                          GenLimits limits = {}) {
  namespace model = collabc::model;
  PropertyOutcome out;
  for (int i = 0; i < n; ++i) {
    unsigned seed = seed0 + static_cast<unsigned>(i);
    model::CollaborationModel m = ModelGen(seed, limits)();
    ++out.cases;
    if (!model::validate_model(m).empty()) {
      out.fail(seed, "generated model fails validation");
      continue;
    }
    try {
      std::string text = model::print_bnf(m);
      model::CollaborationModel back = model::parse_bnf_text(text);
      if (!model::structurally_equal(m, back))
        out.fail(seed, "reparse is not structurally equal");
      else if (model::print_bnf(back) != text)
        out.fail(seed, "second print differs");
    } catch (const collabc::CompileError& e) {
      out.fail(seed, std::string("reparse error: ") + e.what());
    }
  }
  return out;
}

// Translating a generated model, printing the processes and parsing the text
// back must reproduce the specification and its printed form.
inline PropertyOutcome prop_csp_roundtrip(unsigned seed0, int n,
                                          GenLimits limits = {}) {
  namespace csp = collabc::csp;
  PropertyOutcome out;
  for (int i = 0; i < n; ++i) {
    unsigned seed = seed0 + static_cast<unsigned>(i);
    ++out.cases;
    try {
      csp::CspSpec spec = collabc::translate::translate(ModelGen(seed, limits)());
      std::string printed = csp::print_csp(spec);
      csp::CspSpec back = csp::parse_csp(printed);
      if (!csp::equal(spec, back))
        out.fail(seed, "reparsed specification differs");
      else if (csp::print_csp(back) != printed)
        out.fail(seed, "second print differs");
    } catch (const collabc::CompileError& e) {
      out.fail(seed, std::string("translate/parse error: ") + e.what());
    }
  }
  return out;
}

namespace detail {

inline collabc::contract::ContractModel contract_for(
    const collabc::csp::CspSpec& spec) {
  collabc::csp::SyntaxTree tree = collabc::csp::syntax_tree(spec);
  collabc::relations::RelationSet rel =
      collabc::relations::extract_relations(tree);
  collabc::relations::ReducedRelationSet red =
      collabc::relations::reduce(rel, tree);
  return collabc::contract::build_contract_model(red, tree);
}

}  // namespace detail

// Random request walks: a rejected request must leave the contract state and
// the pending counters exactly as they were.
inline PropertyOutcome prop_rejections_side_effect_free(unsigned seed0, int n) {
  namespace contract = collabc::contract;
  PropertyOutcome out;
  for (int i = 0; i < n; ++i) {
    unsigned seed = seed0 + static_cast<unsigned>(i);
    ++out.cases;
    try {
      collabc::csp::CspSpec spec =
          collabc::translate::translate(ModelGen(seed, kSmallLimits)());
      contract::ContractModel model = detail::contract_for(spec);
      if (model.atomics.empty()) continue;
      std::vector<contract::AtomState> states(model.atomics.size(),
                                              contract::AtomState::Disabled);
      std::vector<int> pending(model.counters.size(), 0);
      for (const auto& [participant, atoms] : model.initials)
        for (int a : atoms)
          states[static_cast<std::size_t>(a)] = contract::AtomState::Waiting;
      std::mt19937 walk(seed ^ 0x9e3779b9u);
      for (int step = 0; step < 30; ++step) {
        int target = std::uniform_int_distribution<int>(
            0, static_cast<int>(model.atomics.size()) - 1)(walk);
        std::vector<contract::AtomState> states_before = states;
        std::vector<int> pending_before = pending;
        contract::RequestResult res =
            contract::handle_request(model, states, pending, target);
        if (!res.accepted &&
            (states != states_before || pending != pending_before ||
             !res.changes.empty() || !res.forwarded.empty())) {
          out.fail(seed, "rejected request mutated state at " +
                             model.atomics[static_cast<std::size_t>(target)].id);
          break;
        }
      }
    } catch (const collabc::CompileError& e) {
      out.fail(seed, std::string("setup error: ") + e.what());
    }
  }
  return out;
}

// Random request walks: pending message counters must never drop below zero,
// accepted or not.
inline PropertyOutcome prop_counters_never_negative(unsigned seed0, int n) {
  namespace contract = collabc::contract;
  PropertyOutcome out;
  for (int i = 0; i < n; ++i) {
    unsigned seed = seed0 + static_cast<unsigned>(i);
    ++out.cases;
    try {
      collabc::csp::CspSpec spec =
          collabc::translate::translate(ModelGen(seed, kSmallLimits)());
      contract::ContractModel model = detail::contract_for(spec);
      if (model.atomics.empty()) continue;
      for (bool two_call : {false, true}) {
        contract::ContractModel variant = model;
        variant.two_call = two_call;
        contract::TwinSimulator sim(variant);
        std::mt19937 walk(seed ^ 0x7f4a7c15u);
        for (int step = 0; step < 40; ++step) {
          int target = std::uniform_int_distribution<int>(
              0, static_cast<int>(variant.atomics.size()) - 1)(walk);
          sim.request(variant.atomics[static_cast<std::size_t>(target)].id);
          for (int p : sim.pending()) {
            if (p < 0) {
              out.fail(seed, "negative pending counter");
              break;
            }
          }
        }
      }
    } catch (const collabc::CompileError& e) {
      out.fail(seed, std::string("setup error: ") + e.what());
    }
  }
  return out;
}

// Soundness verdicts must not depend on the order pools and message flows
// are listed in, which shifts the whole exploration enumeration order.
inline PropertyOutcome prop_verdicts_order_invariant(unsigned seed0, int n) {
  namespace verify = collabc::verify;
  PropertyOutcome out;
  for (int i = 0; i < n; ++i) {
    unsigned seed = seed0 + static_cast<unsigned>(i);
    ++out.cases;
    try {
      collabc::model::CollaborationModel m = ModelGen(seed, kSmallLimits)();
      collabc::model::CollaborationModel shuffled = m;
      std::mt19937 mix(seed ^ 0x2545f491u);
      std::shuffle(shuffled.pools.begin(), shuffled.pools.end(), mix);
      std::shuffle(shuffled.message_flows.begin(), shuffled.message_flows.end(),
                   mix);

      auto a = verify::check_soundness(collabc::translate::translate(m));
      auto b = verify::check_soundness(collabc::translate::translate(shuffled));
      std::map<std::string, int> va, vb;
      bool truncated = false;
      for (const auto& v : a) {
        va[v.property] = v.result;
        truncated |= v.truncated;
      }
      for (const auto& v : b) {
        vb[v.property] = v.result;
        truncated |= v.truncated;
      }
      if (truncated) continue;  // bounded runs may legitimately disagree
      if (va != vb) out.fail(seed, "verdicts changed under reordering");
    } catch (const collabc::CompileError& e) {
      out.fail(seed, std::string("setup error: ") + e.what());
    }
  }
  return out;
}

}  // namespace testsupport
