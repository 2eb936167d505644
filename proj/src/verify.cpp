#include "collabc/verify.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <unordered_map>

#include "collabc/error.hpp"

namespace collabc::verify {

using csp::ProcessRef;
using csp::ProcKind;

namespace {

constexpr int kMaxCallDepth = 64;

// Canonical continuation form: completed Skips are folded away so that
// structurally identical states share one textual key.
ProcessRef norm(const ProcessRef& p) {
  switch (p->kind) {
    case ProcKind::Seq: {
      ProcessRef l = norm(p->children[0]);
      if (l->kind == ProcKind::Skip) return norm(p->children[1]);
      return l == p->children[0] ? p : csp::p_seq(l, p->children[1]);
    }
    case ProcKind::Par: {
      std::vector<ProcessRef> branches;
      branches.reserve(p->children.size());
      bool changed = false;
      bool all_skip = true;
      for (const auto& b : p->children) {
        ProcessRef nb = norm(b);
        changed |= nb != b;
        all_skip &= nb->kind == ProcKind::Skip;
        branches.push_back(std::move(nb));
      }
      if (all_skip) return csp::p_skip();
      return changed ? csp::p_par(std::move(branches)) : p;
    }
    case ProcKind::ExtChoice:
    case ProcKind::EventChoice: {
      bool all_skip = true;
      for (const auto& b : p->children) all_skip &= b->kind == ProcKind::Skip;
      return all_skip ? csp::p_skip() : p;
    }
    default:
      return p;
  }
}

// First non-framing action along the execution spine. Framing events are
// unit chains (`event -> Skip` sequenced), so the scan must fall through a
// silent left operand into the right one. A `[*]` branch whose first real
// action is a receive is only offered while that receive could fire.
const csp::Process* first_action(const csp::Process* p) {
  switch (p->kind) {
    case ProcKind::Skip: return nullptr;
    case ProcKind::Event: return first_action(p->children[0].get());
    case ProcKind::Seq: {
      if (const csp::Process* l = first_action(p->children[0].get())) return l;
      return first_action(p->children[1].get());
    }
    default: return p;
  }
}

struct Action {
  Transition::Kind kind = Transition::Internal;
  std::string label;
  int channel = -1;
  std::string message;
  ProcessRef next;
};

class Engine {
 public:
  Engine(const csp::CspSpec& spec, const Bounds& bounds)
      : spec_(spec), bounds_(bounds) {
    graph_.participants = spec.participants();
    for (const auto& decl : spec.channels) {
      chan_index_[decl.name] = static_cast<int>(graph_.channels.size());
      graph_.channels.push_back(decl.name);
      auto cap = static_cast<std::size_t>(decl.capacity < 0 ? 0 : decl.capacity);
      capacities_.push_back(cap);
      limits_.push_back(std::min(cap, bounds.max_queue_depth));
    }
  }

  StateGraph run() {
    GlobalState init;
    for (const auto& name : graph_.participants) {
      const csp::ProcessDef* def = spec_.find(name);
      if (!def) throw CompileError("no process definition for " + name);
      init.procs.push_back(norm(def->body));
    }
    init.queues.resize(graph_.channels.size());
    add_state(std::move(init), 0, -1);

    std::deque<int> frontier{0};
    bool capped = false;
    while (!frontier.empty() && !capped) {
      int s = frontier.front();
      frontier.pop_front();
      GlobalState cur = graph_.states[s];  // copy: states vector may grow
      for (std::size_t i = 0; i < cur.procs.size() && !capped; ++i) {
        std::vector<Action> acts;
        actions(cur.procs[i], cur.queues, acts, 0);
        std::stable_sort(acts.begin(), acts.end(),
                         [](const Action& a, const Action& b) {
                           return a.label < b.label;
                         });
        for (const Action& a : acts) {
          GlobalState succ = cur;
          succ.procs[i] = norm(a.next);
          if (a.kind == Transition::Send)
            succ.queues[a.channel].push_back(a.message);
          else if (a.kind == Transition::Receive)
            succ.queues[a.channel].erase(succ.queues[a.channel].begin());
          std::string k = key(succ);
          auto it = seen_.find(k);
          int to;
          if (it != seen_.end()) {
            to = it->second;
          } else if (graph_.states.size() >= bounds_.max_states) {
            graph_.truncated = true;
            graph_.truncation_reason = "state bound reached (" +
                                       std::to_string(bounds_.max_states) + ")";
            graph_.expanded[s] = false;
            capped = true;
            break;
          } else {
            to = add_state(std::move(succ), graph_.depth[s] + 1,
                           static_cast<int>(graph_.transitions.size()));
            seen_.emplace(std::move(k), to);
            frontier.push_back(to);
          }
          graph_.out[s].push_back(static_cast<int>(graph_.transitions.size()));
          graph_.transitions.push_back(
              {static_cast<int>(s), to, graph_.participants[i], a.label, a.kind});
        }
      }
    }
    if (bound_hit_ && !graph_.truncated) {
      graph_.truncated = true;
      graph_.truncation_reason =
          "queue depth bound below declared channel capacity";
    }
    return std::move(graph_);
  }

 private:
  int add_state(GlobalState&& st, std::size_t depth, int pred) {
    int id = static_cast<int>(graph_.states.size());
    if (id == 0) seen_.emplace(key(st), 0);
    graph_.states.push_back(std::move(st));
    graph_.out.emplace_back();
    graph_.pred.push_back(pred);
    graph_.depth.push_back(depth);
    graph_.expanded.push_back(true);
    return id;
  }

  std::string key(const GlobalState& st) const {
    std::string k;
    for (const auto& p : st.procs) {
      k += csp::print_process(p);
      k += '\x1f';
    }
    for (const auto& q : st.queues) {
      for (const auto& m : q) {
        k += m;
        k += ',';
      }
      k += '\x1f';
    }
    return k;
  }

  int channel_of(const std::string& name) const {
    auto it = chan_index_.find(name);
    if (it == chan_index_.end())
      throw CompileError("channel " + name + " is not declared");
    return it->second;
  }

  void actions(const ProcessRef& p,
               const std::vector<std::vector<std::string>>& queues,
               std::vector<Action>& out, int call_depth) {
    switch (p->kind) {
      case ProcKind::Skip:
        break;
      case ProcKind::Event:
        out.push_back({Transition::Internal, p->name, -1, "", p->children[0]});
        break;
      case ProcKind::Send: {
        int ch = channel_of(p->name);
        if (queues[ch].size() < limits_[ch]) {
          out.push_back({Transition::Send, p->name + "!" + p->message, ch,
                         p->message, p->children[0]});
        } else if (queues[ch].size() < capacities_[ch]) {
          bound_hit_ = true;  // blocked by the exploration bound, not the model
        }
        break;
      }
      case ProcKind::Recv: {
        int ch = channel_of(p->name);
        if (!queues[ch].empty() && queues[ch].front() == p->message)
          out.push_back({Transition::Receive, p->name + "?" + p->message, ch,
                         p->message, p->children[0]});
        break;
      }
      case ProcKind::Seq: {
        std::vector<Action> sub;
        actions(p->children[0], queues, sub, call_depth);
        for (Action& a : sub) {
          a.next = csp::p_seq(a.next, p->children[1]);
          out.push_back(std::move(a));
        }
        break;
      }
      case ProcKind::Par: {
        for (std::size_t j = 0; j < p->children.size(); ++j) {
          std::vector<Action> sub;
          actions(p->children[j], queues, sub, call_depth);
          for (Action& a : sub) {
            std::vector<ProcessRef> branches = p->children;
            branches[j] = a.next;
            a.next = csp::p_par(std::move(branches));
            out.push_back(std::move(a));
          }
        }
        break;
      }
      case ProcKind::ExtChoice: {
        for (const auto& b : p->children) actions(b, queues, out, call_depth);
        break;
      }
      case ProcKind::EventChoice: {
        for (const auto& b : p->children) {
          const csp::Process* a = first_action(b.get());
          if (a && a->kind == ProcKind::Recv) {
            int ch = channel_of(a->name);
            if (queues[ch].empty() || queues[ch].front() != a->message)
              continue;  // branch not offered until its message is available
          }
          actions(b, queues, out, call_depth);
        }
        break;
      }
      case ProcKind::Call: {
        if (call_depth >= kMaxCallDepth)
          throw CompileError("recursion in " + p->name +
                             " is not guarded by any action");
        const csp::ProcessDef* def = spec_.find(p->name);
        if (!def) throw CompileError("call to undefined process " + p->name);
        actions(def->body, queues, out, call_depth + 1);
        break;
      }
    }
  }

  const csp::CspSpec& spec_;
  Bounds bounds_;
  StateGraph graph_;
  std::map<std::string, int> chan_index_;
  std::vector<std::size_t> capacities_;
  std::vector<std::size_t> limits_;
  std::unordered_map<std::string, int> seen_;
  bool bound_hit_ = false;
};

std::string list_queues(const StateGraph& g, int state) {
  std::string detail;
  for (std::size_t c = 0; c < g.channels.size(); ++c) {
    const auto& q = g.states[state].queues[c];
    if (q.empty()) continue;
    if (!detail.empty()) detail += "; ";
    detail += g.channels[c] + ":";
    for (const auto& m : q) detail += " " + m;
  }
  return detail;
}

}  // namespace

bool StateGraph::is_terminal(int state) const {
  for (const auto& p : states[state].procs)
    if (p->kind != ProcKind::Skip) return false;
  return true;
}

std::vector<Transition> StateGraph::trace_to(int state) const {
  std::vector<Transition> trace;
  for (int s = state; pred[s] >= 0; s = transitions[pred[s]].from)
    trace.push_back(transitions[pred[s]]);
  std::reverse(trace.begin(), trace.end());
  return trace;
}

StateGraph explore(const csp::CspSpec& spec, const Bounds& bounds) {
  return Engine(spec, bounds).run();
}

std::vector<Verdict> check_soundness(const csp::CspSpec& spec,
                                     const Bounds& bounds) {
  StateGraph g = explore(spec, bounds);
  std::size_t max_depth = 0;
  for (std::size_t d : g.depth) max_depth = std::max(max_depth, d);

  auto base = [&](const std::string& property) {
    Verdict v;
    v.property = property;
    v.states_explored = g.states.size();
    v.max_depth = max_depth;
    v.truncated = g.truncated;
    return v;
  };
  auto inconclusive = [&](Verdict& v) {
    v.result = Verdict::Inconclusive;
    v.detail = "exploration truncated: " + g.truncation_reason;
  };
  std::vector<Verdict> verdicts;

  // Deadlock-freedom: a fully expanded state without successors must be the
  // terminal configuration where every participant has finished.
  {
    Verdict v = base("deadlock-freedom");
    int bad = -1;
    for (std::size_t s = 0; s < g.states.size() && bad < 0; ++s)
      if (g.expanded[s] && g.out[s].empty() && !g.is_terminal(static_cast<int>(s)))
        bad = static_cast<int>(s);
    if (bad >= 0) {
      v.result = Verdict::Fail;
      v.counterexample = g.trace_to(bad);
      std::string stuck;
      for (std::size_t i = 0; i < g.participants.size(); ++i) {
        if (g.states[bad].procs[i]->kind == ProcKind::Skip) continue;
        if (!stuck.empty()) stuck += "; ";
        stuck += g.participants[i] + " at " +
                 csp::print_process(g.states[bad].procs[i]);
      }
      v.detail = "deadlock after " + std::to_string(v.counterexample.size()) +
                 " steps: " + stuck;
    } else if (g.truncated) {
      inconclusive(v);
    } else {
      v.detail = "no reachable deadlock";
    }
    verdicts.push_back(std::move(v));
  }

  // Terminability: from every reachable state some terminal state stays
  // reachable (the collaboration can always still finish).
  {
    Verdict v = base("terminability");
    if (g.truncated) {
      inconclusive(v);
    } else {
      std::vector<std::vector<int>> in(g.states.size());
      for (std::size_t t = 0; t < g.transitions.size(); ++t)
        in[g.transitions[t].to].push_back(g.transitions[t].from);
      std::vector<bool> can_finish(g.states.size(), false);
      std::deque<int> queue;
      for (std::size_t s = 0; s < g.states.size(); ++s)
        if (g.is_terminal(static_cast<int>(s))) {
          can_finish[s] = true;
          queue.push_back(static_cast<int>(s));
        }
      while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        for (int p : in[s])
          if (!can_finish[p]) {
            can_finish[p] = true;
            queue.push_back(p);
          }
      }
      int bad = -1;
      for (std::size_t s = 0; s < g.states.size() && bad < 0; ++s)
        if (!can_finish[s]) bad = static_cast<int>(s);
      if (bad >= 0) {
        v.result = Verdict::Fail;
        v.counterexample = g.trace_to(bad);
        v.detail = v.counterexample.empty()
                       ? "no terminating run exists"
                       : "no terminating run after " +
                             std::to_string(v.counterexample.size()) + " steps";
      } else {
        v.detail = "a terminating run is reachable from every state";
      }
    }
    verdicts.push_back(std::move(v));
  }

  // Task-reachability: every task action named by the model shows up on some
  // explored transition.
  {
    Verdict v = base("task-reachability");
    csp::SyntaxTree tree = csp::syntax_tree(spec);
    std::set<std::pair<std::string, std::string>> covered;
    for (const auto& t : g.transitions) covered.insert({t.participant, t.label});
    std::vector<std::string> missing;
    std::size_t targets = 0;
    for (int leaf : tree.leaves) {
      const csp::TreeNode& node = tree.nodes[leaf];
      if (node.atom_kind == csp::AtomKind::Silent) continue;
      ++targets;
      if (!covered.count({node.participant, node.core_label}))
        missing.push_back(tree.qualified(leaf) + " (" + node.core_label + ")");
    }
    if (missing.empty()) {
      v.detail = "all " + std::to_string(targets) + " task actions reachable";
    } else if (g.truncated) {
      inconclusive(v);
    } else {
      v.result = Verdict::Fail;
      std::string list;
      for (const auto& m : missing) {
        if (!list.empty()) list += ", ";
        list += m;
      }
      v.detail = "unreachable: " + list;
    }
    verdicts.push_back(std::move(v));
  }

  // Message-drainage: when every participant has finished, no message may be
  // left undelivered in any channel.
  {
    Verdict v = base("message-drainage");
    int bad = -1;
    for (std::size_t s = 0; s < g.states.size() && bad < 0; ++s) {
      if (!g.is_terminal(static_cast<int>(s))) continue;
      for (const auto& q : g.states[s].queues)
        if (!q.empty()) {
          bad = static_cast<int>(s);
          break;
        }
    }
    if (bad >= 0) {
      v.result = Verdict::Fail;
      v.counterexample = g.trace_to(bad);
      v.detail = "undelivered at termination: " + list_queues(g, bad);
    } else if (g.truncated) {
      inconclusive(v);
    } else {
      v.detail = "all channels empty at every terminal state";
    }
    verdicts.push_back(std::move(v));
  }

  return verdicts;
}

Verdict check_reachability(const csp::CspSpec& spec, const std::string& label,
                           const Bounds& bounds) {
  StateGraph g = explore(spec, bounds);
  Verdict v;
  v.property = "reachability of " + label;
  v.states_explored = g.states.size();
  for (std::size_t d : g.depth) v.max_depth = std::max(v.max_depth, d);
  v.truncated = g.truncated;
  for (const auto& t : g.transitions) {
    if (t.label != label) continue;
    v.result = Verdict::Pass;
    v.counterexample = g.trace_to(t.from);
    v.counterexample.push_back(t);
    v.detail = "witness of " + std::to_string(v.counterexample.size()) + " steps";
    return v;
  }
  if (g.truncated) {
    v.result = Verdict::Inconclusive;
    v.detail = "exploration truncated: " + g.truncation_reason;
  } else {
    v.result = Verdict::Fail;
    v.detail = "no reachable transition labelled " + label;
  }
  return v;
}

std::string format_trace(const std::vector<Transition>& trace) {
  std::string out;
  for (const auto& t : trace) {
    out += t.participant;
    out += '\t';
    out += t.label;
    out += '\n';
  }
  return out;
}

bool projectable_label(const std::string& label) {
  if (label.find('!') != std::string::npos) return true;
  if (label.find('?') != std::string::npos) return true;
  return label.rfind("work_", 0) == 0;
}

std::set<std::vector<std::string>> projected_traces(const StateGraph& graph,
                                                    std::size_t max_traces,
                                                    bool& exact) {
  exact = true;
  std::set<std::vector<std::string>> out;
  if (graph.states.empty()) return out;
  out.emplace();  // the empty trace; every prefix-closed set contains it

  // Prefixes are interned in a trie so already-seen (state, prefix) pairs can
  // be skipped. Distinct interleavings of the silent framing events collapse
  // onto the same pair, which keeps the walk proportional to the number of
  // distinct traces rather than the number of paths.
  std::vector<std::vector<std::string>> prefixes{{}};
  std::map<std::pair<int, std::string>, int> trie;  // (prefix, label) -> prefix
  std::set<std::pair<int, int>> visited;            // (state, prefix)
  std::set<std::pair<int, int>> on_path;

  std::function<void(int, int)> walk = [&](int s, int pre) {
    on_path.insert({s, pre});
    for (int t : graph.out[s]) {
      const Transition& tr = graph.transitions[t];
      int next_pre = pre;
      if (projectable_label(tr.label)) {
        auto probe = trie.find({pre, tr.label});
        if (probe != trie.end()) {
          next_pre = probe->second;
        } else {
          if (out.size() >= max_traces) {
            exact = false;  // budget spent; the result is a strict subset
            break;
          }
          next_pre = static_cast<int>(prefixes.size());
          std::vector<std::string> ext = prefixes[pre];
          ext.push_back(tr.label);
          out.insert(ext);
          prefixes.push_back(std::move(ext));
          trie.emplace(std::pair{pre, tr.label}, next_pre);
        }
      }
      if (on_path.count({tr.to, next_pre})) {
        exact = false;  // a silent cycle yields no new finite information
        continue;
      }
      if (visited.insert({tr.to, next_pre}).second) walk(tr.to, next_pre);
      if (!exact) break;
    }
    on_path.erase({s, pre});
  };
  visited.insert({graph.initial, 0});
  walk(graph.initial, 0);
  return out;
}

}  // namespace collabc::verify
