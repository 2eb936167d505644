#include "collabc/contract.hpp"

#include <algorithm>

#include "collabc/error.hpp"

namespace collabc::contract {

const char* state_name(AtomState s) {
  switch (s) {
    case AtomState::Disabled: return "Disabled";
    case AtomState::Waiting: return "Waiting";
    case AtomState::Executing: return "Executing";
    case AtomState::Done: return "Done";
  }
  return "?";
}

int ContractModel::find_atomic(const std::string& id) const {
  for (std::size_t i = 0; i < atomics.size(); ++i)
    if (atomics[i].id == id) return static_cast<int>(i);
  return -1;
}

int ContractModel::counter_index(const std::string& channel,
                                 const std::string& message) const {
  for (std::size_t i = 0; i < counters.size(); ++i)
    if (counters[i].first == channel && counters[i].second == message)
      return static_cast<int>(i);
  return -1;
}

ContractModel build_contract_model(const relations::ReducedRelationSet& red,
                                   const csp::SyntaxTree& tree,
                                   const std::string& name, bool two_call) {
  ContractModel model;
  model.name = name;
  model.two_call = two_call;

  std::map<std::string, int> leaf_of;  // qualified name -> tree node
  for (int leaf : tree.leaves) leaf_of[tree.qualified(leaf)] = leaf;

  // Stable public ordering: participant name first, then position in the
  // participant's process.
  std::vector<std::string> ordered = red.atoms;
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < red.atoms.size(); ++i) position[red.atoms[i]] = i;
  std::sort(ordered.begin(), ordered.end(),
            [&](const std::string& a, const std::string& b) {
              const auto& na = tree.nodes[leaf_of.at(a)];
              const auto& nb = tree.nodes[leaf_of.at(b)];
              if (na.participant != nb.participant)
                return na.participant < nb.participant;
              return position.at(a) < position.at(b);
            });

  std::map<std::string, int> index_of;
  for (const std::string& id : ordered) {
    auto it = leaf_of.find(id);
    if (it == leaf_of.end())
      throw CompileError("inconsistent reduced set: unknown atomic " + id);
    const csp::TreeNode& n = tree.nodes[it->second];
    Atomic a;
    a.id = id;
    a.owner = n.participant;
    a.channel = n.channel;
    a.message = n.message;
    a.label = n.core_label;
    switch (n.atom_kind) {
      case csp::AtomKind::Send:
        a.kind = Atomic::Send;
        for (int r : tree.leaves)
          if (tree.nodes[r].atom_kind == csp::AtomKind::Recv &&
              tree.nodes[r].channel == n.channel &&
              tree.nodes[r].message == n.message && a.receiver.empty())
            a.receiver = tree.nodes[r].participant;
        break;
      case csp::AtomKind::Recv: a.kind = Atomic::Receive; break;
      default: a.kind = Atomic::Internal; break;
    }
    index_of[id] = static_cast<int>(model.atomics.size());
    model.atomics.push_back(std::move(a));
  }

  auto resolve = [&](const std::vector<std::string>& ids) {
    std::vector<int> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
      auto it = index_of.find(id);
      if (it == index_of.end())
        throw CompileError("inconsistent reduced set: unknown atomic " + id);
      out.push_back(it->second);
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  for (auto& a : model.atomics) {
    if (auto it = red.activate.find(a.id); it != red.activate.end())
      a.activate = resolve(it->second);
    if (auto it = red.inactivate.find(a.id); it != red.inactivate.end())
      a.inactivate = resolve(it->second);
    if (auto it = red.parallel.find(a.id); it != red.parallel.end())
      a.group = resolve(it->second);
    if (a.kind != Atomic::Internal) {
      if (model.counter_index(a.channel, a.message) < 0)
        model.counters.emplace_back(a.channel, a.message);
    }
  }
  std::sort(model.counters.begin(), model.counters.end());

  for (const auto& [participant, atoms] : red.initials) {
    model.participants.push_back(participant);
    model.initials[participant] = resolve(atoms);
  }
  for (const auto& [participant, atoms] : red.finals)
    model.finals[participant] = resolve(atoms);
  return model;
}

namespace {

struct Effects {
  RequestResult* res;
  std::vector<AtomState>* states;

  void move(int atom, AtomState to) {
    AtomState old = (*states)[atom];
    if (old == to) return;
    (*states)[atom] = to;
    res->changes.emplace_back(atom, old, to);
  }
};

}  // namespace

RequestResult handle_request(const ContractModel& model,
                             std::vector<AtomState>& states,
                             std::vector<int>& pending, int atomic_index) {
  RequestResult res;
  const Atomic& a = model.atomics[static_cast<std::size_t>(atomic_index)];
  AtomState st = states[static_cast<std::size_t>(atomic_index)];
  Effects fx{&res, &states};

  auto counter = [&]() { return model.counter_index(a.channel, a.message); };
  auto disable_rivals = [&]() {
    for (int t : a.inactivate) fx.move(t, AtomState::Disabled);
  };
  auto activate_successors = [&]() {
    for (int g : a.group)
      if (states[static_cast<std::size_t>(g)] != AtomState::Done)
        return;  // parallel join not complete yet
    for (int t : a.activate) {
      AtomState ts = states[static_cast<std::size_t>(t)];
      if (ts == AtomState::Disabled || ts == AtomState::Done)
        fx.move(t, AtomState::Waiting);
    }
  };
  auto send_effect = [&]() {
    if (a.kind != Atomic::Send) return;
    ++pending[static_cast<std::size_t>(counter())];
    res.forwarded.emplace_back(a.channel, a.message, a.receiver);
  };

  if (model.two_call) {
    if (st == AtomState::Waiting) {
      if (a.kind == Atomic::Receive && pending[static_cast<std::size_t>(counter())] == 0) {
        res.reason = "missing message " + a.channel + "." + a.message;
        return res;
      }
      fx.move(atomic_index, AtomState::Executing);
      if (a.kind == Atomic::Receive) --pending[static_cast<std::size_t>(counter())];
      disable_rivals();
      res.accepted = true;
      return res;
    }
    if (st == AtomState::Executing) {
      fx.move(atomic_index, AtomState::Done);
      send_effect();
      activate_successors();
      res.accepted = true;
      return res;
    }
    res.reason = std::string("not enabled (") + state_name(st) + ")";
    return res;
  }

  if (st != AtomState::Waiting) {
    res.reason = std::string("not enabled (") + state_name(st) + ")";
    return res;
  }
  if (a.kind == Atomic::Receive && pending[static_cast<std::size_t>(counter())] == 0) {
    res.reason = "missing message " + a.channel + "." + a.message;
    return res;
  }
  fx.move(atomic_index, AtomState::Done);
  send_effect();
  if (a.kind == Atomic::Receive) --pending[static_cast<std::size_t>(counter())];
  disable_rivals();
  activate_successors();
  res.accepted = true;
  return res;
}

TwinSimulator::TwinSimulator(const ContractModel& model)
    : model_(model),
      states_(model.atomics.size(), AtomState::Disabled),
      pending_(model.counters.size(), 0) {
  for (const auto& [participant, atoms] : model.initials)
    for (int i : atoms) states_[static_cast<std::size_t>(i)] = AtomState::Waiting;
}

RequestResult TwinSimulator::request(const std::string& atomic_id) {
  int idx = model_.find_atomic(atomic_id);
  if (idx < 0) throw CompileError("unknown atomic " + atomic_id);
  RequestResult res = handle_request(model_, states_, pending_, idx);
  log_.push_back({static_cast<int>(log_.size()) + 1, atomic_id, res.accepted,
                  res.reason});
  return res;
}

AtomState TwinSimulator::state(const std::string& atomic_id) const {
  int idx = model_.find_atomic(atomic_id);
  if (idx < 0) throw CompileError("unknown atomic " + atomic_id);
  return states_[static_cast<std::size_t>(idx)];
}

bool TwinSimulator::is_final() const {
  for (const auto& [participant, finals] : model_.finals) {
    if (finals.empty()) continue;
    bool any_done = false;
    bool all_settled = true;
    for (int f : finals) {
      AtomState s = states_[static_cast<std::size_t>(f)];
      any_done |= s == AtomState::Done;
      all_settled &= s == AtomState::Done || s == AtomState::Disabled;
    }
    if (!any_done || !all_settled) return false;
  }
  return true;
}

std::string TwinSimulator::render_log() const {
  std::string out;
  for (const auto& e : log_) {
    out += std::to_string(e.seq);
    out += '\t';
    out += e.atomic;
    out += '\t';
    out += e.accepted ? "accepted" : "rejected";
    out += '\t';
    out += e.reason.empty() ? "-" : e.reason;
    out += '\n';
  }
  return out;
}

}  // namespace collabc::contract
