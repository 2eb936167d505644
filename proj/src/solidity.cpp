#include <algorithm>
#include <cctype>

#include "collabc/contract.hpp"

namespace collabc::contract {

namespace {

std::string sanitize(const std::string& raw) {
  std::string out;
  for (char c : raw)
    out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])))
    out = "_" + out;
  return out;
}

// Index constants carry an ATOM_ prefix so they can never collide with the
// request function named after the same atomic.
std::string constant_of(const std::string& id) {
  std::string out = sanitize(id);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return "ATOM_" + out;
}

std::string counter_of(const std::pair<std::string, std::string>& cm) {
  return "pending_" + sanitize(cm.first) + "_" + sanitize(cm.second);
}

}  // namespace

std::string emit_solidity(const ContractModel& model) {
  std::string s;
  auto line = [&](int indent, const std::string& text) {
    s.append(static_cast<std::size_t>(indent) * 4, ' ');
    s += text;
    s += '\n';
  };
  const std::string contract_name = sanitize(model.name);

  line(0, "// SPDX-License-Identifier: MIT");
  line(0, "// Machine-generated collaboration state machine; do not edit.");
  line(0, "pragma solidity ^0.8.0;");
  line(0, "");
  line(0, "contract " + contract_name + " {");
  line(1, "enum AtomState { Disabled, Waiting, Executing, Done }");
  line(0, "");

  for (std::size_t i = 0; i < model.atomics.size(); ++i)
    line(1, "uint8 public constant " + constant_of(model.atomics[i].id) +
                " = " + std::to_string(i) + ";");
  line(1, "AtomState[" + std::to_string(std::max<std::size_t>(model.atomics.size(), 1)) +
              "] public states;");
  line(0, "");

  for (const auto& p : model.participants)
    line(1, "address public immutable addr_" + sanitize(p) + ";");
  for (const auto& cm : model.counters)
    line(1, "uint32 public " + counter_of(cm) + ";");
  line(0, "");
  line(1, "event Transition(uint8 atom, AtomState from, AtomState to);");
  line(1, "event MessageForwarded(string channel, string message, string receiver);");
  line(0, "");

  // Constructor: bind one address per participant and enable the initial
  // atomics. Deployment is the first transaction of the collaboration.
  {
    std::string params;
    for (const auto& p : model.participants) {
      if (!params.empty()) params += ", ";
      params += "address " + sanitize(p) + "_";
    }
    line(1, "constructor(" + params + ") {");
    for (const auto& p : model.participants)
      line(2, "addr_" + sanitize(p) + " = " + sanitize(p) + "_;");
    for (const auto& [participant, atoms] : model.initials)
      for (int i : atoms) {
        const std::string c = constant_of(model.atomics[static_cast<std::size_t>(i)].id);
        line(2, "states[" + c + "] = AtomState.Waiting;");
        line(2, "emit Transition(" + c + ", AtomState.Disabled, AtomState.Waiting);");
      }
    line(1, "}");
    line(0, "");
  }

  auto state_of = [&](int idx) {
    return "states[" + constant_of(model.atomics[static_cast<std::size_t>(idx)].id) + "]";
  };
  auto move_to = [&](int indent, int idx, const std::string& from,
                     const std::string& to) {
    const std::string c = constant_of(model.atomics[static_cast<std::size_t>(idx)].id);
    line(indent, "emit Transition(" + c + ", " + from + ", AtomState." + to + ");");
    line(indent, "states[" + c + "] = AtomState." + to + ";");
  };

  auto emit_disable_rivals = [&](int indent, const Atomic& a) {
    for (int t : a.inactivate) {
      line(indent, "if (" + state_of(t) + " != AtomState.Disabled) {");
      move_to(indent + 1, t, state_of(t), "Disabled");
      line(indent, "}");
    }
  };
  auto emit_activate = [&](int indent, const Atomic& a) {
    if (a.activate.empty()) return;
    int body = indent;
    if (!a.group.empty()) {
      std::string cond;
      for (int g : a.group) {
        if (!cond.empty()) cond += " && ";
        cond += state_of(g) + " == AtomState.Done";
      }
      line(indent, "if (" + cond + ") {");
      body = indent + 1;
    }
    for (int t : a.activate) {
      line(body, "if (" + state_of(t) + " == AtomState.Disabled || " + state_of(t) +
                     " == AtomState.Done) {");
      move_to(body + 1, t, state_of(t), "Waiting");
      line(body, "}");
    }
    if (!a.group.empty()) line(indent, "}");
  };
  auto emit_send = [&](int indent, const Atomic& a) {
    if (a.kind != Atomic::Send) return;
    line(indent, counter_of({a.channel, a.message}) + " += 1;");
    line(indent, "emit MessageForwarded(\"" + a.channel + "\", \"" + a.message +
                     "\", \"" + a.receiver + "\");");
  };

  for (std::size_t i = 0; i < model.atomics.size(); ++i) {
    const Atomic& a = model.atomics[i];
    const int idx = static_cast<int>(i);
    const std::string fname = sanitize(a.id);
    const std::string guard =
        "require(msg.sender == addr_" + sanitize(a.owner) + ", \"caller is not " +
        a.owner + "\");";
    const std::string msg_guard =
        "require(" + counter_of({a.channel, a.message}) + " > 0, \"missing message\");";

    if (!model.two_call) {
      line(1, "function " + fname + "() external {");
      line(2, guard);
      line(2, "require(" + state_of(idx) + " == AtomState.Waiting, \"not enabled\");");
      if (a.kind == Atomic::Receive) line(2, msg_guard);
      move_to(2, idx, "AtomState.Waiting", "Done");
      emit_send(2, a);
      if (a.kind == Atomic::Receive)
        line(2, counter_of({a.channel, a.message}) + " -= 1;");
      emit_disable_rivals(2, a);
      emit_activate(2, a);
      line(1, "}");
      line(0, "");
    } else {
      line(1, "function start_" + fname + "() external {");
      line(2, guard);
      line(2, "require(" + state_of(idx) + " == AtomState.Waiting, \"not enabled\");");
      if (a.kind == Atomic::Receive) line(2, msg_guard);
      move_to(2, idx, "AtomState.Waiting", "Executing");
      if (a.kind == Atomic::Receive)
        line(2, counter_of({a.channel, a.message}) + " -= 1;");
      emit_disable_rivals(2, a);
      line(1, "}");
      line(0, "");
      line(1, "function complete_" + fname + "() external {");
      line(2, guard);
      line(2, "require(" + state_of(idx) + " == AtomState.Executing, \"not started\");");
      move_to(2, idx, "AtomState.Executing", "Done");
      emit_send(2, a);
      emit_activate(2, a);
      line(1, "}");
      line(0, "");
    }
  }

  // True once every participant's closing atomics are settled: at least one
  // Done and none still pending.
  line(1, "function completed() external view returns (bool) {");
  std::string all;
  for (const auto& [participant, finals] : model.finals) {
    if (finals.empty()) continue;
    std::string any_done, settled;
    for (int f : finals) {
      if (!any_done.empty()) any_done += " || ";
      any_done += state_of(f) + " == AtomState.Done";
      if (!settled.empty()) settled += " && ";
      settled += "(" + state_of(f) + " == AtomState.Done || " + state_of(f) +
                 " == AtomState.Disabled)";
    }
    line(2, "bool done_" + sanitize(participant) + " = (" + any_done + ") && " +
                settled + ";");
    if (!all.empty()) all += " && ";
    all += "done_" + sanitize(participant);
  }
  line(2, "return " + (all.empty() ? std::string("true") : all) + ";");
  line(1, "}");
  line(0, "}");
  return s;
}

}  // namespace collabc::contract
