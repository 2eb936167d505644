#include "collabc/translate.hpp"

#include "collabc/error.hpp"

namespace collabc::translate {

using csp::ProcessRef;
using model::Element;
using model::ElementKind;

namespace {

ProcessRef frame_event(const std::string& flow) {
  return csp::p_event("event_" + flow, csp::p_skip());
}

ProcessRef translate_element(const Element& e);

ProcessRef translate_chain(const std::vector<Element>& elements) {
  ProcessRef term;
  for (std::size_t i = elements.size(); i-- > 0;) {
    ProcessRef t = translate_element(elements[i]);
    if (!t) continue;
    term = term ? csp::p_seq(t, term) : t;
  }
  return term ? term : csp::p_skip();
}

// A gateway's branches inherit the gateway's entry and exit flows: the first
// element of each branch starts on the gateway's incoming flow and the last
// ends on its outgoing flow, so every branch synchronises on the same framing
// events.
ProcessRef translate_gateway(const Element& e) {
  std::vector<ProcessRef> branches;
  branches.reserve(e.branches.size());
  for (const auto& branch : e.branches) {
    std::vector<Element> copy = branch;
    copy.front().flow_in = e.flow_in;
    copy.back().flow_out = e.flow_out;
    branches.push_back(translate_chain(copy));
  }
  switch (e.kind) {
    case ElementKind::AndGate: return csp::p_par(std::move(branches));
    case ElementKind::XorGate: return csp::p_ext_choice(std::move(branches));
    default: return csp::p_event_choice(std::move(branches));
  }
}

ProcessRef translate_element(const Element& e) {
  switch (e.kind) {
    case ElementKind::Task:
      return csp::p_seq(
          frame_event(e.flow_in),
          csp::p_seq(csp::p_event("work_" + e.id, csp::p_skip()),
                     frame_event(e.flow_out)));
    case ElementKind::SndTask:
      return csp::p_seq(
          frame_event(e.flow_in),
          csp::p_seq(csp::p_send(e.channel, e.message, csp::p_skip()),
                     frame_event(e.flow_out)));
    case ElementKind::RcvTask:
      return csp::p_seq(
          frame_event(e.flow_in),
          csp::p_seq(csp::p_recv(e.channel, e.message, csp::p_skip()),
                     frame_event(e.flow_out)));
    case ElementKind::AndGate:
    case ElementKind::XorGate:
    case ElementKind::EventGate:
      return translate_gateway(e);
    case ElementKind::StartEvent:
    case ElementKind::EndEvent:
      return nullptr;  // represented by the flows around them
  }
  return nullptr;
}

}  // namespace

csp::CspSpec translate(const model::CollaborationModel& m, Options opts) {
  auto issues = model::validate_model(m);
  if (!issues.empty())
    throw CompileError(issues.front().subject + ": " + issues.front().detail);

  csp::CspSpec spec;
  for (const auto& flow : m.message_flows) {
    bool seen = false;
    for (const auto& ch : spec.channels) seen |= ch.name == flow.channel;
    if (!seen) spec.channels.push_back({flow.channel, opts.channel_capacity});
  }
  for (const auto& pool : m.pools) {
    spec.defs.push_back({pool.name, translate_chain(pool.elements)});
    spec.system.push_back(pool.name);
  }
  spec.explicit_system = true;
  return spec;
}

}  // namespace collabc::translate
