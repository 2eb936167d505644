#pragma once

#include <string>
#include <vector>

namespace collabc::model {

// One organization's process, expressed as a structured single-entry /
// single-exit element sequence. Gateways are whole blocks: the split, the
// branches and the join are one Element with one input and one output
// sequence flow.

enum class ElementKind {
  Task,        // internal work, no message interaction
  SndTask,     // sends message `message` on `channel`
  RcvTask,     // receives message `message` from `channel`
  AndGate,     // parallel block
  XorGate,     // exclusive-choice block
  EventGate,   // event-based choice block; every branch starts with a RcvTask
  StartEvent,
  EndEvent,
};

struct Element;
using ElementList = std::vector<Element>;

struct Element {
  ElementKind kind = ElementKind::Task;
  std::string id;        // unique across the model; synthesized for BNF input
  std::string name;      // display label, may be empty
  std::string flow_in;   // e_i; empty for StartEvent
  std::string flow_out;  // e_o; empty for EndEvent
  std::string channel;   // snd/rcv only
  std::string message;   // snd/rcv only
  std::vector<ElementList> branches;  // gateways only, >= 2 after validation
};

struct Pool {
  std::string name;
  ElementList elements;
};

// (ch(P1, P2), m): message m travels from pool `sender` to pool `receiver`
// over FIFO channel `channel`.
struct MessageFlow {
  std::string channel;
  std::string sender;
  std::string receiver;
  std::string message;
};

struct CollaborationModel {
  std::vector<Pool> pools;
  std::vector<MessageFlow> message_flows;
};

struct StructuralIssue {
  std::string subject;  // offending id / name
  std::string detail;
};

// Textual model format. parse throws CompileError with line/column on
// malformed input and on task channel references missing from the message
// list. print is canonical: parse(print(m)) is structurally equal to m.
CollaborationModel parse_bnf_text(const std::string& text);
std::string print_bnf(const CollaborationModel& model);

// Structural equality ignores element ids and display names; those carry no
// meaning in the textual format. Everything else (kinds, flows, channels,
// messages, branch shape, pool names, message flows) must match.
bool structurally_equal(const CollaborationModel& a,
                        const CollaborationModel& b);
bool structurally_equal(const Element& a, const Element& b);

// Total: reports all invariant violations, never throws on a parseable model.
std::vector<StructuralIssue> validate_model(const CollaborationModel& model);

const char* kind_name(ElementKind kind);

}  // namespace collabc::model
