#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace collabc::csp {

// Process terms of the CSP# subset: event prefixes, channel send/receive,
// Skip, `;`, `||`, `[]` (external choice), `[*]` (event-based choice, only
// resolvable by receives) and process calls. Terms are immutable and shared.

enum class ProcKind {
  Skip,
  Event,        // name -> cont
  Send,         // name!message -> cont
  Recv,         // name?message -> cont
  Seq,          // children[0]; children[1]
  Par,          // children[0] || children[1] || ...
  ExtChoice,    // children[0] [] children[1] [] ...
  EventChoice,  // children[0] [*] children[1] [*] ...
  Call,         // name()
};

struct Process;
using ProcessRef = std::shared_ptr<const Process>;

struct Process {
  ProcKind kind = ProcKind::Skip;
  std::string name;     // event name / channel / callee
  std::string message;  // send/recv payload
  std::vector<ProcessRef> children;
};

ProcessRef p_skip();
ProcessRef p_event(std::string name, ProcessRef cont);
ProcessRef p_send(std::string ch, std::string msg, ProcessRef cont);
ProcessRef p_recv(std::string ch, std::string msg, ProcessRef cont);
ProcessRef p_seq(ProcessRef left, ProcessRef right);
ProcessRef p_par(std::vector<ProcessRef> branches);
ProcessRef p_ext_choice(std::vector<ProcessRef> branches);
ProcessRef p_event_choice(std::vector<ProcessRef> branches);
ProcessRef p_call(std::string name);

bool equal(const ProcessRef& a, const ProcessRef& b);

struct ChannelDecl {
  std::string name;
  int capacity = 1;
};

struct ProcessDef {
  std::string name;
  ProcessRef body;
};

struct CspSpec {
  std::vector<ChannelDecl> channels;
  std::vector<ProcessDef> defs;
  // When explicit_system is set, `system` holds the parallel composition
  // printed as the reserved `System()` definition; otherwise every defined
  // process runs in parallel.
  std::vector<std::string> system;
  bool explicit_system = false;

  const ProcessDef* find(const std::string& name) const;
  const ChannelDecl* find_channel(const std::string& name) const;
  std::vector<std::string> participants() const;
};

bool equal(const CspSpec& a, const CspSpec& b);

// Text form. One definition per line, `Name() = Body;`. Channel declarations
// `channel ch N;` come first. parse_csp throws CompileError on syntax errors,
// undeclared channels and malformed `[*]` branches.
CspSpec parse_csp(const std::string& text);
std::string print_csp(const CspSpec& spec);
std::string print_process(const ProcessRef& p);

// Tokenizer shared with tests; splits the concrete syntax into lexical atoms.
std::vector<std::string> tokenize_csp(const std::string& text);

struct Alphabet {
  std::set<std::string> events;
  std::set<std::string> channels;
  std::set<std::pair<std::string, std::string>> messages;  // (ch, m)
};

Alphabet alphabet(const CspSpec& spec);

// --- syntax tree -----------------------------------------------------------
//
// The tree exposes each definition down to its atomic processes. A leaf is
// one task's maximal prefix chain (at most one channel operation, plus its
// framing events); internal nodes are the composition operators plus the
// grammar's reserved non-terminals. Leaves are numbered P1, P2, ... per
// definition in depth-first pre-order together with the operator nodes, so
// composites and atomics share one numbering.

enum class AtomKind { Silent, Internal, Send, Recv };

struct TreeNode {
  std::string label;  // spec|definition|simpleDefinition|definitionLeft|
                      // defnCallLeft|seq|par|extChoice|eventChoice|atomic
  std::string name;   // participant name, P-number, or call target
  int parent = -1;
  std::vector<int> children;

  // atomic leaves only
  AtomKind atom_kind = AtomKind::Silent;
  std::string channel;
  std::string message;
  std::string core_label;  // ch!m / ch?m / work event name; empty if silent
  std::string text;        // printed chunk
  std::string participant;
};

struct SyntaxTree {
  std::vector<TreeNode> nodes;
  std::vector<int> leaves;  // left-to-right across all definitions

  const TreeNode& operator[](int i) const { return nodes[i]; }
  std::vector<int> leaves_of(const std::string& participant) const;
  // Qualified id "Participant.Pk" for a node.
  std::string qualified(int node) const;
};

SyntaxTree syntax_tree(const CspSpec& spec);

}  // namespace collabc::csp
