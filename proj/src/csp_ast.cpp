#include <algorithm>

#include "collabc/csp.hpp"

namespace collabc::csp {

namespace {
ProcessRef make(ProcKind kind, std::string name, std::string message,
                std::vector<ProcessRef> children) {
  auto p = std::make_shared<Process>();
  p->kind = kind;
  p->name = std::move(name);
  p->message = std::move(message);
  p->children = std::move(children);
  return p;
}
}  // namespace

ProcessRef p_skip() {
  static const ProcessRef skip = make(ProcKind::Skip, "", "", {});
  return skip;
}
ProcessRef p_event(std::string name, ProcessRef cont) {
  return make(ProcKind::Event, std::move(name), "", {std::move(cont)});
}
ProcessRef p_send(std::string ch, std::string msg, ProcessRef cont) {
  return make(ProcKind::Send, std::move(ch), std::move(msg),
              {std::move(cont)});
}
ProcessRef p_recv(std::string ch, std::string msg, ProcessRef cont) {
  return make(ProcKind::Recv, std::move(ch), std::move(msg),
              {std::move(cont)});
}
ProcessRef p_seq(ProcessRef left, ProcessRef right) {
  return make(ProcKind::Seq, "", "", {std::move(left), std::move(right)});
}
ProcessRef p_par(std::vector<ProcessRef> branches) {
  return make(ProcKind::Par, "", "", std::move(branches));
}
ProcessRef p_ext_choice(std::vector<ProcessRef> branches) {
  return make(ProcKind::ExtChoice, "", "", std::move(branches));
}
ProcessRef p_event_choice(std::vector<ProcessRef> branches) {
  return make(ProcKind::EventChoice, "", "", std::move(branches));
}
ProcessRef p_call(std::string name) {
  return make(ProcKind::Call, std::move(name), "", {});
}

bool equal(const ProcessRef& a, const ProcessRef& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->name != b->name || a->message != b->message ||
      a->children.size() != b->children.size())
    return false;
  for (std::size_t i = 0; i < a->children.size(); ++i)
    if (!equal(a->children[i], b->children[i])) return false;
  return true;
}

const ProcessDef* CspSpec::find(const std::string& name) const {
  for (const ProcessDef& d : defs)
    if (d.name == name) return &d;
  return nullptr;
}

const ChannelDecl* CspSpec::find_channel(const std::string& name) const {
  for (const ChannelDecl& c : channels)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<std::string> CspSpec::participants() const {
  if (explicit_system) return system;
  std::vector<std::string> names;
  names.reserve(defs.size());
  for (const ProcessDef& d : defs) names.push_back(d.name);
  return names;
}

bool equal(const CspSpec& a, const CspSpec& b) {
  if (a.channels.size() != b.channels.size() || a.defs.size() != b.defs.size())
    return false;
  for (std::size_t i = 0; i < a.channels.size(); ++i)
    if (a.channels[i].name != b.channels[i].name ||
        a.channels[i].capacity != b.channels[i].capacity)
      return false;
  for (std::size_t i = 0; i < a.defs.size(); ++i)
    if (a.defs[i].name != b.defs[i].name ||
        !equal(a.defs[i].body, b.defs[i].body))
      return false;
  return a.explicit_system == b.explicit_system &&
         a.participants() == b.participants();
}

std::vector<int> SyntaxTree::leaves_of(const std::string& participant) const {
  std::vector<int> out;
  for (int leaf : leaves)
    if (nodes[leaf].participant == participant) out.push_back(leaf);
  return out;
}

std::string SyntaxTree::qualified(int node) const {
  const TreeNode& n = nodes[node];
  if (n.participant.empty() || n.name == n.participant) return n.name;
  return n.participant + "." + n.name;
}

}  // namespace collabc::csp
