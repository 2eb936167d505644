#include "collabc/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace collabc::model {

const char* kind_name(ElementKind kind) {
  switch (kind) {
    case ElementKind::Task: return "task";
    case ElementKind::SndTask: return "sndTask";
    case ElementKind::RcvTask: return "rcvTask";
    case ElementKind::AndGate: return "andGate";
    case ElementKind::XorGate: return "xorGate";
    case ElementKind::EventGate: return "eventbaseGate";
    case ElementKind::StartEvent: return "startEvent";
    case ElementKind::EndEvent: return "endEvent";
  }
  return "?";
}

namespace {

void print_element(std::ostringstream& out, const Element& e);

void print_elems(std::ostringstream& out, const ElementList& elems) {
  bool first = true;
  for (const Element& e : elems) {
    // Start/end events have no textual form; they are non-interacting glue.
    if (e.kind == ElementKind::StartEvent || e.kind == ElementKind::EndEvent)
      continue;
    if (!first) out << "; ";
    print_element(out, e);
    first = false;
  }
}

void print_element(std::ostringstream& out, const Element& e) {
  switch (e.kind) {
    case ElementKind::Task:
      out << "task(" << e.flow_in << "," << e.flow_out << ")";
      break;
    case ElementKind::SndTask:
    case ElementKind::RcvTask:
      out << kind_name(e.kind) << "(" << e.flow_in << ",(" << e.channel << ","
          << e.message << ")," << e.flow_out << ")";
      break;
    case ElementKind::AndGate:
    case ElementKind::XorGate:
    case ElementKind::EventGate: {
      out << kind_name(e.kind) << "(" << e.flow_in << ",(";
      for (std::size_t i = 0; i < e.branches.size(); ++i) {
        if (i) out << ",";
        out << "(";
        print_elems(out, e.branches[i]);
        out << ")";
      }
      out << ")," << e.flow_out << ")";
      break;
    }
    case ElementKind::StartEvent:
    case ElementKind::EndEvent:
      break;
  }
}

}  // namespace

std::string print_bnf(const CollaborationModel& m) {
  std::ostringstream out;
  bool first = true;
  for (const Pool& p : m.pools) {
    if (!first) out << "||\n";
    out << "pool(" << p.name << ", ";
    print_elems(out, p.elements);
    out << ")\n";
    first = false;
  }
  out << "messages {\n";
  for (const MessageFlow& f : m.message_flows) {
    out << "(" << f.channel << "(" << f.sender << "," << f.receiver << "),"
        << f.message << ")\n";
  }
  out << "}\n";
  return out.str();
}

bool structurally_equal(const Element& a, const Element& b) {
  if (a.kind != b.kind || a.flow_in != b.flow_in || a.flow_out != b.flow_out ||
      a.channel != b.channel || a.message != b.message)
    return false;
  if (a.branches.size() != b.branches.size()) return false;
  for (std::size_t i = 0; i < a.branches.size(); ++i) {
    const ElementList& x = a.branches[i];
    const ElementList& y = b.branches[i];
    if (x.size() != y.size()) return false;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (!structurally_equal(x[j], y[j])) return false;
  }
  return true;
}

bool structurally_equal(const CollaborationModel& a,
                        const CollaborationModel& b) {
  if (a.pools.size() != b.pools.size()) return false;
  for (std::size_t i = 0; i < a.pools.size(); ++i) {
    if (a.pools[i].name != b.pools[i].name) return false;
    const ElementList& x = a.pools[i].elements;
    const ElementList& y = b.pools[i].elements;
    if (x.size() != y.size()) return false;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (!structurally_equal(x[j], y[j])) return false;
  }
  auto key = [](const MessageFlow& f) {
    return f.channel + "\v" + f.sender + "\v" + f.receiver + "\v" + f.message;
  };
  std::multiset<std::string> fa, fb;
  for (const auto& f : a.message_flows) fa.insert(key(f));
  for (const auto& f : b.message_flows) fb.insert(key(f));
  return fa == fb;
}

namespace {

struct Validator {
  const CollaborationModel& m;
  std::vector<StructuralIssue> issues;

  void issue(const std::string& subject, const std::string& detail) {
    issues.push_back({subject, detail});
  }

  void walk(const std::string& pool, const ElementList& elems,
            std::set<std::string>& ids,
            std::map<std::pair<std::string, std::string>,
                     std::vector<std::pair<std::string, ElementKind>>>& refs) {
    for (const Element& e : elems) {
      if (!e.id.empty() && !ids.insert(e.id).second)
        issue(e.id, "duplicate element id");
      switch (e.kind) {
        case ElementKind::SndTask:
        case ElementKind::RcvTask:
          refs[{e.channel, e.message}].push_back({pool, e.kind});
          break;
        case ElementKind::AndGate:
        case ElementKind::XorGate:
        case ElementKind::EventGate: {
          if (e.branches.size() < 2)
            issue(e.id.empty() ? kind_name(e.kind) : e.id,
                  "gateway needs at least 2 branches");
          for (const ElementList& b : e.branches) {
            if (b.empty()) {
              issue(e.id.empty() ? kind_name(e.kind) : e.id,
                    "empty gateway branch");
              continue;
            }
            if (e.kind == ElementKind::EventGate &&
                b.front().kind != ElementKind::RcvTask)
              issue(e.id.empty() ? kind_name(e.kind) : e.id,
                    "event gate branch must start with a rcvTask");
            walk(pool, b, ids, refs);
          }
          break;
        }
        default:
          break;
      }
    }
  }

  std::vector<StructuralIssue> run() {
    std::set<std::string> pool_names;
    for (const Pool& p : m.pools)
      if (!pool_names.insert(p.name).second)
        issue(p.name, "duplicate pool name");

    std::set<std::string> ids;
    // (ch, m) -> [(pool, task kind)] for all tasks referencing the pair
    std::map<std::pair<std::string, std::string>,
             std::vector<std::pair<std::string, ElementKind>>>
        refs;
    for (const Pool& p : m.pools) walk(p.name, p.elements, ids, refs);

    std::set<std::pair<std::string, std::string>> declared;
    std::map<std::string, std::pair<std::string, std::string>> endpoints;
    for (const MessageFlow& f : m.message_flows) {
      if (!declared.insert({f.channel, f.message}).second)
        issue(f.channel, "duplicate (channel, message) pair '" + f.channel +
                             "," + f.message + "'");
      if (f.sender == f.receiver)
        issue(f.channel, "message flow sender and receiver are the same pool");
      auto [it, fresh] = endpoints.insert({f.channel, {f.sender, f.receiver}});
      if (!fresh && it->second != std::make_pair(f.sender, f.receiver))
        issue(f.channel, "channel declared with conflicting endpoints");
      if (!pool_names.count(f.sender))
        issue(f.channel, "sender pool '" + f.sender + "' does not exist");
      if (!pool_names.count(f.receiver))
        issue(f.channel, "receiver pool '" + f.receiver + "' does not exist");

      auto ref = refs.find({f.channel, f.message});
      bool snd_ok = false, rcv_ok = false;
      if (ref != refs.end()) {
        for (const auto& [pool, kind] : ref->second) {
          if (kind == ElementKind::SndTask && pool == f.sender) snd_ok = true;
          if (kind == ElementKind::RcvTask && pool == f.receiver) rcv_ok = true;
        }
      }
      if (!snd_ok)
        issue(f.channel, "dangling message endpoint: no sndTask for (" +
                             f.channel + "," + f.message + ") in pool '" +
                             f.sender + "'");
      if (!rcv_ok)
        issue(f.channel, "dangling message endpoint: no rcvTask for (" +
                             f.channel + "," + f.message + ") in pool '" +
                             f.receiver + "'");
    }
    for (const auto& [pair, uses] : refs) {
      if (!declared.count(pair))
        issue(pair.first, "task references channel '" + pair.first +
                              "' with message '" + pair.second +
                              "' not declared in the message list");
      (void)uses;
    }
    return std::move(issues);
  }
};

}  // namespace

std::vector<StructuralIssue> validate_model(const CollaborationModel& m) {
  Validator v{m, {}};
  return v.run();
}

}  // namespace collabc::model
