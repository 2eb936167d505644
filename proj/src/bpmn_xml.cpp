#include "collabc/bpmn_xml.hpp"

#include <expat.h>

#include <map>
#include <set>

#include "collabc/error.hpp"

namespace collabc::bpmn {

using model::Element;
using model::ElementKind;

namespace {

// Lightweight DOM built over expat's SAX callbacks; only tags and attributes
// matter for BPMN structure.
struct XmlNode {
  std::string tag;  // namespace prefix stripped
  std::map<std::string, std::string> attrs;
  std::vector<int> children;
};

struct XmlDoc {
  std::vector<XmlNode> nodes;
  std::vector<int> stack;
};

std::string local_name(const char* qname) {
  std::string s = qname;
  auto pos = s.rfind(':');
  return pos == std::string::npos ? s : s.substr(pos + 1);
}

void XMLCALL on_start(void* user, const char* name, const char** attrs) {
  auto* doc = static_cast<XmlDoc*>(user);
  XmlNode node;
  node.tag = local_name(name);
  for (int i = 0; attrs[i]; i += 2)
    node.attrs[local_name(attrs[i])] = attrs[i + 1];
  int id = static_cast<int>(doc->nodes.size());
  doc->nodes.push_back(std::move(node));
  if (!doc->stack.empty()) doc->nodes[doc->stack.back()].children.push_back(id);
  doc->stack.push_back(id);
}

void XMLCALL on_end(void* user, const char*) {
  static_cast<XmlDoc*>(user)->stack.pop_back();
}

XmlDoc parse_xml(const std::string& text) {
  XmlDoc doc;
  XML_Parser parser = XML_ParserCreate(nullptr);
  XML_SetUserData(parser, &doc);
  XML_SetElementHandler(parser, on_start, on_end);
  if (XML_Parse(parser, text.data(), static_cast<int>(text.size()), 1) ==
      XML_STATUS_ERROR) {
    CompileError err(XML_ErrorString(XML_GetErrorCode(parser)),
                     static_cast<int>(XML_GetCurrentLineNumber(parser)),
                     static_cast<int>(XML_GetCurrentColumnNumber(parser)) + 1);
    XML_ParserFree(parser);
    throw err;
  }
  XML_ParserFree(parser);
  return doc;
}

std::string attr(const XmlNode& n, const std::string& key) {
  auto it = n.attrs.find(key);
  return it == n.attrs.end() ? "" : it->second;
}

struct FlowNode {
  std::string tag;
  std::string id;
  std::vector<std::string> in, out;  // sequence flow ids
};

struct Graph {
  std::map<std::string, FlowNode> nodes;           // by element id
  std::map<std::string, std::pair<std::string, std::string>> flows;  // id -> (src, dst)
  std::string target_of(const std::string& flow) const { return flows.at(flow).second; }
};

struct MessageEndpoint {
  std::string channel, message;
};

class ProcessReader {
 public:
  ProcessReader(const Graph& g,
                const std::map<std::string, MessageEndpoint>& sends,
                const std::map<std::string, MessageEndpoint>& receives)
      : g_(g), sends_(sends), receives_(receives) {}

  std::vector<Element> read(const std::string& start_id) {
    auto [elements, stop] = walk(start_id);
    if (!stop.empty())
      throw CompileError("join gateway " + stop + " closes no open split");
    return std::move(elements);
  }

 private:
  // Follows the flow from `id` until the single end event or an unmatched
  // join gateway (returned to the caller that opened the split).
  std::pair<std::vector<Element>, std::string> walk(const std::string& id) {
    std::vector<Element> out;
    std::string cur = id;
    while (!cur.empty()) {
      const FlowNode& n = node(cur);
      bool gateway = n.tag == "exclusiveGateway" || n.tag == "parallelGateway" ||
                     n.tag == "eventBasedGateway";
      if (gateway && n.in.size() > 1 && n.out.size() > 1)
        throw CompileError("gateway " + n.id + " both joins and splits");
      if (gateway && n.in.size() > 1)
        return {std::move(out), n.id};  // a join: the opening split closes it
      if (!visited_.insert(cur).second)
        throw CompileError("unstructured flow: " + cur + " is reached twice");
      if (n.tag == "startEvent") {
        cur = next_of(n);
        continue;
      }
      if (n.tag == "endEvent") return {std::move(out), ""};
      if (n.tag == "task" || n.tag == "sendTask" || n.tag == "receiveTask") {
        out.push_back(make_task(n));
        cur = next_of(n);
        continue;
      }
      if (gateway) {
        if (n.out.size() < 2)
          throw CompileError("gateway " + n.id + " splits fewer than two ways");
        out.push_back(read_split(n));
        cur = next_of(node(split_join_));
        continue;
      }
      throw CompileError("unsupported element " + n.id + " (" + n.tag + ")");
    }
    throw CompileError("flow does not reach an end event");
  }

  Element read_split(const FlowNode& split) {
    Element gate;
    gate.id = split.id;
    gate.kind = split.tag == "parallelGateway"    ? ElementKind::AndGate
                : split.tag == "exclusiveGateway" ? ElementKind::XorGate
                                                  : ElementKind::EventGate;
    gate.flow_in = single_in(split);
    std::string join;
    for (const std::string& f : split.out) {
      auto [branch, stop] = walk(g_.target_of(f));
      if (stop.empty())
        throw CompileError("branch of " + split.id + " ends without rejoining");
      if (branch.empty())
        throw CompileError("branch of " + split.id + " contains no task");
      if (join.empty()) join = stop;
      if (join != stop)
        throw CompileError("branches of " + split.id + " rejoin at different gateways");
      gate.branches.push_back(std::move(branch));
    }
    const FlowNode& jn = node(join);
    const std::string want =
        gate.kind == ElementKind::AndGate ? "parallelGateway" : "exclusiveGateway";
    if (jn.tag != want)
      throw CompileError("split " + split.id + " closed by " + join + " (" +
                         jn.tag + "), expected a " + want);
    if (jn.out.size() != 1)
      throw CompileError("join gateway " + join + " must have one outgoing flow");
    gate.flow_out = jn.out.front();
    // Branch boundaries carry the gateway's frame flows, matching the
    // textual form of the same model.
    for (auto& branch : gate.branches) {
      force_entry(branch.front(), gate.flow_in);
      force_exit(branch.back(), gate.flow_out);
    }
    split_join_ = join;
    return gate;
  }

  static void force_entry(Element& e, const std::string& flow) {
    e.flow_in = flow;
    for (auto& b : e.branches) force_entry(b.front(), flow);
  }
  static void force_exit(Element& e, const std::string& flow) {
    e.flow_out = flow;
    for (auto& b : e.branches) force_exit(b.back(), flow);
  }

  Element make_task(const FlowNode& n) {
    Element e;
    e.id = n.id;
    e.flow_in = single_in(n);
    e.flow_out = single_out(n);
    if (n.tag == "task") {
      e.kind = ElementKind::Task;
      return e;
    }
    const auto& table = n.tag == "sendTask" ? sends_ : receives_;
    auto it = table.find(n.id);
    if (it == table.end())
      throw CompileError(n.tag + " " + n.id + " has no attached message flow");
    e.kind = n.tag == "sendTask" ? ElementKind::SndTask : ElementKind::RcvTask;
    e.channel = it->second.channel;
    e.message = it->second.message;
    return e;
  }

  const FlowNode& node(const std::string& id) const {
    auto it = g_.nodes.find(id);
    if (it == g_.nodes.end())
      throw CompileError("sequence flow references unknown element " + id);
    return it->second;
  }
  std::string single_in(const FlowNode& n) const {
    if (n.in.size() != 1)
      throw CompileError("element " + n.id + " needs exactly one incoming flow");
    return n.in.front();
  }
  std::string single_out(const FlowNode& n) const {
    if (n.out.size() != 1)
      throw CompileError("element " + n.id + " needs exactly one outgoing flow");
    return n.out.front();
  }
  std::string next_of(const FlowNode& n) const { return g_.target_of(single_out(n)); }

  const Graph& g_;
  const std::map<std::string, MessageEndpoint>& sends_;
  const std::map<std::string, MessageEndpoint>& receives_;
  std::set<std::string> visited_;
  std::string split_join_;
};

}  // namespace

model::CollaborationModel parse_bpmn_xml(const std::string& xml_text) {
  XmlDoc doc = parse_xml(xml_text);
  if (doc.nodes.empty() || doc.nodes[0].tag != "definitions")
    throw CompileError("root element must be definitions");

  model::CollaborationModel out;
  std::map<std::string, std::string> pool_of_process;  // process id -> pool name
  std::map<std::string, MessageEndpoint> sends, receives;

  const XmlNode* collaboration = nullptr;
  std::vector<const XmlNode*> processes;
  for (int c : doc.nodes[0].children) {
    const XmlNode& n = doc.nodes[c];
    if (n.tag == "collaboration") collaboration = &n;
    if (n.tag == "process") processes.push_back(&n);
  }
  if (!collaboration) throw CompileError("no collaboration element");

  for (int c : collaboration->children) {
    const XmlNode& n = doc.nodes[c];
    if (n.tag == "participant") {
      std::string name = attr(n, "name");
      if (name.empty()) name = attr(n, "id");
      std::string ref = attr(n, "processRef");
      if (ref.empty())
        throw CompileError("participant " + name + " has no processRef");
      pool_of_process[ref] = name;
    } else if (n.tag == "messageFlow") {
      model::MessageFlow mf;
      mf.channel = attr(n, "id");
      mf.message = attr(n, "name");
      if (mf.message.empty())
        throw CompileError("messageFlow " + mf.channel + " has no message name");
      sends[attr(n, "sourceRef")] = {mf.channel, mf.message};
      receives[attr(n, "targetRef")] = {mf.channel, mf.message};
      out.message_flows.push_back(std::move(mf));
    }
  }

  // Message-flow endpoints name tasks; the owning pools become the channel's
  // sender and receiver.
  std::map<std::string, std::string> pool_of_element;
  for (const XmlNode* proc : processes) {
    auto pit = pool_of_process.find(attr(*proc, "id"));
    if (pit == pool_of_process.end()) continue;
    for (int c : proc->children) {
      const std::string& id = doc.nodes[c].attrs.count("id")
                                  ? doc.nodes[c].attrs.at("id")
                                  : std::string();
      if (!id.empty()) pool_of_element[id] = pit->second;
    }
  }
  for (auto& mf : out.message_flows) {
    for (const auto& [task, ep] : sends)
      if (ep.channel == mf.channel) mf.sender = pool_of_element.count(task)
                                                    ? pool_of_element.at(task)
                                                    : "";
    for (const auto& [task, ep] : receives)
      if (ep.channel == mf.channel) mf.receiver = pool_of_element.count(task)
                                                      ? pool_of_element.at(task)
                                                      : "";
    if (mf.sender.empty() || mf.receiver.empty())
      throw CompileError("messageFlow " + mf.channel +
                         " does not connect two pool tasks");
  }

  for (const XmlNode* proc : processes) {
    std::string proc_id = attr(*proc, "id");
    auto pit = pool_of_process.find(proc_id);
    if (pit == pool_of_process.end())
      throw CompileError("process " + proc_id + " belongs to no participant");

    Graph g;
    std::string start;
    int starts = 0, ends = 0;
    std::vector<std::string> flow_order;  // document order fixes branch order
    for (int c : proc->children) {
      const XmlNode& n = doc.nodes[c];
      if (n.tag == "sequenceFlow") {
        g.flows[attr(n, "id")] = {attr(n, "sourceRef"), attr(n, "targetRef")};
        flow_order.push_back(attr(n, "id"));
        continue;
      }
      if (n.tag == "documentation" || n.tag == "extensionElements" ||
          n.tag == "laneSet")
        continue;
      FlowNode fn;
      fn.tag = n.tag;
      fn.id = attr(n, "id");
      if (n.tag == "startEvent") {
        ++starts;
        start = fn.id;
        for (int gc : n.children)
          if (doc.nodes[gc].tag != "outgoing" && doc.nodes[gc].tag != "incoming")
            throw CompileError("start event " + fn.id + " must be plain (none type)");
      }
      if (n.tag == "endEvent") {
        ++ends;
        for (int gc : n.children)
          if (doc.nodes[gc].tag != "outgoing" && doc.nodes[gc].tag != "incoming")
            throw CompileError("end event " + fn.id + " must be plain (none type)");
      }
      g.nodes[fn.id] = fn;
    }
    for (const std::string& fid : flow_order) {
      const auto& sd = g.flows.at(fid);
      auto src = g.nodes.find(sd.first);
      auto dst = g.nodes.find(sd.second);
      if (src == g.nodes.end() || dst == g.nodes.end())
        throw CompileError("sequence flow " + fid + " references unknown element");
      src->second.out.push_back(fid);
      dst->second.in.push_back(fid);
    }
    if (starts != 1)
      throw CompileError("process " + proc_id + " must have exactly one start event");
    if (ends != 1)
      throw CompileError("process " + proc_id + " must have exactly one end event");

    model::Pool pool;
    pool.name = pit->second;
    pool.elements = ProcessReader(g, sends, receives).read(start);
    out.pools.push_back(std::move(pool));
  }
  return out;
}

}  // namespace collabc::bpmn
