#include "collabc/csp.hpp"
#include "collabc/error.hpp"

#include <functional>

namespace collabc::csp {

namespace {

// One prefix link of a chain: an event, send or receive ending in Skip.
struct Link {
  ProcKind kind;  // Event / Send / Recv
  std::string name;
  std::string message;
};

// A flattened body is a sequence of segments: runs of chain links broken up
// by composition operators and calls.
struct Segment {
  enum Type { Links, Composite, CallSite } type = Links;
  std::vector<Link> links;
  ProcessRef composite;  // Par / ExtChoice / EventChoice
  std::string callee;
};

void flatten(const ProcessRef& p, std::vector<Segment>& out) {
  auto links_tail = [&]() -> std::vector<Link>& {
    if (out.empty() || out.back().type != Segment::Links)
      out.push_back({Segment::Links, {}, nullptr, ""});
    return out.back().links;
  };
  switch (p->kind) {
    case ProcKind::Skip:
      break;
    case ProcKind::Event:
    case ProcKind::Send:
    case ProcKind::Recv:
      links_tail().push_back({p->kind, p->name, p->message});
      flatten(p->children[0], out);
      break;
    case ProcKind::Seq:
      flatten(p->children[0], out);
      flatten(p->children[1], out);
      break;
    case ProcKind::Par:
    case ProcKind::ExtChoice:
    case ProcKind::EventChoice:
      out.push_back({Segment::Composite, {}, p, ""});
      break;
    case ProcKind::Call:
      out.push_back({Segment::CallSite, {}, nullptr, p->name});
      break;
  }
}

bool is_core(const Link& l) {
  return l.kind != ProcKind::Event || l.name.rfind("work_", 0) == 0;
}

ProcessRef chain_term(const std::vector<Link>& links, std::size_t begin,
                      std::size_t end) {
  ProcessRef term;
  for (std::size_t i = end; i-- > begin;) {
    ProcessRef link_proc;
    switch (links[i].kind) {
      case ProcKind::Event: link_proc = p_event(links[i].name, p_skip()); break;
      case ProcKind::Send:
        link_proc = p_send(links[i].name, links[i].message, p_skip());
        break;
      default:
        link_proc = p_recv(links[i].name, links[i].message, p_skip());
        break;
    }
    term = term ? p_seq(link_proc, term) : link_proc;
  }
  return term ? term : p_skip();
}

class Builder {
 public:
  explicit Builder(const CspSpec& spec) : spec_(spec) {}

  SyntaxTree build() {
    int root = add_node("spec", "", -1);
    for (const ProcessDef& d : spec_.defs) {
      participant_ = d.name;
      counter_ = 0;
      int def_node = add_node("definition", d.name, root);
      add_node("definitionLeft", d.name, def_node);
      int body = add_node("simpleDefinition", "", def_node);
      build_sequence(d.body, body);
    }
    return std::move(tree_);
  }

 private:
  // Attaches the chunk nodes of `term` under `parent`, wrapping them in a
  // `seq` node when there is more than one.
  void build_sequence(const ProcessRef& term, int parent) {
    std::vector<Segment> segments;
    flatten(term, segments);
    std::vector<std::function<void(int)>> chunks;
    collect_chunks(segments, chunks);
    if (chunks.empty()) return;
    if (chunks.size() == 1) {
      chunks[0](parent);
      return;
    }
    int seq = add_node("seq", "", parent);
    for (auto& attach : chunks) attach(seq);
  }

  // Splits segments into attachable chunks. Link runs are segmented into
  // atomic processes: each channel operation or work event is the core of
  // one atomic; framing events between two cores are split evenly, the
  // leading half closing the earlier atomic. A run without a core stays one
  // silent chunk.
  void collect_chunks(const std::vector<Segment>& segments,
                      std::vector<std::function<void(int)>>& chunks) {
    for (const Segment& seg : segments) {
      if (seg.type == Segment::Composite) {
        ProcessRef comp = seg.composite;
        chunks.push_back([this, comp](int parent) { attach_composite(comp, parent); });
        continue;
      }
      if (seg.type == Segment::CallSite) {
        std::string callee = seg.callee;
        chunks.push_back([this, callee](int parent) {
          int n = add_node("defnCallLeft", "", parent);
          number_node(n);
          tree_.nodes[n].text = callee + "()";
        });
        continue;
      }
      const std::vector<Link>& links = seg.links;
      std::vector<std::size_t> cores;
      for (std::size_t i = 0; i < links.size(); ++i)
        if (is_core(links[i])) cores.push_back(i);
      std::vector<std::pair<std::size_t, std::size_t>> spans;
      if (cores.empty()) {
        spans.push_back({0, links.size()});
      } else {
        std::size_t begin = 0;
        for (std::size_t c = 0; c + 1 < cores.size(); ++c) {
          std::size_t gap = cores[c + 1] - cores[c] - 1;
          std::size_t end = cores[c] + 1 + (gap + 1) / 2;
          spans.push_back({begin, end});
          begin = end;
        }
        spans.push_back({begin, links.size()});
      }
      for (std::size_t s = 0; s < spans.size(); ++s) {
        auto [b, e] = spans[s];
        std::size_t core = cores.empty() ? links.size() : cores[s];
        std::vector<Link> part(links.begin() + b, links.begin() + e);
        bool has_core = !cores.empty();
        Link core_link = has_core ? links[core] : Link{};
        chunks.push_back([this, part, has_core, core_link](int parent) {
          attach_atomic(part, has_core, core_link, parent);
        });
      }
    }
  }

  void attach_atomic(const std::vector<Link>& links, bool has_core,
                     const Link& core, int parent) {
    int n = add_node("atomic", "", parent);
    number_node(n);
    TreeNode& node = tree_.nodes[n];
    if (!has_core) {
      node.atom_kind = AtomKind::Silent;
    } else if (core.kind == ProcKind::Send) {
      node.atom_kind = AtomKind::Send;
      node.channel = core.name;
      node.message = core.message;
      node.core_label = core.name + "!" + core.message;
    } else if (core.kind == ProcKind::Recv) {
      node.atom_kind = AtomKind::Recv;
      node.channel = core.name;
      node.message = core.message;
      node.core_label = core.name + "?" + core.message;
    } else {
      node.atom_kind = AtomKind::Internal;
      node.core_label = core.name;
    }
    node.text = print_process(chain_term(links, 0, links.size()));
    tree_.leaves.push_back(n);
  }

  void attach_composite(const ProcessRef& comp, int parent) {
    const char* label = comp->kind == ProcKind::Par          ? "par"
                        : comp->kind == ProcKind::ExtChoice ? "extChoice"
                                                            : "eventChoice";
    int n = add_node(label, "", parent);
    number_node(n);
    for (const ProcessRef& branch : comp->children) build_sequence(branch, n);
  }

  void number_node(int n) {
    tree_.nodes[n].name = "P" + std::to_string(++counter_);
  }

  int add_node(const std::string& label, const std::string& name, int parent) {
    TreeNode node;
    node.label = label;
    node.name = name;
    node.parent = parent;
    node.participant = participant_;
    int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back(std::move(node));
    if (parent >= 0) tree_.nodes[parent].children.push_back(id);
    return id;
  }

  const CspSpec& spec_;
  SyntaxTree tree_;
  std::string participant_;
  int counter_ = 0;
};

}  // namespace

SyntaxTree syntax_tree(const CspSpec& spec) { return Builder(spec).build(); }

}  // namespace collabc::csp
