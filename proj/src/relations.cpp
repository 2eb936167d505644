#include "collabc/relations.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "collabc/error.hpp"

namespace collabc::relations {

using csp::SyntaxTree;
using csp::TreeNode;

namespace {

bool is_composite(const std::string& label) {
  return label == "par" || label == "extChoice" || label == "eventChoice";
}

// The chunk nodes directly inside a container (a simpleDefinition or one
// branch of a composite): a `seq` wrapper is transparent.
std::vector<int> chunks_in(const SyntaxTree& tree, int container) {
  const TreeNode& n = tree.nodes[container];
  if (n.label == "simpleDefinition") {
    if (n.children.empty()) return {};
    return chunks_in(tree, n.children[0]);
  }
  if (n.label == "seq") return n.children;
  return {container};
}

void reject_call(const SyntaxTree& tree, int node) {
  throw CompileError("process call " + tree.nodes[node].text +
                     " is not supported in relationship extraction");
}

void sort_values(std::map<std::string, std::vector<std::string>>& m) {
  for (auto& [k, v] : m) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
}

std::string rel_line(const std::string& rel, const std::string& lhs,
                     const std::vector<std::string>& rhs) {
  std::string line = rel + "(" + lhs + ") = [";
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    if (i) line += ", ";
    line += rhs[i];
  }
  return line + "]";
}

void emit_section(std::string& out, const std::string& rel,
                  const std::map<std::string, std::vector<std::string>>& m,
                  std::vector<std::string>& lines) {
  (void)out;
  for (const auto& [lhs, rhs] : m) lines.push_back(rel_line(rel, lhs, rhs));
}

// Entry atomics: the first atomics that may run when the chunk is reached.
void entries(const SyntaxTree& tree, int chunk, std::vector<int>& out) {
  const TreeNode& n = tree.nodes[chunk];
  if (n.label == "atomic") {
    out.push_back(chunk);
    return;
  }
  if (!is_composite(n.label)) reject_call(tree, chunk);
  for (int b : n.children) {
    std::vector<int> bl = chunks_in(tree, b);
    if (!bl.empty()) entries(tree, bl.front(), out);
  }
}

// Exit atomics: the last atomics to finish before the chunk is left.
void exits(const SyntaxTree& tree, int chunk, std::vector<int>& out) {
  const TreeNode& n = tree.nodes[chunk];
  if (n.label == "atomic") {
    out.push_back(chunk);
    return;
  }
  if (!is_composite(n.label)) reject_call(tree, chunk);
  for (int b : n.children) {
    std::vector<int> bl = chunks_in(tree, b);
    if (!bl.empty()) exits(tree, bl.back(), out);
  }
}

void leaves_in(const SyntaxTree& tree, int node, std::vector<int>& out) {
  const TreeNode& n = tree.nodes[node];
  if (n.label == "atomic") out.push_back(node);
  for (int c : n.children) leaves_in(tree, c, out);
}

}  // namespace

const NodeRelations* RelationSet::find(const std::string& participant) const {
  for (const auto& nr : participants)
    if (nr.participant == participant) return &nr;
  return nullptr;
}

RelationSet extract_relations(const SyntaxTree& tree) {
  RelationSet out;
  if (tree.nodes.empty()) return out;

  for (int def : tree.nodes[0].children) {
    NodeRelations nr;
    nr.participant = tree.nodes[def].name;
    int simple = -1;
    for (int c : tree.nodes[def].children)
      if (tree.nodes[c].label == "simpleDefinition") simple = c;

    auto name = [&](int n) { return tree.nodes[n].name; };
    std::function<void(const std::vector<int>&)> link_chunks =
        [&](const std::vector<int>& chunks) {
          for (std::size_t i = 0; i + 1 < chunks.size(); ++i)
            nr.next[name(chunks[i])].push_back(name(chunks[i + 1]));
          for (int c : chunks) {
            const TreeNode& n = tree.nodes[c];
            if (n.label == "atomic") continue;
            if (!is_composite(n.label)) reject_call(tree, c);
            std::vector<std::string> lasts, firsts;
            for (int b : n.children) {
              std::vector<int> bl = chunks_in(tree, b);
              if (bl.empty()) continue;
              nr.init[name(c)].push_back(name(bl.front()));
              nr.end[name(bl.back())].push_back(name(c));
              firsts.push_back(name(bl.front()));
              lasts.push_back(name(bl.back()));
              link_chunks(bl);
            }
            if (n.label == "par") {
              nr.and_rel[name(c)] = lasts;
            } else {
              for (std::size_t i = 0; i < firsts.size(); ++i)
                for (std::size_t j = 0; j < firsts.size(); ++j)
                  if (i != j) nr.xor_rel[firsts[i]].push_back(firsts[j]);
            }
          }
        };

    std::vector<int> body = simple >= 0 ? chunks_in(tree, simple) : std::vector<int>{};
    if (!body.empty()) {
      nr.init[nr.participant].push_back(name(body.front()));
      nr.end[name(body.back())].push_back(nr.participant);
      link_chunks(body);
    }
    sort_values(nr.init);
    sort_values(nr.next);
    sort_values(nr.end);
    sort_values(nr.and_rel);
    sort_values(nr.xor_rel);
    out.participants.push_back(std::move(nr));
  }

  for (int s : tree.leaves) {
    if (tree.nodes[s].atom_kind != csp::AtomKind::Send) continue;
    for (int r : tree.leaves) {
      if (tree.nodes[r].atom_kind != csp::AtomKind::Recv) continue;
      if (tree.nodes[s].channel != tree.nodes[r].channel) continue;
      if (tree.nodes[s].message != tree.nodes[r].message) continue;
      out.enable[tree.qualified(s)].push_back(tree.qualified(r));
    }
  }
  sort_values(out.enable);
  return out;
}

ReducedRelationSet reduce(const RelationSet& rel, const SyntaxTree& tree) {
  ReducedRelationSet red;
  red.enable = rel.enable;
  for (int leaf : tree.leaves) red.atoms.push_back(tree.qualified(leaf));
  if (tree.nodes.empty()) return red;

  auto q = [&](int n) { return tree.qualified(n); };
  auto qualify = [&](const std::vector<int>& nodes) {
    std::vector<std::string> out;
    out.reserve(nodes.size());
    for (int n : nodes) out.push_back(tree.qualified(n));
    return out;
  };

  std::vector<std::set<int>> groups;

  for (int def : tree.nodes[0].children) {
    const std::string& participant = tree.nodes[def].name;
    int simple = -1;
    for (int c : tree.nodes[def].children)
      if (tree.nodes[c].label == "simpleDefinition") simple = c;
    std::vector<int> body =
        simple >= 0 ? chunks_in(tree, simple) : std::vector<int>{};

    std::function<void(const std::vector<int>&)> walk =
        [&](const std::vector<int>& chunks) {
          for (std::size_t i = 0; i + 1 < chunks.size(); ++i) {
            std::vector<int> from, to;
            exits(tree, chunks[i], from);
            entries(tree, chunks[i + 1], to);
            for (int e : from)
              for (int t : to) red.activate[q(e)].push_back(q(t));
          }
          for (int c : chunks) {
            const TreeNode& n = tree.nodes[c];
            if (n.label == "atomic") continue;
            if (!is_composite(n.label)) reject_call(tree, c);
            std::vector<std::vector<int>> branch_lists;
            for (int b : n.children) branch_lists.push_back(chunks_in(tree, b));
            for (const auto& bl : branch_lists) walk(bl);
            if (n.label == "par") {
              std::vector<int> joint;
              exits(tree, c, joint);
              groups.emplace_back(joint.begin(), joint.end());
            } else {
              for (std::size_t i = 0; i < branch_lists.size(); ++i) {
                if (branch_lists[i].empty()) continue;
                std::vector<int> heads;
                entries(tree, branch_lists[i].front(), heads);
                std::vector<int> rivals;
                for (std::size_t j = 0; j < branch_lists.size(); ++j) {
                  if (i == j) continue;
                  for (int bc : branch_lists[j]) leaves_in(tree, bc, rivals);
                }
                for (int h : heads)
                  for (int r : rivals) red.inactivate[q(h)].push_back(q(r));
              }
            }
          }
        };

    if (!body.empty()) {
      std::vector<int> first, last;
      entries(tree, body.front(), first);
      exits(tree, body.back(), last);
      red.initials[participant] = qualify(first);
      red.finals[participant] = qualify(last);
      walk(body);
    } else {
      red.initials[participant] = {};
      red.finals[participant] = {};
    }
  }

  // Nested parallel joins that share an exit collapse into one group, keeping
  // groups disjoint.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < groups.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < groups.size() && !merged; ++j) {
        bool overlap = false;
        for (int n : groups[j]) overlap |= groups[i].count(n) > 0;
        if (overlap) {
          groups[i].insert(groups[j].begin(), groups[j].end());
          groups.erase(groups.begin() + static_cast<long>(j));
          merged = true;
        }
      }
  }

  // A join group reaching into rival branches of an exclusive choice could
  // never be completed; refuse such models instead of guessing a semantics.
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    if (n.label != "extChoice" && n.label != "eventChoice") continue;
    std::vector<std::set<int>> branch_leaves;
    for (int b : n.children) {
      std::vector<int> ls;
      leaves_in(tree, b, ls);
      branch_leaves.emplace_back(ls.begin(), ls.end());
    }
    for (const auto& g : groups) {
      int touched = 0;
      for (const auto& bl : branch_leaves) {
        bool hit = false;
        for (int m : g) hit |= bl.count(m) > 0;
        touched += hit;
      }
      if (touched > 1)
        throw CompileError("parallel join inside " + tree.qualified(static_cast<int>(i)) +
                           " spans rival exclusive branches; unsupported model");
    }
  }

  for (const auto& g : groups) {
    std::vector<std::string> names = qualify(std::vector<int>(g.begin(), g.end()));
    std::sort(names.begin(), names.end());
    for (const auto& m : names) red.parallel[m] = names;
  }

  sort_values(red.activate);
  sort_values(red.inactivate);
  for (auto& [k, v] : red.initials) std::sort(v.begin(), v.end());
  for (auto& [k, v] : red.finals) std::sort(v.begin(), v.end());
  return red;
}

std::string dump_relations(const RelationSet& rel) {
  std::string out;
  for (const auto& nr : rel.participants) {
    out += "participant " + nr.participant + "\n";
    std::vector<std::string> lines;
    emit_section(out, "Init", nr.init, lines);
    emit_section(out, "Next", nr.next, lines);
    emit_section(out, "End", nr.end, lines);
    emit_section(out, "And", nr.and_rel, lines);
    emit_section(out, "Xor", nr.xor_rel, lines);
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) out += l + "\n";
    out += "\n";
  }
  out += "enable\n";
  std::vector<std::string> lines;
  emit_section(out, "Enable", rel.enable, lines);
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string dump_relations(const ReducedRelationSet& red) {
  std::string out = "atoms\n";
  for (const auto& a : red.atoms) out += a + "\n";
  auto section = [&out](const std::string& header, const std::string& rel,
                        const std::map<std::string, std::vector<std::string>>& m) {
    out += "\n" + header + "\n";
    std::vector<std::string> lines;
    for (const auto& [lhs, rhs] : m) lines.push_back(rel_line(rel, lhs, rhs));
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) out += l + "\n";
  };
  section("initials", "Init", red.initials);
  section("finals", "Final", red.finals);
  section("activate", "Activate", red.activate);
  section("inactivate", "Inactivate", red.inactivate);

  out += "\nparallel\n";
  std::set<std::vector<std::string>> unique_groups;
  for (const auto& [m, g] : red.parallel) unique_groups.insert(g);
  for (const auto& g : unique_groups) {
    std::string line = "Parallel = [";
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (i) line += ", ";
      line += g[i];
    }
    out += line + "]\n";
  }

  section("enable", "Enable", red.enable);
  return out;
}

std::size_t unreduced_state_count(const SyntaxTree& tree) {
  std::size_t count = 0;
  for (const auto& n : tree.nodes)
    if (n.label == "atomic" || n.label == "definition" || is_composite(n.label))
      ++count;
  return count;
}

std::size_t reduced_state_count(const ReducedRelationSet& red) {
  return red.atoms.size();
}

}  // namespace collabc::relations
