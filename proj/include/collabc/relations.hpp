#pragma once

#include <map>
#include <string>
#include <vector>

#include "collabc/csp.hpp"

namespace collabc::relations {

// Association relationships over syntax-tree nodes of one participant.
// Keys and values are node names: P-numbered chunk nodes plus the
// participant's own name for its root.
struct NodeRelations {
  std::string participant;
  std::map<std::string, std::vector<std::string>> init;     // container -> entry chunks
  std::map<std::string, std::vector<std::string>> next;     // chunk -> sequential successor
  std::map<std::string, std::vector<std::string>> end;      // last chunk -> container
  std::map<std::string, std::vector<std::string>> and_rel;  // par -> branch-closing chunks
  std::map<std::string, std::vector<std::string>> xor_rel;  // branch head -> rival heads
};

struct RelationSet {
  std::vector<NodeRelations> participants;
  // Qualified sender atomic -> qualified receiver atomics, one entry per
  // message flow.
  std::map<std::string, std::vector<std::string>> enable;

  const NodeRelations* find(const std::string& participant) const;
};

// Same relationships collapsed onto atomic processes only; all names are
// qualified ("Participant.Pk").
struct ReducedRelationSet {
  std::vector<std::string> atoms;  // every atomic, syntax-tree order
  std::map<std::string, std::vector<std::string>> activate;
  std::map<std::string, std::vector<std::string>> inactivate;
  std::map<std::string, std::vector<std::string>> parallel;  // member -> its join group
  std::map<std::string, std::vector<std::string>> enable;
  std::map<std::string, std::vector<std::string>> initials;  // participant -> atoms
  std::map<std::string, std::vector<std::string>> finals;    // participant -> atoms
};

RelationSet extract_relations(const csp::SyntaxTree& tree);

// Collapses composite nodes innermost-first. Throws CompileError when a
// parallel join group would mix atomics from rival exclusive branches (the
// join could then never be satisfied).
ReducedRelationSet reduce(const RelationSet& rel, const csp::SyntaxTree& tree);

std::string dump_relations(const RelationSet& rel);
std::string dump_relations(const ReducedRelationSet& red);

// Node counts before and after reduction: the unreduced count covers atomics,
// composition nodes and participant roots; the reduced count is atomics only.
std::size_t unreduced_state_count(const csp::SyntaxTree& tree);
std::size_t reduced_state_count(const ReducedRelationSet& red);

}  // namespace collabc::relations
