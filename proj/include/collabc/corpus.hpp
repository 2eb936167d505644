#pragma once

#include <optional>
#include <string>
#include <vector>

#include "collabc/model.hpp"

namespace collabc::corpus {

// Expected outcome for one soundness property, as recorded in a case's
// expected.verdicts file: `<property> <pass|fail>` per line.
struct ExpectedVerdict {
  std::string property;
  bool pass = false;
};

// One step of a replay.trace file: the atomic to request, written
// `<Participant>.<P-number>`.
struct ReplayStep {
  std::string participant;
  std::string atomic;  // e.g. "P3"

  std::string qualified() const { return participant + "." + atomic; }
};

struct CorpusCase {
  std::string name;
  std::string dir;  // absolute directory the case was loaded from
  model::CollaborationModel model;
  std::vector<ExpectedVerdict> expected;
  std::vector<ReplayStep> replay;
  std::optional<model::CollaborationModel> xml_model;  // model.bpmn, if present
  std::optional<std::string> relations_golden;  // relations.golden, if present
};

// Names of all registered cases, in registry order.
std::vector<std::string> case_names();

// Loads `corpus/<name>/` from the source tree. Throws CompileError for an
// unknown name or an unreadable/malformed case file.
CorpusCase load_case(const std::string& name);

// Root corpus directory (compile-time constant, points into the source tree).
std::string corpus_root();

}  // namespace collabc::corpus
