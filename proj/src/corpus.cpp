#include "collabc/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "collabc/bpmn_xml.hpp"
#include "collabc/error.hpp"

#ifndef COLLABC_CORPUS_DIR
#error "COLLABC_CORPUS_DIR must point at the corpus directory"
#endif

namespace collabc::corpus {

namespace {

constexpr std::array kCases = {
    "minimal-ping", "broker-stub", "sc-round1", "sc-round2", "bt-round1",
    "bt-round2",    "oe",          "pr",        "pc",
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CompileError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool file_exists(const std::string& path) {
  return std::ifstream(path).good();
}

// Strips a trailing comment and surrounding whitespace; returns "" for
// blank / comment-only lines.
std::string logical_line(std::string line) {
  if (auto hash = line.find('#'); hash != std::string::npos)
    line.erase(hash);
  auto begin = line.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  auto end = line.find_last_not_of(" \t\r");
  return line.substr(begin, end - begin + 1);
}

std::vector<ExpectedVerdict> parse_verdicts(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<ExpectedVerdict> out;
  std::string raw;
  while (std::getline(in, raw)) {
    std::string line = logical_line(raw);
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string property, word;
    fields >> property >> word;
    if (property.empty() || (word != "pass" && word != "fail"))
      throw CompileError("malformed verdict line '" + line + "' in " + path);
    out.push_back({property, word == "pass"});
  }
  return out;
}

std::vector<ReplayStep> parse_replay(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<ReplayStep> out;
  std::string raw;
  while (std::getline(in, raw)) {
    std::string line = logical_line(raw);
    if (line.empty()) continue;
    auto dot = line.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == line.size())
      throw CompileError("malformed replay step '" + line + "' in " + path);
    out.push_back({line.substr(0, dot), line.substr(dot + 1)});
  }
  return out;
}

}  // namespace

std::string corpus_root() { return COLLABC_CORPUS_DIR; }

std::vector<std::string> case_names() {
  return {kCases.begin(), kCases.end()};
}

CorpusCase load_case(const std::string& name) {
  if (std::find(kCases.begin(), kCases.end(), name) == kCases.end())
    throw CompileError("unknown corpus case '" + name + "'");

  CorpusCase c;
  c.name = name;
  c.dir = corpus_root() + "/" + name;
  c.model = model::parse_bnf_text(read_file(c.dir + "/model.bnf"));
  c.expected = parse_verdicts(c.dir + "/expected.verdicts");
  c.replay = parse_replay(c.dir + "/replay.trace");
  if (file_exists(c.dir + "/model.bpmn"))
    c.xml_model = bpmn::parse_bpmn_xml(read_file(c.dir + "/model.bpmn"));
  if (file_exists(c.dir + "/relations.golden"))
    c.relations_golden = read_file(c.dir + "/relations.golden");
  return c;
}

}  // namespace collabc::corpus
