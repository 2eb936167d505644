// Command-line driver. Each subcommand runs one stage (or the whole
// pipeline) and writes every intermediate artifact to the output directory,
// so each stage stays independently inspectable and diffable.
//
// Exit codes: 0 success, 1 verification/conformance failure (including the
// emission gate), 2 input error, 3 exploration bound exceeded.

#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "collabc/bpmn_xml.hpp"
#include "collabc/contract.hpp"
#include "collabc/csp.hpp"
#include "collabc/error.hpp"
#include "collabc/model.hpp"
#include "collabc/relations.hpp"
#include "collabc/translate.hpp"
#include "collabc/verify.hpp"

namespace fs = std::filesystem;
using collabc::CompileError;
using json = nlohmann::ordered_json;

namespace {

struct Config {
  std::string input;
  std::string format;  // bnf | xml; inferred from the extension when empty
  std::string out_dir = "out";
  std::size_t bounds_states = 1'000'000;
  std::size_t bounds_depth = 1;
  std::string report = "text";  // text | json
  bool two_call = false;
  bool unsafe_skip_verify = false;
  int capacity = 1;
  std::string trace_file;  // simulate only

  collabc::verify::Bounds bounds() const { return {bounds_states, bounds_depth}; }
};

// Every command funnels its output through one of these: human-readable
// lines as the run progresses, or a single structured document at the end.
struct Report {
  Report(const Config& cfg, const std::string& command)
      : json_mode(cfg.report != "text") {
    doc["command"] = command;
    doc["input"] = cfg.input;
    doc["artifacts"] = json::array();
  }

  bool json_mode;
  json doc;

  void line(const std::string& text) {
    if (!json_mode) std::cout << text << "\n";
  }

  int finish(int exit_code) {
    doc["exit_code"] = exit_code;
    if (json_mode) std::cout << doc.dump(2) << "\n";
    return exit_code;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CompileError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Artifact base name: the input stem, or the containing directory when the
// file follows the corpus convention of being called `model.*`.
std::string artifact_stem(const Config& cfg) {
  fs::path p(cfg.input);
  std::string stem = p.stem().string();
  if (stem == "model" && !p.parent_path().filename().empty())
    stem = p.parent_path().filename().string();
  return stem.empty() ? "model" : stem;
}

std::string contract_name(const Config& cfg) {
  std::string base = artifact_stem(cfg);
  std::string out;
  for (char ch : base)
    out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  if (out.empty()) return "Collaboration";
  if (std::isdigit(static_cast<unsigned char>(out[0]))) out = "C" + out;
  out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::string write_artifact(const Config& cfg, Report& rep,
                           const std::string& filename,
                           const std::string& content) {
  fs::create_directories(cfg.out_dir);
  fs::path path = fs::path(cfg.out_dir) / filename;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CompileError("cannot write '" + path.string() + "'");
  out << content;
  rep.doc["artifacts"].push_back(path.string());
  rep.line("wrote " + path.string());
  return path.string();
}

collabc::model::CollaborationModel load_model(const Config& cfg) {
  std::string text = read_file(cfg.input);
  std::string fmt = cfg.format;
  if (fmt.empty()) {
    std::string ext = fs::path(cfg.input).extension().string();
    fmt = (ext == ".bpmn" || ext == ".xml") ? "xml" : "bnf";
  }
  auto model = fmt == "xml" ? collabc::bpmn::parse_bpmn_xml(text)
                            : collabc::model::parse_bnf_text(text);
  if (model.pools.empty())
    throw CompileError("empty model: no pools to compose into a system");
  return model;
}

// Translates and writes the CSP# artifact shared by every downstream stage.
collabc::csp::CspSpec translate_stage(const Config& cfg, Report& rep) {
  auto model = load_model(cfg);
  auto spec = collabc::translate::translate(model, {cfg.capacity});
  write_artifact(cfg, rep, artifact_stem(cfg) + ".csp",
                 collabc::csp::print_csp(spec));
  return spec;
}

const char* result_name(collabc::verify::Verdict::Result r) {
  switch (r) {
    case collabc::verify::Verdict::Pass: return "pass";
    case collabc::verify::Verdict::Fail: return "fail";
    case collabc::verify::Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

json verdict_json(const collabc::verify::Verdict& v) {
  json out;
  out["property"] = v.property;
  out["result"] = result_name(v.result);
  out["detail"] = v.detail;
  out["states_explored"] = v.states_explored;
  out["max_depth"] = v.max_depth;
  out["truncated"] = v.truncated;
  out["counterexample"] = json::array();
  for (const auto& t : v.counterexample)
    out["counterexample"].push_back(t.participant + "\t" + t.label);
  return out;
}

int verdict_exit_code(const std::vector<collabc::verify::Verdict>& verdicts) {
  bool failed = false, inconclusive = false;
  for (const auto& v : verdicts) {
    failed |= v.result == collabc::verify::Verdict::Fail;
    inconclusive |= v.result == collabc::verify::Verdict::Inconclusive;
  }
  if (failed) return 1;
  if (inconclusive) return 3;
  return 0;
}

// Runs the checker and writes the verdict table plus one trace file per
// counterexample. Returns the exit code the verdicts dictate.
int verify_stage(const Config& cfg, Report& rep,
                 const collabc::csp::CspSpec& spec) {
  auto verdicts = collabc::verify::check_soundness(spec, cfg.bounds());
  std::string stem = artifact_stem(cfg);

  std::string table;
  rep.doc["verdicts"] = json::array();
  for (const auto& v : verdicts) {
    table += v.property + "\t" + result_name(v.result) + "\t" + v.detail + "\n";
    rep.doc["verdicts"].push_back(verdict_json(v));
    std::string note = v.property + ": " + result_name(v.result);
    if (v.result == collabc::verify::Verdict::Pass)
      note += " (" + std::to_string(v.states_explored) + " states, depth " +
              std::to_string(v.max_depth) + ")";
    else if (!v.detail.empty())
      note += " -- " + v.detail;
    rep.line(note);
    if (!v.counterexample.empty())
      write_artifact(cfg, rep, stem + "." + v.property + ".trace",
                     collabc::verify::format_trace(v.counterexample));
  }
  write_artifact(cfg, rep, stem + ".verdicts", table);
  return verdict_exit_code(verdicts);
}

struct EmitResult {
  collabc::relations::ReducedRelationSet reduced;
  collabc::contract::ContractModel contract;
};

// Relations extraction/reduction plus Solidity emission; writes both
// relation dumps and the contract source.
EmitResult emit_stage(const Config& cfg, Report& rep,
                      const collabc::csp::CspSpec& spec) {
  auto tree = collabc::csp::syntax_tree(spec);
  auto rel = collabc::relations::extract_relations(tree);
  auto red = collabc::relations::reduce(rel, tree);
  std::string stem = artifact_stem(cfg);
  write_artifact(cfg, rep, stem + ".relations",
                 collabc::relations::dump_relations(red));
  write_artifact(cfg, rep, stem + ".relations.unreduced",
                 collabc::relations::dump_relations(rel));

  auto contract = collabc::contract::build_contract_model(
      red, tree, contract_name(cfg), cfg.two_call);
  write_artifact(cfg, rep, contract.name + ".sol",
                 collabc::contract::emit_solidity(contract));
  rep.doc["contract"] = contract.name;
  rep.doc["atomics"] = contract.atomics.size();
  return {std::move(red), std::move(contract)};
}

int cmd_translate(const Config& cfg) {
  Report rep(cfg, "translate");
  translate_stage(cfg, rep);
  return rep.finish(0);
}

int cmd_verify(const Config& cfg) {
  Report rep(cfg, "verify");
  auto spec = translate_stage(cfg, rep);
  return rep.finish(verify_stage(cfg, rep, spec));
}

int cmd_emit(const Config& cfg) {
  Report rep(cfg, "emit");
  auto spec = translate_stage(cfg, rep);
  if (cfg.unsafe_skip_verify) {
    std::cerr << "warning: soundness gate skipped (--unsafe-skip-verify); "
                 "the emitted contract may deadlock or strand messages\n";
    rep.doc["verification"] = "skipped";
  } else {
    int gate = verify_stage(cfg, rep, spec);
    if (gate != 0) {
      rep.line("refusing to emit: model is not sound "
               "(use --unsafe-skip-verify to override)");
      rep.doc["refusal"] = "model is not sound";
      return rep.finish(gate);
    }
  }
  emit_stage(cfg, rep, spec);
  return rep.finish(0);
}

// Replay traces use the corpus convention: `<Participant>.<Pk>` per line,
// `#` comments and blank lines ignored.
std::vector<std::string> read_trace(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> steps;
  std::string raw;
  while (std::getline(in, raw)) {
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto begin = raw.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    auto end = raw.find_last_not_of(" \t\r");
    steps.push_back(raw.substr(begin, end - begin + 1));
  }
  return steps;
}

int cmd_simulate(const Config& cfg) {
  Report rep(cfg, "simulate");
  auto spec = translate_stage(cfg, rep);
  auto tree = collabc::csp::syntax_tree(spec);
  auto rel = collabc::relations::extract_relations(tree);
  auto red = collabc::relations::reduce(rel, tree);
  auto contract = collabc::contract::build_contract_model(
      red, tree, contract_name(cfg), cfg.two_call);

  collabc::contract::TwinSimulator sim(contract);
  std::vector<std::string> waiting;
  for (std::size_t i = 0; i < contract.atomics.size(); ++i)
    if (sim.states()[i] == collabc::contract::AtomState::Waiting)
      waiting.push_back(contract.atomics[i].id);
  std::string init = "initially waiting:";
  for (const auto& w : waiting) init += " " + w;
  rep.line(init);
  rep.doc["initially_waiting"] = waiting;

  bool all_accepted = true;
  std::string first_rejection;
  for (const auto& step : read_trace(cfg.trace_file)) {
    auto result = sim.request(step);
    if (!result.accepted && all_accepted) {
      all_accepted = false;
      first_rejection = step + ": " + result.reason;
    }
  }
  for (const auto& entry : sim.log())
    rep.line("step " + std::to_string(entry.seq) + ": " + entry.atomic + " " +
             (entry.accepted ? "accepted" : "rejected " + entry.reason));
  rep.line(std::string("final: ") + (sim.is_final() ? "yes" : "no"));

  rep.doc["steps"] = json::array();
  for (const auto& entry : sim.log()) {
    json e;
    e["seq"] = entry.seq;
    e["atomic"] = entry.atomic;
    e["accepted"] = entry.accepted;
    e["reason"] = entry.reason;
    rep.doc["steps"].push_back(e);
  }
  rep.doc["final"] = sim.is_final();
  if (!first_rejection.empty()) {
    rep.doc["first_rejection"] = first_rejection;
    rep.line("first rejection: " + first_rejection);
  }

  write_artifact(cfg, rep, artifact_stem(cfg) + ".replay", sim.render_log());
  return rep.finish(all_accepted ? 0 : 1);
}

int cmd_pipeline(const Config& cfg) {
  Report rep(cfg, "pipeline");
  auto spec = translate_stage(cfg, rep);

  int gate = 0;
  if (cfg.unsafe_skip_verify) {
    std::cerr << "warning: soundness gate skipped (--unsafe-skip-verify)\n";
    rep.doc["verification"] = "skipped";
  } else {
    gate = verify_stage(cfg, rep, spec);
    if (gate != 0) {
      rep.line("pipeline: STOP at verification");
      return rep.finish(gate);
    }
  }

  auto emitted = emit_stage(cfg, rep, spec);

  auto verdict = collabc::contract::conformance_check(spec, emitted.contract,
                                                      cfg.bounds());
  std::string conf = verdict.property + "\t" + result_name(verdict.result) +
                     "\t" + verdict.detail + "\n";
  write_artifact(cfg, rep, artifact_stem(cfg) + ".conformance", conf);
  rep.doc["conformance"] = verdict_json(verdict);
  rep.line("conformance: " + std::string(result_name(verdict.result)) +
           (verdict.detail.empty() ? "" : " -- " + verdict.detail));

  int code = verdict_exit_code({verdict});
  rep.line(code == 0 ? "pipeline: PASS" : "pipeline: FAIL at conformance");
  return rep.finish(code);
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"BPMN collaboration compiler: translates collaboration models "
               "to CSP#, verifies soundness, and emits Solidity contracts"};
  app.require_subcommand(1);

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("input", cfg.input,
                    "Collaboration model (textual format or BPMN 2.0 XML)")
        ->required();
    sub->add_option("--format", cfg.format,
                    "Input format; default chosen by file extension")
        ->check(CLI::IsMember({"bnf", "xml"}));
    sub->add_option("--out", cfg.out_dir,
                    "Directory for stage artifacts (default: out)");
    sub->add_option("--bounds-states", cfg.bounds_states,
                    "Cap on distinct global states explored");
    sub->add_option("--bounds-depth", cfg.bounds_depth,
                    "Cap on per-channel queue occupancy");
    sub->add_option("--report", cfg.report, "Report style on stdout")
        ->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--capacity", cfg.capacity,
                    "Declared capacity of every generated channel");
    sub->add_flag("--two-call", cfg.two_call,
                  "Split each task into start/complete contract calls");
    sub->add_flag("--unsafe-skip-verify", cfg.unsafe_skip_verify,
                  "Skip the soundness gate before emission (unsafe)");
  };

  auto* sub_translate =
      app.add_subcommand("translate", "Translate a model to a CSP# file");
  auto* sub_verify =
      app.add_subcommand("verify", "Check the four soundness properties");
  auto* sub_emit =
      app.add_subcommand("emit", "Generate the Solidity contract (gated on soundness)");
  auto* sub_simulate =
      app.add_subcommand("simulate", "Replay a trace against the contract twin");
  auto* sub_pipeline =
      app.add_subcommand("pipeline", "Run translate, verify, emit and conformance");
  for (auto* sub : {sub_translate, sub_verify, sub_emit, sub_simulate, sub_pipeline})
    add_common(sub);
  sub_simulate
      ->add_option("trace", cfg.trace_file,
                   "Trace file, one <Participant>.<Pk> per line")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems are input errors
  }

  try {
    if (sub_translate->parsed()) return cmd_translate(cfg);
    if (sub_verify->parsed()) return cmd_verify(cfg);
    if (sub_emit->parsed()) return cmd_emit(cfg);
    if (sub_simulate->parsed()) return cmd_simulate(cfg);
    return cmd_pipeline(cfg);
  } catch (const CompileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
