#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>
#include <vector>

#include "collabc/csp.hpp"
#include "collabc/error.hpp"
#include "doctest.h"

using namespace collabc;

namespace {

// Frozen four-party specification; the Broker line is the reference output
// the translator must hit, so it doubles as the parser fixture.
const char kBrokerSpec[] =
    "channel cMB 1;\n"
    "channel cBS 1;\n"
    "channel cBC 1;\n"
    "Manufacturer() = event_m1 -> Skip; cMB!SupplierOrder -> Skip; "
    "event_m2 -> Skip;\n"
    "Broker() = (event_e1 -> Skip; cMB?SupplierOrder -> Skip; "
    "event_e2 -> Skip); ((event_e2 -> Skip; cBS!TurnSupplierOrder -> Skip; "
    "event_e3 -> Skip) || (event_e2 -> Skip; cBC!TransportOrder -> Skip; "
    "event_e3 -> Skip));\n"
    "Supplier() = event_s1 -> Skip; cBS?TurnSupplierOrder -> Skip; "
    "event_s2 -> Skip;\n"
    "Carrier() = event_c1 -> Skip; cBC?TransportOrder -> Skip; "
    "event_c2 -> Skip;\n"
    "System() = Manufacturer() || Broker() || Supplier() || Carrier();\n";

csp::ProcessRef ev(const char* name) { return csp::p_event(name, csp::p_skip()); }

}  // namespace

TEST_CASE("tokenizer splits the concrete syntax into lexical atoms") {
  std::vector<std::string> toks = csp::tokenize_csp(
      "channel cMB 1;\nBroker() = (event_e1 -> Skip; cMB?SupplierOrder -> "
      "Skip) || P() [] Q() [*] R();");
  std::vector<std::string> expected = {
      "channel", "cMB",  "1",  ";",  "Broker", "(",  ")",    "=",  "(",
      "event_e1", "->",  "Skip", ";", "cMB",   "?",  "SupplierOrder", "->",
      "Skip",     ")",   "||",  "P",  "(",     ")",  "[]",   "Q",  "(",
      ")",        "[*]", "R",   "(",  ")",     ";"};
  CHECK(toks == expected);
}

TEST_CASE("specification parses and prints back identically") {
  csp::CspSpec spec = csp::parse_csp(kBrokerSpec);
  REQUIRE(spec.defs.size() == 4);  // System() is carried separately
  REQUIRE(spec.channels.size() == 3);
  CHECK(spec.channels[0].name == "cMB");
  CHECK(spec.channels[0].capacity == 1);
  CHECK(spec.explicit_system);
  CHECK(spec.system == std::vector<std::string>{"Manufacturer", "Broker",
                                                "Supplier", "Carrier"});
  CHECK(spec.participants() == spec.system);
  REQUIRE(spec.find("Broker") != nullptr);
  CHECK(spec.find("Nobody") == nullptr);
  CHECK(spec.find_channel("cBS") != nullptr);

  CHECK(csp::print_csp(spec) == kBrokerSpec);
  CHECK(csp::equal(spec, csp::parse_csp(csp::print_csp(spec))));
}

TEST_CASE("printer parenthesizes exactly where reparsing needs it") {
  auto seq_ab = csp::p_seq(ev("a"), ev("b"));
  struct Case {
    csp::ProcessRef p;
    const char* text;
  } cases[] = {
      {seq_ab, "a -> Skip; b -> Skip"},
      {csp::p_seq(csp::p_seq(ev("a"), ev("b")), ev("c")),
       "(a -> Skip; b -> Skip); c -> Skip"},
      {csp::p_seq(ev("a"), csp::p_seq(ev("b"), ev("c"))),
       "a -> Skip; b -> Skip; c -> Skip"},
      {csp::p_par({seq_ab, ev("c")}), "((a -> Skip; b -> Skip) || c -> Skip)"},
      {csp::p_ext_choice({ev("a"), ev("b")}), "(a -> Skip [] b -> Skip)"},
      {csp::p_event_choice({csp::p_recv("c", "m", csp::p_skip()),
                            csp::p_recv("d", "n", csp::p_skip())}),
       "(c?m -> Skip [*] d?n -> Skip)"},
      {csp::p_seq(csp::p_par({ev("a"), ev("b")}), ev("c")),
       "(a -> Skip || b -> Skip); c -> Skip"},
      {csp::p_event("x", csp::p_call("P")), "x -> P()"},
      {csp::p_send("c", "m", csp::p_recv("d", "n", csp::p_skip())),
       "c!m -> d?n -> Skip"},
  };
  for (const Case& c : cases) {
    CAPTURE(c.text);
    CHECK(csp::print_process(c.p) == c.text);
  }
}

TEST_CASE("process equality is structural") {
  CHECK(csp::equal(csp::p_seq(ev("a"), ev("b")), csp::p_seq(ev("a"), ev("b"))));
  CHECK(!csp::equal(csp::p_seq(ev("a"), ev("b")), csp::p_seq(ev("b"), ev("a"))));
  CHECK(!csp::equal(ev("a"), csp::p_send("a", "m", csp::p_skip())));

  csp::CspSpec a = csp::parse_csp(kBrokerSpec);
  csp::CspSpec b = csp::parse_csp(kBrokerSpec);
  CHECK(csp::equal(a, b));
  b.channels[0].capacity = 2;
  CHECK(!csp::equal(a, b));
}

TEST_CASE("parse rejects malformed specifications") {
  SUBCASE("undeclared channel") {
    CHECK_THROWS_WITH_AS(csp::parse_csp("P() = cXX!m -> Skip;\n"),
                         doctest::Contains("undeclared channel"), CompileError);
  }
  SUBCASE("call to undefined process") {
    CHECK_THROWS_WITH_AS(csp::parse_csp("P() = work_a -> Skip; Q();\n"),
                         doctest::Contains("undefined process"), CompileError);
  }
  SUBCASE("System must compose process calls") {
    CHECK_THROWS_WITH_AS(
        csp::parse_csp("P() = work_a -> Skip;\nSystem() = work_b -> Skip;\n"),
        doctest::Contains("parallel composition of process calls"),
        CompileError);
  }
  SUBCASE("event-based choice branch must lead with a receive") {
    CHECK_THROWS_WITH_AS(
        csp::parse_csp("channel c 1;\n"
                       "P() = work_a -> Skip [*] c?m -> Skip;\n"),
        doctest::Contains("must start with a receive"), CompileError);
  }
  SUBCASE("framing events before the deciding receive are fine") {
    CHECK_NOTHROW(csp::parse_csp(
        "channel c 1;\nchannel d 1;\n"
        "P() = (event_e1 -> Skip; c?m -> Skip; event_e2 -> Skip) [*] "
        "(event_e1 -> Skip; d?n -> Skip; event_e2 -> Skip);\n"));
  }
}

TEST_CASE("alphabet collects events, channels and message pairs") {
  csp::CspSpec spec = csp::parse_csp(kBrokerSpec);
  csp::Alphabet a = csp::alphabet(spec);
  CHECK(a.channels == std::set<std::string>{"cMB", "cBS", "cBC"});
  CHECK(a.events.count("event_e1") == 1);
  CHECK(a.events.count("event_m2") == 1);
  CHECK(a.messages.count({"cMB", "SupplierOrder"}) == 1);
  CHECK(a.messages.count({"cBC", "TransportOrder"}) == 1);
  CHECK(a.messages.size() == 3);
}

TEST_CASE("syntax tree numbers composites and atomics in one pre-order") {
  csp::CspSpec spec = csp::parse_csp(kBrokerSpec);
  csp::SyntaxTree tree = csp::syntax_tree(spec);

  // A leaf is one task's maximal prefix chain, so Manufacturer collapses to a
  // single atomic; Broker numbers the receive P1, the parallel composite P2
  // and the two sends P3/P4.
  CHECK(tree.leaves_of("Manufacturer") == std::vector<int>{tree.leaves_of("Manufacturer")[0]});
  std::vector<std::string> broker;
  for (int leaf : tree.leaves_of("Broker")) broker.push_back(tree.qualified(leaf));
  CHECK(broker == std::vector<std::string>{"Broker.P1", "Broker.P3", "Broker.P4"});

  bool saw_par = false;
  for (const csp::TreeNode& n : tree.nodes) {
    if (n.name == "P2" && n.label == "par") {
      saw_par = true;
      REQUIRE(n.children.size() == 2);
      CHECK(tree.nodes[n.children[0]].name == "P3");
      CHECK(tree.nodes[n.children[1]].name == "P4");
    }
  }
  CHECK(saw_par);

  int p1 = tree.leaves_of("Broker")[0];
  CHECK(tree[p1].atom_kind == csp::AtomKind::Recv);
  CHECK(tree[p1].channel == "cMB");
  CHECK(tree[p1].message == "SupplierOrder");
  CHECK(tree[p1].core_label == "cMB?SupplierOrder");
  int p3 = tree.leaves_of("Broker")[1];
  CHECK(tree[p3].atom_kind == csp::AtomKind::Send);
  CHECK(tree[p3].core_label == "cBS!TurnSupplierOrder");
  CHECK(tree[p3].participant == "Broker");
}

TEST_CASE("syntax tree classifies internal work and silent chunks") {
  csp::CspSpec spec = csp::parse_csp(
      "channel c 1;\n"
      "P() = event_x1 -> Skip; work_t1 -> Skip; event_x2 -> Skip;\n"
      "Q() = event_y1 -> Skip; c!m -> Skip; event_y2 -> Skip;\n"
      "R() = event_z1 -> Skip; c?m -> Skip; event_z2 -> Skip;\n");
  csp::SyntaxTree tree = csp::syntax_tree(spec);
  REQUIRE(tree.leaves_of("P").size() == 1);
  CHECK(tree[tree.leaves_of("P")[0]].atom_kind == csp::AtomKind::Internal);
  CHECK(tree[tree.leaves_of("P")[0]].core_label == "work_t1");
  CHECK(tree[tree.leaves_of("Q")[0]].atom_kind == csp::AtomKind::Send);
  CHECK(tree[tree.leaves_of("R")[0]].atom_kind == csp::AtomKind::Recv);
}
