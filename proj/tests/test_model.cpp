#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "collabc/error.hpp"
#include "collabc/model.hpp"
#include "doctest.h"

using namespace collabc;

namespace {

const char kPing[] =
    "pool(A, sndTask(f1,(cAB,Ping),f2); rcvTask(f2,(cBA,Pong),f3))\n"
    "||\n"
    "pool(B, rcvTask(g1,(cAB,Ping),g2); sndTask(g2,(cBA,Pong),g3))\n"
    "messages {\n"
    "(cAB(A,B),Ping)\n"
    "(cBA(B,A),Pong)\n"
    "}\n";

int line_of(const std::string& text, CompileError* out = nullptr) {
  try {
    model::parse_bnf_text(text);
  } catch (const CompileError& e) {
    if (out) *out = e;
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("two-pool exchange parses into pools, tasks and message flows") {
  model::CollaborationModel m = model::parse_bnf_text(kPing);
  REQUIRE(m.pools.size() == 2);
  CHECK(m.pools[0].name == "A");
  CHECK(m.pools[1].name == "B");
  REQUIRE(m.pools[0].elements.size() == 2);
  const model::Element& snd = m.pools[0].elements[0];
  CHECK(snd.kind == model::ElementKind::SndTask);
  CHECK(snd.flow_in == "f1");
  CHECK(snd.flow_out == "f2");
  CHECK(snd.channel == "cAB");
  CHECK(snd.message == "Ping");
  CHECK(m.pools[0].elements[1].kind == model::ElementKind::RcvTask);
  REQUIRE(m.message_flows.size() == 2);
  CHECK(m.message_flows[0].channel == "cAB");
  CHECK(m.message_flows[0].sender == "A");
  CHECK(m.message_flows[0].receiver == "B");
  CHECK(m.message_flows[0].message == "Ping");
  CHECK(model::validate_model(m).empty());
}

TEST_CASE("gateway blocks parse as whole elements with nested branches") {
  model::CollaborationModel m = model::parse_bnf_text(
      "pool(P, rcvTask(e1,(cIN,Go),e2);"
      " andGate(e2,((task(e2,e3)),(sndTask(e2,(cOUT,Ack),e3); task(e3,e3))),e3))\n"
      "||\n"
      "pool(Q, sndTask(q1,(cIN,Go),q2); rcvTask(q2,(cOUT,Ack),q3))\n"
      "messages {\n"
      "(cIN(Q,P),Go)\n"
      "(cOUT(P,Q),Ack)\n"
      "}\n");
  REQUIRE(m.pools[0].elements.size() == 2);
  const model::Element& gate = m.pools[0].elements[1];
  CHECK(gate.kind == model::ElementKind::AndGate);
  CHECK(gate.flow_in == "e2");
  CHECK(gate.flow_out == "e3");
  REQUIRE(gate.branches.size() == 2);
  CHECK(gate.branches[0].size() == 1);
  REQUIRE(gate.branches[1].size() == 2);
  CHECK(gate.branches[1][0].kind == model::ElementKind::SndTask);
  CHECK(model::validate_model(m).empty());
}

TEST_CASE("print is canonical: reparse of printed text is structurally equal") {
  model::CollaborationModel m = model::parse_bnf_text(kPing);
  std::string text = model::print_bnf(m);
  model::CollaborationModel back = model::parse_bnf_text(text);
  CHECK(model::structurally_equal(m, back));
  CHECK(model::print_bnf(back) == text);
}

TEST_CASE("start and end events carry no textual form") {
  model::CollaborationModel m = model::parse_bnf_text(kPing);
  model::Element start;
  start.kind = model::ElementKind::StartEvent;
  start.id = "s0";
  model::Element finish;
  finish.kind = model::ElementKind::EndEvent;
  finish.id = "s1";
  m.pools[0].elements.insert(m.pools[0].elements.begin(), start);
  m.pools[0].elements.push_back(finish);

  std::string text = model::print_bnf(m);
  CHECK(text.find("startEvent") == std::string::npos);
  CHECK(text.find("endEvent") == std::string::npos);
  // The events disappear from the printed form, so the reparse has fewer
  // elements than the decorated model but matches the undecorated one.
  model::CollaborationModel back = model::parse_bnf_text(text);
  CHECK(!model::structurally_equal(m, back));
  CHECK(model::structurally_equal(model::parse_bnf_text(kPing), back));
}

TEST_CASE("structural equality ignores ids and display names") {
  model::CollaborationModel a = model::parse_bnf_text(kPing);
  model::CollaborationModel b = a;
  for (auto& p : b.pools)
    for (auto& e : p.elements) {
      e.id = "renamed_" + e.id;
      e.name = "Some Label";
    }
  CHECK(model::structurally_equal(a, b));

  SUBCASE("flow names participate") {
    b.pools[0].elements[0].flow_out = "zz";
    CHECK(!model::structurally_equal(a, b));
  }
  SUBCASE("pool names participate") {
    b.pools[0].name = "Z";
    CHECK(!model::structurally_equal(a, b));
  }
  SUBCASE("message flows compare as a multiset") {
    std::swap(b.message_flows[0], b.message_flows[1]);
    CHECK(model::structurally_equal(a, b));
    b.message_flows[0].message = "Pong2";
    CHECK(!model::structurally_equal(a, b));
  }
}

TEST_CASE("parse rejects malformed input with source positions") {
  CompileError err("");
  SUBCASE("unknown element keyword") {
    CHECK(line_of("pool(A, frobnicate(f1,f2))\nmessages {\n}\n", &err) == 1);
    CHECK(std::string(err.what()).find("unknown element") != std::string::npos);
  }
  SUBCASE("unexpected character") {
    CHECK(line_of("pool(A, task(f1,f2))\n%\nmessages {\n}\n", &err) == 2);
  }
  SUBCASE("duplicate pool name") {
    CHECK_THROWS_WITH_AS(
        model::parse_bnf_text("pool(A, task(f1,f2))\n||\npool(A, task(g1,g2))\n"
                              "messages {\n}\n"),
        doctest::Contains("duplicate pool name"), CompileError);
  }
  SUBCASE("pool after parallel bar is required") {
    CHECK_THROWS_WITH_AS(
        model::parse_bnf_text("pool(A, task(f1,f2))\n||\nmessages {\n}\n"),
        doctest::Contains("expected pool after '||'"), CompileError);
  }
  SUBCASE("unterminated message list") {
    CHECK_THROWS_WITH_AS(
        model::parse_bnf_text("pool(A, task(f1,f2))\nmessages {\n(c(A,B),M)\n"),
        doctest::Contains("unterminated message list"), CompileError);
  }
  SUBCASE("trailing input") {
    CHECK_THROWS_WITH_AS(
        model::parse_bnf_text("pool(A, task(f1,f2))\nmessages {\n}\nextra\n"),
        doctest::Contains("trailing input"), CompileError);
  }
  SUBCASE("duplicate message declaration") {
    CHECK_THROWS_WITH_AS(
        model::parse_bnf_text("pool(A, task(f1,f2))\nmessages {\n(c(A,B),M)\n"
                              "(c(A,B),M)\n}\n"),
        doctest::Contains("duplicate message declaration"), CompileError);
  }
  SUBCASE("task referencing an undeclared channel") {
    CHECK_THROWS_WITH_AS(
        model::parse_bnf_text("pool(A, sndTask(f1,(cXX,Boom),f2))\n"
                              "messages {\n}\n"),
        doctest::Contains("not declared in the message list"), CompileError);
  }
  SUBCASE("comments are skipped") {
    CHECK_NOTHROW(model::parse_bnf_text(std::string("# header\n") + kPing));
  }
}

TEST_CASE("validator reports gateway violations") {
  // The grammar happily parses a one-branch gateway; validation flags it.
  model::CollaborationModel m = model::parse_bnf_text(
      "pool(A, andGate(f1,((task(f1,f2))),f2))\nmessages {\n}\n");
  auto issues = model::validate_model(m);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].detail == "gateway needs at least 2 branches");

  SUBCASE("empty branch") {
    model::Element gate;
    gate.kind = model::ElementKind::XorGate;
    gate.id = "g1";
    gate.branches.resize(2);
    model::CollaborationModel bad;
    bad.pools.push_back({"A", {gate}});
    auto found = model::validate_model(bad);
    REQUIRE(found.size() == 2);
    CHECK(found[0].detail == "empty gateway branch");
  }
  SUBCASE("event gate branch must lead with a receive") {
    model::CollaborationModel bad = model::parse_bnf_text(
        "pool(A, eventbaseGate(f1,((task(f1,f2)),(task(f1,f2))),f2))\n"
        "messages {\n}\n");
    auto found = model::validate_model(bad);
    REQUIRE(found.size() == 2);
    CHECK(found[0].detail == "event gate branch must start with a rcvTask");
  }
}

TEST_CASE("validator reports message-flow violations") {
  SUBCASE("self-directed flow") {
    auto m = model::parse_bnf_text(
        "pool(A, sndTask(f1,(c,M),f2); rcvTask(f2,(c,M),f3))\n"
        "messages {\n(c(A,A),M)\n}\n");
    auto issues = model::validate_model(m);
    bool self_flow = false;
    for (const auto& i : issues)
      self_flow |= i.detail.find("sender and receiver are the same pool") !=
                   std::string::npos;
    CHECK(self_flow);
  }
  SUBCASE("nonexistent endpoint pools and dangling tasks") {
    auto m = model::parse_bnf_text("pool(A, task(f1,f2))\n"
                                   "messages {\n(c(A,B),M)\n}\n");
    auto issues = model::validate_model(m);
    bool missing_pool = false, dangling_snd = false, dangling_rcv = false;
    for (const auto& i : issues) {
      missing_pool |= i.detail.find("does not exist") != std::string::npos;
      dangling_snd |= i.detail.find("no sndTask for (c,M)") != std::string::npos;
      dangling_rcv |= i.detail.find("no rcvTask for (c,M)") != std::string::npos;
    }
    CHECK(missing_pool);
    CHECK(dangling_snd);
    CHECK(dangling_rcv);
  }
  SUBCASE("conflicting channel endpoints") {
    model::CollaborationModel m = model::parse_bnf_text(
        "pool(A, sndTask(f1,(c,M),f2); rcvTask(f2,(c,N),f3))\n"
        "||\n"
        "pool(B, rcvTask(g1,(c,M),g2); sndTask(g2,(c,N),g3))\n"
        "messages {\n(c(A,B),M)\n(c(B,A),N)\n}\n");
    auto issues = model::validate_model(m);
    bool conflict = false;
    for (const auto& i : issues)
      conflict |=
          i.detail.find("conflicting endpoints") != std::string::npos;
    CHECK(conflict);
  }
  SUBCASE("duplicate element ids") {
    auto m = model::parse_bnf_text("pool(A, task(f1,f2); task(f2,f3))\n"
                                   "messages {\n}\n");
    m.pools[0].elements[1].id = m.pools[0].elements[0].id;
    auto issues = model::validate_model(m);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].detail == "duplicate element id");
  }
}

TEST_CASE("element kind names cover the vocabulary") {
  CHECK(std::string(model::kind_name(model::ElementKind::SndTask)) == "sndTask");
  CHECK(std::string(model::kind_name(model::ElementKind::EventGate)) ==
        "eventbaseGate");
  CHECK(std::string(model::kind_name(model::ElementKind::StartEvent)) ==
        "startEvent");
}
