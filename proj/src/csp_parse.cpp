#include <cctype>
#include <set>

#include "collabc/csp.hpp"
#include "collabc/error.hpp"

namespace collabc::csp {

namespace {

struct Tok {
  std::string text;
  bool ident = false;   // identifier or keyword
  bool number = false;
  int line = 0, col = 0;
};

std::vector<Tok> lex(const std::string& text) {
  std::vector<Tok> toks;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto bump = [&](char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') bump(text[i++]);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      bump(c);
      ++i;
      continue;
    }
    Tok t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) ||
              text[i] == '_')) {
        t.text += text[i];
        bump(text[i++]);
      }
      t.ident = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i]))) {
        t.text += text[i];
        bump(text[i++]);
      }
      t.number = true;
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      t.text = "->";
      bump(text[i++]);
      bump(text[i++]);
    } else if (c == '|' && i + 1 < text.size() && text[i + 1] == '|') {
      t.text = "||";
      bump(text[i++]);
      bump(text[i++]);
    } else if (c == '[' && i + 1 < text.size() && text[i + 1] == ']') {
      t.text = "[]";
      bump(text[i++]);
      bump(text[i++]);
    } else if (c == '[' && i + 2 < text.size() && text[i + 1] == '*' &&
               text[i + 2] == ']') {
      t.text = "[*]";
      bump(text[i++]);
      bump(text[i++]);
      bump(text[i++]);
    } else if (std::string("();=!?").find(c) != std::string::npos) {
      t.text = std::string(1, c);
      bump(text[i++]);
    } else {
      throw CompileError(std::string("unexpected character '") + c + "'", line,
                         col);
    }
    toks.push_back(std::move(t));
  }
  return toks;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  CspSpec parse() {
    CspSpec spec;
    while (pos_ < toks_.size()) {
      if (at_ident("channel") && peek(1).ident && peek(2).number) {
        next();
        Tok name = next();
        Tok cap = next();
        expect(";");
        int capacity = std::stoi(cap.text);
        if (capacity < 1)
          throw CompileError("channel capacity must be >= 1", cap.line,
                             cap.col);
        if (spec.find_channel(name.text))
          throw CompileError("duplicate channel '" + name.text + "'",
                             name.line, name.col);
        spec.channels.push_back({name.text, capacity});
        continue;
      }
      ProcessDef def = parse_definition();
      if (spec.find(def.name))
        throw CompileError("duplicate process definition '" + def.name + "'");
      spec.defs.push_back(std::move(def));
    }
    finalize(spec);
    return spec;
  }

 private:
  ProcessDef parse_definition() {
    Tok name = next();
    if (!name.ident)
      throw CompileError("expected process name, got '" + name.text + "'",
                         name.line, name.col);
    expect("(");
    expect(")");
    expect("=");
    ProcessRef body = parse_choice();
    expect(";");
    return {name.text, body};
  }

  ProcessRef parse_choice() {
    ProcessRef first = parse_seq();
    const Tok& t = peek(0);
    if (t.text != "||" && t.text != "[]" && t.text != "[*]") return first;
    std::string op = t.text;
    std::vector<ProcessRef> branches{first};
    while (peek(0).text == op) {
      next();
      branches.push_back(parse_seq());
    }
    const Tok& after = peek(0);
    if (after.text == "||" || after.text == "[]" || after.text == "[*]")
      throw CompileError(
          "mixed composition operators need parentheses ('" + op + "' vs '" +
              after.text + "')",
          after.line, after.col);
    if (op == "||") return p_par(std::move(branches));
    if (op == "[]") return p_ext_choice(std::move(branches));
    return p_event_choice(std::move(branches));
  }

  ProcessRef parse_seq() {
    ProcessRef left = parse_prefix();
    if (peek(0).text != ";" || !continues_after_semi()) return left;
    next();
    return p_seq(std::move(left), parse_seq());
  }

  // A `;` both terminates a definition and sequences processes. It sequences
  // when what follows can start a term and is not a definition head or a
  // channel declaration.
  bool continues_after_semi() const {
    const Tok& t = peek(1);
    if (t.text == "(" || (t.ident && t.text == "Skip")) return true;
    if (!t.ident) return false;
    if (t.text == "channel" && peek(2).ident && peek(3).number) return false;
    if (peek(2).text == "(" && peek(3).text == ")" && peek(4).text == "=")
      return false;  // next definition
    return true;
  }

  ProcessRef parse_prefix() {
    Tok t = next();
    if (t.text == "(") {
      ProcessRef inner = parse_choice();
      expect(")");
      return inner;
    }
    if (!t.ident)
      throw CompileError("expected process term, got '" + t.text + "'", t.line,
                         t.col);
    if (t.text == "Skip") return p_skip();
    if (peek(0).text == "!" || peek(0).text == "?") {
      bool send = next().text == "!";
      Tok msg = next();
      if (!msg.ident)
        throw CompileError("expected message name", msg.line, msg.col);
      used_channels_.insert({t.text, t.line, t.col});
      expect("->");
      ProcessRef cont = parse_prefix();
      return send ? p_send(t.text, msg.text, cont)
                  : p_recv(t.text, msg.text, cont);
    }
    if (peek(0).text == "(" && peek(1).text == ")") {
      next();
      next();
      calls_.insert({t.text, t.line, t.col});
      return p_call(t.text);
    }
    if (peek(0).text == "->") {
      next();
      return p_event(t.text, parse_prefix());
    }
    // Bare identifier: a call written without parentheses.
    calls_.insert({t.text, t.line, t.col});
    return p_call(t.text);
  }

  void finalize(CspSpec& spec) {
    for (const auto& [name, line, col] : used_channels_)
      if (!spec.find_channel(name))
        throw CompileError("undeclared channel '" + name + "'", line, col);
    // Reserved System() definition names the parallel system composition.
    for (std::size_t i = 0; i < spec.defs.size(); ++i) {
      if (spec.defs[i].name != "System") continue;
      spec.system = call_list(spec.defs[i].body);
      spec.explicit_system = true;
      spec.defs.erase(spec.defs.begin() + i);
      break;
    }
    for (const auto& [name, line, col] : calls_)
      if (name != "System" && !spec.find(name))
        throw CompileError("call to undefined process '" + name + "'", line,
                           col);
    for (const std::string& name : spec.system)
      if (!spec.find(name))
        throw CompileError("System() references undefined process '" + name +
                           "'");
    for (const ProcessDef& d : spec.defs) check_event_choices(d.body);
  }

  static std::vector<std::string> call_list(const ProcessRef& body) {
    std::vector<std::string> names;
    if (body->kind == ProcKind::Call) {
      names.push_back(body->name);
      return names;
    }
    if (body->kind != ProcKind::Par)
      throw CompileError(
          "System() must be a parallel composition of process calls");
    for (const ProcessRef& c : body->children) {
      if (c->kind != ProcKind::Call)
        throw CompileError(
            "System() must be a parallel composition of process calls");
      names.push_back(c->name);
    }
    return names;
  }

  // Every `[*]` branch must lead with a receive, reached through event
  // prefixes and sequencing only.
  void check_event_choices(const ProcessRef& p) {
    if (p->kind == ProcKind::EventChoice) {
      for (const ProcessRef& b : p->children)
        if (!recv_initial(b))
          throw CompileError(
              "event-based choice branch must start with a receive");
    }
    for (const ProcessRef& c : p->children) check_event_choices(c);
  }

  // First non-event action along the execution spine; events are framing and
  // fall through, including a sequence whose left half is all events.
  static const Process* first_action(const Process* p) {
    switch (p->kind) {
      case ProcKind::Skip: return nullptr;
      case ProcKind::Event: return first_action(p->children[0].get());
      case ProcKind::Seq: {
        if (const Process* left = first_action(p->children[0].get()))
          return left;
        return first_action(p->children[1].get());
      }
      default: return p;
    }
  }

  static bool recv_initial(const ProcessRef& p) {
    const Process* action = first_action(p.get());
    return action && action->kind == ProcKind::Recv;
  }

  struct Use {
    std::string name;
    int line, col;
    bool operator<(const Use& o) const { return name < o.name; }
  };

  const Tok& peek(std::size_t ahead) const {
    static const Tok end{};
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : end;
  }

  bool at_ident(const std::string& word) const {
    return peek(0).ident && peek(0).text == word;
  }

  Tok next() {
    if (pos_ >= toks_.size()) throw CompileError("unexpected end of input");
    return toks_[pos_++];
  }

  void expect(const std::string& text) {
    Tok t = next();
    if (t.text != text)
      throw CompileError("expected '" + text + "', got '" + t.text + "'",
                         t.line, t.col);
  }

  std::vector<Tok> toks_;
  std::size_t pos_ = 0;
  std::set<Use> used_channels_;
  std::set<Use> calls_;
};

}  // namespace

CspSpec parse_csp(const std::string& text) { return Parser(text).parse(); }

std::vector<std::string> tokenize_csp(const std::string& text) {
  std::vector<std::string> out;
  for (const Tok& t : lex(text)) out.push_back(t.text);
  return out;
}

Alphabet alphabet(const CspSpec& spec) {
  Alphabet a;
  auto walk = [&](auto&& self, const ProcessRef& p) -> void {
    switch (p->kind) {
      case ProcKind::Event:
        a.events.insert(p->name);
        break;
      case ProcKind::Send:
      case ProcKind::Recv:
        a.channels.insert(p->name);
        a.messages.insert({p->name, p->message});
        break;
      default:
        break;
    }
    for (const ProcessRef& c : p->children) self(self, c);
  };
  for (const ProcessDef& d : spec.defs) walk(walk, d.body);
  return a;
}

}  // namespace collabc::csp
