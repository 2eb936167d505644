#include <cctype>
#include <set>
#include <vector>

#include "collabc/error.hpp"
#include "collabc/model.hpp"

namespace collabc::model {

namespace {

struct Token {
  enum Type { Ident, LParen, RParen, LBrace, RBrace, Comma, Semi, ParBar, End };
  Type type = End;
  std::string text;
  int line = 0, col = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_space();
    tok_ = {Token::End, "", line_, col_};
    if (pos_ >= text_.size()) return;
    char c = text_[pos_];
    int line = line_, col = col_;
    auto single = [&](Token::Type t) {
      consume();
      tok_ = {t, std::string(1, c), line, col};
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        word += text_[pos_];
        consume();
      }
      tok_ = {Token::Ident, word, line, col};
    } else if (c == '(') {
      single(Token::LParen);
    } else if (c == ')') {
      single(Token::RParen);
    } else if (c == '{') {
      single(Token::LBrace);
    } else if (c == '}') {
      single(Token::RBrace);
    } else if (c == ',') {
      single(Token::Comma);
    } else if (c == ';') {
      single(Token::Semi);
    } else if (c == '|' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '|') {
      consume();
      consume();
      tok_ = {Token::ParBar, "||", line, col};
    } else {
      throw CompileError(std::string("unexpected character '") + c + "'", line,
                         col);
    }
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') consume();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        consume();
      } else {
        break;
      }
    }
  }

  void consume() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

struct ChannelUse {
  std::string channel, message;
  int line, col;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  CollaborationModel parse() {
    CollaborationModel m;
    while (!at_keyword("messages")) {
      if (lex_.peek().type == Token::End)
        throw error("expected 'messages' section");
      m.pools.push_back(parse_pool());
      if (lex_.peek().type == Token::ParBar) {
        lex_.take();
        if (at_keyword("messages"))
          throw error("expected pool after '||'");
      }
    }
    expect_keyword("messages");
    expect(Token::LBrace, "'{'");
    while (lex_.peek().type != Token::RBrace) {
      if (lex_.peek().type == Token::End) throw error("unterminated message list");
      m.message_flows.push_back(parse_message());
    }
    lex_.take();
    if (lex_.peek().type != Token::End) throw error("trailing input");
    finish_checks(m);
    return m;
  }

 private:
  Pool parse_pool() {
    expect_keyword("pool");
    expect(Token::LParen, "'('");
    Token name = expect(Token::Ident, "pool name");
    if (!pool_names_.insert(name.text).second)
      throw CompileError("duplicate pool name '" + name.text + "'", name.line,
                         name.col);
    expect(Token::Comma, "','");
    Pool p;
    p.name = name.text;
    p.elements = parse_elems();
    expect(Token::RParen, "')'");
    return p;
  }

  ElementList parse_elems() {
    ElementList elems;
    elems.push_back(parse_elem());
    while (lex_.peek().type == Token::Semi) {
      lex_.take();
      elems.push_back(parse_elem());
    }
    return elems;
  }

  Element parse_elem() {
    Token kw = expect(Token::Ident, "element");
    Element e;
    e.id = "t" + std::to_string(++task_counter_);
    if (kw.text == "task") {
      e.kind = ElementKind::Task;
      expect(Token::LParen, "'('");
      e.flow_in = expect(Token::Ident, "sequence flow").text;
      expect(Token::Comma, "','");
      e.flow_out = expect(Token::Ident, "sequence flow").text;
      expect(Token::RParen, "')'");
    } else if (kw.text == "sndTask" || kw.text == "rcvTask") {
      e.kind = kw.text == "sndTask" ? ElementKind::SndTask
                                    : ElementKind::RcvTask;
      expect(Token::LParen, "'('");
      e.flow_in = expect(Token::Ident, "sequence flow").text;
      expect(Token::Comma, "','");
      expect(Token::LParen, "'('");
      Token ch = expect(Token::Ident, "channel");
      expect(Token::Comma, "','");
      Token msg = expect(Token::Ident, "message");
      expect(Token::RParen, "')'");
      expect(Token::Comma, "','");
      e.flow_out = expect(Token::Ident, "sequence flow").text;
      expect(Token::RParen, "')'");
      e.channel = ch.text;
      e.message = msg.text;
      uses_.push_back({ch.text, msg.text, ch.line, ch.col});
    } else if (kw.text == "andGate" || kw.text == "xorGate" ||
               kw.text == "eventbaseGate") {
      e.kind = kw.text == "andGate"   ? ElementKind::AndGate
               : kw.text == "xorGate" ? ElementKind::XorGate
                                      : ElementKind::EventGate;
      e.id = "g" + std::to_string(task_counter_);
      expect(Token::LParen, "'('");
      e.flow_in = expect(Token::Ident, "sequence flow").text;
      expect(Token::Comma, "','");
      expect(Token::LParen, "'('");
      for (;;) {
        expect(Token::LParen, "'(' starting a branch");
        e.branches.push_back(parse_elems());
        expect(Token::RParen, "')'");
        if (lex_.peek().type != Token::Comma) break;
        lex_.take();
      }
      expect(Token::RParen, "')'");
      expect(Token::Comma, "','");
      e.flow_out = expect(Token::Ident, "sequence flow").text;
      expect(Token::RParen, "')'");
    } else {
      throw CompileError("unknown element '" + kw.text + "'", kw.line, kw.col);
    }
    return e;
  }

  MessageFlow parse_message() {
    expect(Token::LParen, "'('");
    Token ch = expect(Token::Ident, "channel");
    expect(Token::LParen, "'('");
    Token snd = expect(Token::Ident, "sender pool");
    expect(Token::Comma, "','");
    Token rcv = expect(Token::Ident, "receiver pool");
    expect(Token::RParen, "')'");
    expect(Token::Comma, "','");
    Token msg = expect(Token::Ident, "message");
    expect(Token::RParen, "')'");
    auto pair = std::make_pair(ch.text, msg.text);
    if (!declared_.insert(pair).second)
      throw CompileError(
          "duplicate message declaration (" + ch.text + "," + msg.text + ")",
          ch.line, ch.col);
    return {ch.text, snd.text, rcv.text, msg.text};
  }

  void finish_checks(const CollaborationModel&) {
    for (const ChannelUse& u : uses_) {
      if (!declared_.count({u.channel, u.message}))
        throw CompileError("task references channel '" + u.channel +
                               "' with message '" + u.message +
                               "' not declared in the message list",
                           u.line, u.col);
    }
  }

  bool at_keyword(const std::string& word) const {
    return lex_.peek().type == Token::Ident && lex_.peek().text == word;
  }

  void expect_keyword(const std::string& word) {
    Token t = expect(Token::Ident, "'" + word + "'");
    if (t.text != word)
      throw CompileError("expected '" + word + "', got '" + t.text + "'",
                         t.line, t.col);
  }

  Token expect(Token::Type type, const std::string& what) {
    Token t = lex_.take();
    if (t.type != type)
      throw CompileError("expected " + what +
                             (t.text.empty() ? "" : ", got '" + t.text + "'"),
                         t.line, t.col);
    return t;
  }

  CompileError error(const std::string& what) const {
    return CompileError(what, lex_.peek().line, lex_.peek().col);
  }

  Lexer lex_;
  std::set<std::string> pool_names_;
  std::set<std::pair<std::string, std::string>> declared_;
  std::vector<ChannelUse> uses_;
  int task_counter_ = 0;
};

}  // namespace

CollaborationModel parse_bnf_text(const std::string& text) {
  return Parser(text).parse();
}

}  // namespace collabc::model
