#pragma once

#include <stdexcept>
#include <string>

namespace collabc {

// Thrown by parsers and front-end stages. line/column are 1-based and 0 when
// the error is not tied to a source position.
class CompileError : public std::runtime_error {
 public:
  CompileError(std::string what, int line = 0, int column = 0)
      : std::runtime_error(format(what, line, column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + what;
  }

  int line_;
  int column_;
};

}  // namespace collabc
