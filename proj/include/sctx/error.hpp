#ifndef SCTX_ERROR_HPP
#define SCTX_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sctx {

// Malformed input text (tree or token files). Carries a 1-based position.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error(what + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

// Well-formed input that breaks a structural invariant.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical failure during model fitting.
class FitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace sctx

#endif  // SCTX_ERROR_HPP
