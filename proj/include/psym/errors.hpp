#pragma once

#include <stdexcept>
#include <string>

namespace psym {

// Base for every error raised by the library. `module()` names the
// component that raised it so the CLI can report provenance.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)) {}
    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

// Division by the zero polynomial, cyclic substitution, and similar misuse
// of the symbolic kernel.
class AlgebraError : public Error {
public:
    explicit AlgebraError(const std::string& what) : Error("symkernel", what) {}
};

// Syntax and validation failures in model text.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column, std::string token)
        : Error("modelspec", format(what, line, column)),
          line_(line), column_(column), token_(std::move(token)) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& token() const noexcept { return token_; }

private:
    static std::string format(const std::string& what, int line, int column) {
        if (line <= 0) return what;
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
    }
    int line_;
    int column_;
    std::string token_;
};

// Failures of the analysis pipeline proper (no-information outputs,
// degenerate sampling, flow singularities, blow-up).
class PipelineError : public Error {
public:
    using Error::Error;
};

}  // namespace psym
