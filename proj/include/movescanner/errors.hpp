#pragma once

#include <stdexcept>
#include <string>

namespace mvsc {

enum class ErrorKind {
    Syntax,            // malformed text input
    Validation,        // well-formed input violating a module invariant
    BinaryFormat,      // malformed container bytes
    UnsupportedChain,  // recognized on-chain bytecode we do not deserialize
    Io,                // unreadable path
};

const char* error_kind_name(ErrorKind k);

// Structured parse/load failure. line/col are 1-based for text inputs and 0
// when the position is a byte offset or not applicable.
class ParseError : public std::runtime_error {
public:
    ParseError(ErrorKind kind, std::string message, int line = 0, int col = 0)
        : std::runtime_error(format(kind, message, line, col)),
          kind_(kind), message_(std::move(message)), line_(line), col_(col) {}

    ErrorKind kind() const { return kind_; }
    const std::string& message() const { return message_; }
    int line() const { return line_; }
    int col() const { return col_; }

private:
    static std::string format(ErrorKind kind, const std::string& msg,
                              int line, int col);

    ErrorKind kind_;
    std::string message_;
    int line_;
    int col_;
};

}  // namespace mvsc
