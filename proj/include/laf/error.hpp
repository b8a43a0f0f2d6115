#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace laf {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownAlgebra : public Error {
public:
    explicit UnknownAlgebra(const std::string& name)
        : Error("unknown algebra '" + name + "'"), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

/// Any error tied to a position in KB source text. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column), message_(message) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

class SyntaxError : public ParseError {
public:
    using ParseError::ParseError;
};

class DuplicateId : public ParseError {
public:
    using ParseError::ParseError;
};

class ArityMismatch : public ParseError {
public:
    using ParseError::ParseError;
};

class BadValuation : public ParseError {
public:
    using ParseError::ParseError;
};

class CyclicSupport : public Error {
public:
    explicit CyclicSupport(std::vector<std::string> cycle);
    const std::vector<std::string>& cycle() const { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

class UnknownClaim : public Error {
public:
    explicit UnknownClaim(const std::string& claim)
        : Error("claim '" + claim + "' has no I-node in the graph") {}
};

class UnknownComparator : public Error {
public:
    explicit UnknownComparator(const std::string& name)
        : Error("unknown preference comparator '" + name + "'") {}
};

class OpenSystem : public Error {
public:
    using Error::Error;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

class NoObjectives : public Error {
public:
    NoObjectives() : Error("equation system has no objectives") {}
};

}  // namespace laf
