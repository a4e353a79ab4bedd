#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace symfact {

// Malformed arguments: shapes, ranges, non-finite values.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Rank deficiency where a factorization needs full rank.
class SingularMatrix : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite values or a broken numeric invariant inside a solver.
class NumericFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rejected experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input file that does not parse. `line` is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(format(path, line, what)), path_(path), line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& path, std::size_t line, const std::string& what) {
        std::string msg = path;
        if (line > 0) msg += ":" + std::to_string(line);
        msg += ": " + what;
        return msg;
    }

    std::string path_;
    std::size_t line_;
};

}  // namespace symfact
