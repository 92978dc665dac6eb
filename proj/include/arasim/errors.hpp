// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace arasim {

/// Clock queried or advanced backwards in true time.
class OrderingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameter outside its allowed range.
class RangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exchange evaluated before all four timestamps are present.
class MissingTimestampError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Message field cannot be represented on the wire.
class EncodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed wire bytes; `offset` is the byte position of the problem.
class DecodeError : public std::runtime_error {
public:
    DecodeError(std::size_t offset, const std::string& what)
        : std::runtime_error("decode error at offset " + std::to_string(offset) + ": " + what),
          offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Scenario text rejected; `line` is 1-based (0 when not tied to a line).
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

/// Internal simulation invariant violated (past-scheduling and the like).
class SimError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace arasim
