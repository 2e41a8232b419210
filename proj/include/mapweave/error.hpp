#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>

namespace mapweave {

/// Base class for every recoverable pipeline error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Syntax error carrying the position that triggered it.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(message + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Raised by cooperative deadline checks inside long-running stages.
class TimeoutError : public Error {
 public:
  TimeoutError() : Error("deadline exceeded") {}
};

/// Cooperative deadline. A default-constructed deadline never expires.
class Deadline {
 public:
  Deadline() = default;

  static Deadline after(double seconds) {
    Deadline d;
    d.at_ = std::chrono::steady_clock::now() +
            std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                std::chrono::duration<double>(seconds));
    return d;
  }

  bool expired() const {
    return at_.has_value() && std::chrono::steady_clock::now() >= *at_;
  }

  void check() const {
    if (expired()) throw TimeoutError();
  }

  // Cheap per-row poll; checks the clock every 1024 calls.
  void poll(std::size_t& tick) const {
    if (at_.has_value() && (++tick & 0x3ff) == 0) check();
  }

 private:
  std::optional<std::chrono::steady_clock::time_point> at_;
};

}  // namespace mapweave
