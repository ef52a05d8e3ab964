#pragma once

#include <stdexcept>
#include <string>

namespace hyperfuse {

/// Broad failure category. The CLI maps io/format to exit code 2 and
/// domain to exit code 3.
enum class ErrorKind {
  io,      // file missing, unreadable or unwritable
  format,  // file present but malformed (garbled header, ragged CSV, ...)
  domain,  // values violate an invariant or a precondition
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(ErrorKind::format, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace hyperfuse
