#pragma once

#include <stdexcept>
#include <string>

namespace relocator {

// Exit codes used by the command-line front end.
enum class ExitCode : int { Ok = 0, Usage = 1, Integrity = 2, Internal = 3 };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept { return ExitCode::Internal; }
};

// Input does not conform to a JSON schema. `path` is a JSON pointer-ish
// location such as "$.elements[3].x".
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }
  ExitCode exit_code() const noexcept override { return ExitCode::Integrity; }

 private:
  std::string path_;
};

// Well-formed input that violates a data-model invariant.
class IntegrityError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::Integrity; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::Usage; }
};

class UsageError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::Usage; }
};

}  // namespace relocator
