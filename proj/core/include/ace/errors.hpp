// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ace {

/// Root of every exception thrown by ace_core.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates an operation's precondition
/// (blank question, empty vote list, top_k == 0, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A line-delimited input record could not be parsed or lacks a required field.
class MalformedRecordError : public Error {
public:
  MalformedRecordError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class DuplicateIdError : public Error {
public:
  explicit DuplicateIdError(std::string id)
      : Error("duplicate doc_id '" + id + "'"), id_(std::move(id)) {}

  const std::string& id() const noexcept { return id_; }

private:
  std::string id_;
};

/// Transport failure after retries, or a non-success provider status.
class BackendError : public Error {
public:
  explicit BackendError(const std::string& what, int status = 0)
      : Error(what), status_(status) {}

  /// HTTP status if one was received, 0 for transport-level failures.
  int status() const noexcept { return status_; }

private:
  int status_;
};

/// A model produced blank text where content is required.
class EmptyOutputError : public Error {
public:
  using Error::Error;
};

/// Persisted index or trace data is unreadable or inconsistent.
class FormatError : public Error {
public:
  using Error::Error;
};

}  // namespace ace
