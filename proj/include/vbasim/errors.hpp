#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace vbasim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Manifest document does not follow the fixture schema. The message always
// names the offending field path (e.g. "components.services[1].name").
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class DuplicateComponentError : public Error {
 public:
  using Error::Error;
};

class MultipleLauncherError : public Error {
 public:
  using Error::Error;
};

class NoLauncherError : public Error {
 public:
  using Error::Error;
};

class AlreadyInstalledError : public Error {
 public:
  using Error::Error;
};

class UnknownPackageError : public Error {
 public:
  using Error::Error;
};

class UnknownProcessError : public Error {
 public:
  using Error::Error;
};

class AlreadyLoadedError : public Error {
 public:
  using Error::Error;
};

class CatalogFetchError : public Error {
 public:
  using Error::Error;
};

class InsufficientWarmupError : public Error {
 public:
  using Error::Error;
};

// A customization output broke one of its laws.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

enum class ApiErrorCode {
  PackageNotFound,
  ComponentNotRegistered,
  PermissionDenied,
  AccessDenied,
  StaticReceiver,
  UnknownReceiver,
  UnknownCommand,
  UnknownStore,
  BadArgument,
};

std::string_view to_string(ApiErrorCode code) noexcept;

// Failure returned by the simulated system API surface (or synthesized by a
// hook sitting in front of it).
class ApiError : public Error {
 public:
  ApiError(ApiErrorCode code, const std::string& detail)
      : Error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

  ApiErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ApiErrorCode code_;
  std::string detail_;
};

}  // namespace vbasim
