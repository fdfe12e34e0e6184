#include "vbasim/errors.hpp"

namespace vbasim {

std::string_view to_string(ApiErrorCode code) noexcept {
  switch (code) {
    case ApiErrorCode::PackageNotFound:
      return "PackageNotFound";
    case ApiErrorCode::ComponentNotRegistered:
      return "ComponentNotRegistered";
    case ApiErrorCode::PermissionDenied:
      return "PermissionDenied";
    case ApiErrorCode::AccessDenied:
      return "AccessDenied";
    case ApiErrorCode::StaticReceiver:
      return "StaticReceiverError";
    case ApiErrorCode::UnknownReceiver:
      return "UnknownReceiverError";
    case ApiErrorCode::UnknownCommand:
      return "UnknownCommandError";
    case ApiErrorCode::UnknownStore:
      return "UnknownStore";
    case ApiErrorCode::BadArgument:
      return "BadArgument";
  }
  return "ApiError";
}

}  // namespace vbasim
