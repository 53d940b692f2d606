#pragma once

#include <stdexcept>

namespace cbnorm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonHermitianError : Error { using Error::Error; };
struct NotPsdError : Error { using Error::Error; };
struct NotCpError : Error { using Error::Error; };
struct NotTpError : Error { using Error::Error; };
struct NotEbtError : Error { using Error::Error; };
struct BadPovmError : Error { using Error::Error; };
struct BadExponentError : Error { using Error::Error; };
struct BadNameError : Error { using Error::Error; };
struct DimMismatchError : Error { using Error::Error; };
struct NoSignChangeError : Error { using Error::Error; };

}  // namespace cbnorm
