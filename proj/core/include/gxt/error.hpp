#pragma once

#include <stdexcept>
#include <string>

namespace gxt {

/// Base class for every error raised by the toolkit.
///
/// Each subclass names one failure category; the CLI maps all of them to
/// exit code 2 (data/format error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define GXT_DECLARE_ERROR(Name)                                   \
  class Name : public Error {                                     \
   public:                                                        \
    using Error::Error;                                           \
    const char* kind() const noexcept override { return #Name; }  \
  };

GXT_DECLARE_ERROR(IoError)
GXT_DECLARE_ERROR(FormatError)
GXT_DECLARE_ERROR(TruncationError)
GXT_DECLARE_ERROR(UnsupportedDatatype)
GXT_DECLARE_ERROR(ShapeError)
GXT_DECLARE_ERROR(XmlError)
GXT_DECLARE_ERROR(UnsupportedIntent)
GXT_DECLARE_ERROR(ConsistencyError)
GXT_DECLARE_ERROR(NotFound)
GXT_DECLARE_ERROR(IndexError)
GXT_DECLARE_ERROR(DomainError)
GXT_DECLARE_ERROR(DegenerateError)
GXT_DECLARE_ERROR(InternalError)

#undef GXT_DECLARE_ERROR

}  // namespace gxt
