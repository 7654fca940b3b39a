// core/include/uti/error.hpp

// Copyright 2026  The uti-detect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef UTI_ERROR_HPP_
#define UTI_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace uti {

/// Base class for every error raised by the library. The kind() string is
/// stable and is what the CLI prints before the message.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string &what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string &kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define UTI_DEFINE_ERROR(Name, kind_str)                          \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string &what) : Error(kind_str, what) {} \
  };

// corpus
UTI_DEFINE_ERROR(IngestionError, "ingestion")
UTI_DEFINE_ERROR(ClassMapError, "class-map")
UTI_DEFINE_ERROR(MetadataError, "metadata")
UTI_DEFINE_ERROR(SpecError, "spec")
UTI_DEFINE_ERROR(SplitError, "split")
// features
UTI_DEFINE_ERROR(TooShortError, "too-short")
UTI_DEFINE_ERROR(ShapeError, "shape")
UTI_DEFINE_ERROR(UnsampleableError, "unsampleable")
// nnet
UTI_DEFINE_ERROR(StateError, "state")
UTI_DEFINE_ERROR(NumericError, "numeric")
UTI_DEFINE_ERROR(IncompatibleError, "incompatible")
UTI_DEFINE_ERROR(CheckpointError, "checkpoint")
// scoring / agreement / evaluation
UTI_DEFINE_ERROR(ValidationError, "validation")
UTI_DEFINE_ERROR(DegenerateDataError, "degenerate-data")
UTI_DEFINE_ERROR(InputError, "input")
// annotation service
UTI_DEFINE_ERROR(NotFoundError, "not-found")
UTI_DEFINE_ERROR(ConflictError, "conflict")
UTI_DEFINE_ERROR(RenderError, "render")

#undef UTI_DEFINE_ERROR

/// Cohen's kappa is undefined when chance agreement is 1. The flag names the
/// convention so callers can report it instead of a number.
class UndefinedKappaError : public Error {
 public:
  explicit UndefinedKappaError(const std::string &what)
      : Error("undefined-kappa", what) {}
  static constexpr const char *kFlag = "perfect-constant";
};

/// Training produced a non-finite loss. The epoch log up to the failure is
/// kept so it can be written out as a diagnostic.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string &what, std::string log_csv)
      : Error("divergence", what), log_csv_(std::move(log_csv)) {}
  const std::string &log_csv() const noexcept { return log_csv_; }

 private:
  std::string log_csv_;
};

}  // namespace uti

#endif  // UTI_ERROR_HPP_
