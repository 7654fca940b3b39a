// core/include/uti/articulation.hpp

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

#ifndef UTI_ARTICULATION_HPP_
#define UTI_ARTICULATION_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace uti {

/// Place of articulation. Enumerators are in alphabetical order and the
/// underlying values are the class indices used by the classifier output.
enum class ArticulationClass : std::uint8_t {
  kAlveolar = 0,
  kDental,
  kLabial,
  kLabiovelar,
  kLateral,
  kPalatal,
  kPostalveolar,
  kRhotic,
  kVelar,
};

inline constexpr std::size_t kNumClasses = 9;

inline constexpr std::array<ArticulationClass, kNumClasses> kAllClasses = {
    ArticulationClass::kAlveolar,     ArticulationClass::kDental,
    ArticulationClass::kLabial,       ArticulationClass::kLabiovelar,
    ArticulationClass::kLateral,      ArticulationClass::kPalatal,
    ArticulationClass::kPostalveolar, ArticulationClass::kRhotic,
    ArticulationClass::kVelar,
};

constexpr std::size_t ClassIndex(ArticulationClass c) {
  return static_cast<std::size_t>(c);
}

ArticulationClass ClassFromIndex(std::size_t index);

/// Lower-case name, e.g. "velar".
std::string_view ClassName(ArticulationClass c);

/// Inverse of ClassName; nullopt on unknown names.
std::optional<ArticulationClass> ParseClass(std::string_view name);

/// Like ParseClass but throws ValidationError naming the input.
ArticulationClass ParseClassOrThrow(std::string_view name);

}  // namespace uti

#endif  // UTI_ARTICULATION_HPP_
