// core/src/articulation.cpp

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

#include "uti/articulation.hpp"

#include "uti/error.hpp"

namespace uti {
namespace {

constexpr std::array<std::string_view, kNumClasses> kNames = {
    "alveolar", "dental",       "labial", "labiovelar", "lateral",
    "palatal",  "postalveolar", "rhotic", "velar",
};

}  // namespace

ArticulationClass ClassFromIndex(std::size_t index) {
  if (index >= kNumClasses) {
    throw ValidationError("class index out of range: " + std::to_string(index));
  }
  return static_cast<ArticulationClass>(index);
}

std::string_view ClassName(ArticulationClass c) { return kNames[ClassIndex(c)]; }

std::optional<ArticulationClass> ParseClass(std::string_view name) {
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (kNames[i] == name) return static_cast<ArticulationClass>(i);
  }
  return std::nullopt;
}

ArticulationClass ParseClassOrThrow(std::string_view name) {
  auto c = ParseClass(name);
  if (!c) throw ValidationError("unknown articulation class '" + std::string(name) + "'");
  return *c;
}

}  // namespace uti
