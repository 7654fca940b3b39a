// tools/run_dir.hpp

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

#ifndef UTI_TOOLS_RUN_DIR_HPP_
#define UTI_TOOLS_RUN_DIR_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace uti::cli {

/// Bad flag combinations and missing inputs; the CLI exits with 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output directory of one invocation. Defaults to $UTI_DATA_DIR/<command>
/// (or ./uti-runs/<command>). An existing non-empty directory is only
/// replaced with --force, and only if it looks like an earlier run.
class RunDir {
 public:
  RunDir(const std::string &command, const std::string &out, bool force);

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

  /// Resolved configuration, written as config.json. Paths of the run
  /// directory itself are left out so reruns elsewhere compare equal.
  void WriteConfig(const nlohmann::ordered_json &config) const;

 private:
  std::filesystem::path path_;
};

}  // namespace uti::cli

#endif  // UTI_TOOLS_RUN_DIR_HPP_
