// tools/run_dir.cpp

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

#include "run_dir.hpp"

#include <cstdlib>

#include "uti/error.hpp"
#include "uti/text_io.hpp"

namespace uti::cli {

namespace fs = std::filesystem;

RunDir::RunDir(const std::string &command, const std::string &out, bool force) {
  if (!out.empty()) {
    path_ = out;
  } else if (const char *env = std::getenv("UTI_DATA_DIR"); env && *env) {
    path_ = fs::path(env) / command;
  } else {
    path_ = fs::path("uti-runs") / command;
  }
  if (fs::exists(path_)) {
    if (!fs::is_directory(path_)) throw InputError(path_.string() + " exists and is not a directory");
    if (!fs::is_empty(path_)) {
      if (!force) {
        throw InputError("run directory " + path_.string() +
                         " is not empty; pass --force to replace it");
      }
      if (!fs::exists(path_ / "config.json")) {
        throw InputError("refusing to replace " + path_.string() +
                         ": it has no config.json, so it is not a run directory");
      }
      fs::remove_all(path_);
    }
  }
  fs::create_directories(path_);
}

void RunDir::WriteConfig(const nlohmann::ordered_json &config) const {
  WriteTextFile(path_ / "config.json", config.dump(2) + "\n");
}

}  // namespace uti::cli
