// Copyright 2026 The nestvqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nest/paths.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nest/error.hpp"

namespace nest {

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("NEST_DATA_DIR"); env != nullptr && *env) {
    return env;
  }
  return NEST_DEFAULT_DATA_DIR;
}

std::filesystem::path resolve_data_path(const std::filesystem::path& p) {
  if (p.is_absolute() || std::filesystem::exists(p)) return p;
  auto candidate = data_dir() / p;
  if (std::filesystem::exists(candidate)) return candidate;
  return p;
}

std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace nest
