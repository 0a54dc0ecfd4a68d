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

#pragma once

#include <filesystem>
#include <string>

namespace nest {

/// Bundled data directory; NEST_DATA_DIR overrides the compiled-in default.
std::filesystem::path data_dir();

/// Absolute or existing relative paths are returned unchanged; anything else
/// is looked up under data_dir().
std::filesystem::path resolve_data_path(const std::filesystem::path& p);

std::string read_text_file(const std::filesystem::path& p);

}  // namespace nest
