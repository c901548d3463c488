// Copyright 2026 The docinspect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <iosfwd>
#include <memory>

#include "docinspect/modelclient.hpp"

namespace docinspect::cli {

// Replaces the HTTP client. With a factory set, commands that need a model
// and get neither --client nor --replay use the built-in "replay" profile.
struct Hooks {
  std::function<std::unique_ptr<client::ModelClient>(const client::ClientProfile&)> client_factory;
};

// Runs one command line. Data goes to `out` (or the --out file), diagnostics
// to `err`. Returns 0 on success, 1 on a usage or validation failure and 2
// on an I/O or model client failure. "-" as an input path reads `in`.
int dispatch(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err,
             const Hooks& hooks = {});

}  // namespace docinspect::cli
