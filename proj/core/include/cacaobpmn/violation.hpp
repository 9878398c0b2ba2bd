// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace cacaobpmn {

/// One conformance or well-formedness finding. `code` is a stable
/// machine-readable identifier; `path` is a JSON-pointer-style location
/// ("/workflow/action--.../on_completion" or "/process/flows/gen-3").
struct Violation {
  std::string code;
  std::string path;
  std::string message;

  bool operator==(const Violation&) const = default;
};

using Violations = std::vector<Violation>;

}  // namespace cacaobpmn
