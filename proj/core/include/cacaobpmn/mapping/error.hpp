// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cacaobpmn::mapping {

/// A construct the converter cannot carry across (unstructured flow,
/// conflicting metadata, unsupported sharing). The message names the
/// offending element.
class MappingError : public std::runtime_error {
 public:
  explicit MappingError(const std::string& message)
      : std::runtime_error(message) {}
};

}  // namespace cacaobpmn::mapping
