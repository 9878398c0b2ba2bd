// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "cacaobpmn/bpmn/model.hpp"
#include "cacaobpmn/cacao/model.hpp"
#include "cacaobpmn/mapping/error.hpp"

namespace cacaobpmn::mapping {

enum class ImportMode {
  /// The document must carry full conversion metadata (extension
  /// attributes); anything missing or inconsistent is an error. This is
  /// the round-trip mode.
  Strict,
  /// Metadata is used where present and synthesized where absent, so
  /// hand-authored models import too. Synthesized identifiers are
  /// name-based UUIDs, which keeps repeated imports byte-identical.
  BestEffort,
};

struct ImportPolicy {
  ImportMode mode = ImportMode::Strict;
  /// Namespace UUID for synthesized identifiers.
  std::string id_synthesis_namespace = "8aa4ba33-2478-4ff1-8f61-8a74e2a714f1";
  /// Stamped as created/modified when the document carries no versioning
  /// metadata. Fixed by default so imports are reproducible.
  Timestamp clock = Timestamp::from_millis(1767225600000);
};

/// Rebuilds a playbook from a BPMN definitions document. Scope structure is
/// recovered through single-entry/single-exit region analysis; extension
/// attributes supply everything BPMN does not express. Unstructured flow
/// and (in strict mode) missing metadata throw MappingError.
cacao::Playbook map_to_cacao(const bpmn::Definitions& definitions,
                             const ImportPolicy& policy = {});

/// Name-based (SHA-1) UUID of `name` under `namespace_uuid`.
std::string uuid5(std::string_view namespace_uuid, std::string_view name);

}  // namespace cacaobpmn::mapping
