// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace cacaobpmn {

/// RFC 3339 UTC timestamp held at millisecond precision, the resolution
/// CACAO documents use on the wire ("2024-01-06T12:30:00.000Z").
class Timestamp {
 public:
  Timestamp() = default;

  static Timestamp from_millis(std::int64_t millis_since_epoch) {
    Timestamp t;
    t.millis_ = millis_since_epoch;
    return t;
  }

  /// Parses "YYYY-MM-DDTHH:MM:SS[.fraction]Z". Fractions beyond three
  /// digits are truncated. Throws std::invalid_argument on malformed input.
  static Timestamp parse(std::string_view text);

  std::int64_t millis() const { return millis_; }

  /// Always emits exactly three fractional digits and the 'Z' designator.
  std::string to_rfc3339() const;

  auto operator<=>(const Timestamp&) const = default;

 private:
  std::int64_t millis_ = 0;
};

}  // namespace cacaobpmn
