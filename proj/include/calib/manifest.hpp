// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace calib {

inline constexpr std::string_view kToolkitVersion = "1.0.0";

/// Provenance block embedded in every output report. A run is reproducible
/// from its manifest: replaying command_line on the digested inputs yields
/// the same metric values.
struct RunManifest {
  std::string command_line;
  std::string method;
  std::string config_json;   ///< snapshot of the effective configuration
  std::uint64_t seed = 0;
  std::string dataset_digest;
  std::string toolkit_version{kToolkitVersion};
  std::string started_utc;
  std::string finished_utc;
};

/// FNV-1a 64-bit digest, rendered as "fnv1a64:<16 hex digits>".
std::string fnv1a64(std::string_view bytes);
std::string fnv1a64_file(const std::string& path);

/// Current time as an ISO-8601 UTC timestamp.
std::string utc_timestamp();

}  // namespace calib
