#ifndef SPECSHIFT_MANIFEST_HPP
#define SPECSHIFT_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace specshift {

inline constexpr const char* kToolVersion = "specshift 0.1.0";

/// Reproducibility record written alongside every CLI output: re-running
/// the subcommand with the same flags, seed, and input files reproduces
/// the outputs bitwise.
struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> flags;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> input_hashes;  // path -> fnv1a-64 hex
  std::vector<std::string> outputs;
  std::string version = kToolVersion;
};

/// FNV-1a 64-bit hash of a file's bytes, as a 16-digit hex string.
std::string fnv1a_file_hex(const std::filesystem::path& path);

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path);

}  // namespace specshift

#endif
