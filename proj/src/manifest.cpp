#include "specshift/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "specshift/errors.hpp"

namespace specshift {

std::string fnv1a_file_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("dataset file missing: " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(hash));
  return hex;
}

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path) {
  nlohmann::json j;
  j["subcommand"] = manifest.subcommand;
  j["flags"] = manifest.flags;
  if (manifest.seed)
    j["seed"] = *manifest.seed;
  else
    j["seed"] = nullptr;
  j["input_hashes"] = manifest.input_hashes;
  j["outputs"] = manifest.outputs;
  j["version"] = manifest.version;
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace specshift
