#pragma once

#include <cstdint>
#include <string>

#include "torusns/field.hpp"
#include "torusns/scheme.hpp"

namespace torusns {

/// Binary field container: fixed little-endian header
///   magic "TORUSFLD" (8 bytes), version u32, d u32, n u32, rank u32,
///   time f64, delta f64,
/// then the row-major float64 samples (component-major), then a u64
/// FNV-1a checksum of header plus payload.
inline constexpr std::uint32_t kFieldFileVersion = 1;

struct LoadedField {
  TorusField field;
  double time = 0.0;
  double delta = 0.0;
};

void save_field(const std::string& path, const TorusField& field, double time = 0.0,
                double delta = 0.0);
LoadedField load_field(const std::string& path);

/// FNV-1a 64-bit.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Stage checkpoints: one file per (delta, k) holding the half-step density
/// series and the full-step velocity series, keyed by a hash of the
/// canonical config so stale checkpoints are never resumed.
class FileStageCache final : public StageCache {
 public:
  FileStageCache(std::string directory, std::uint64_t config_hash);

  std::optional<StagePair> load(int delta_index, int k) override;
  void store(int delta_index, int k, const StagePair& stage) override;

 private:
  std::string path_for(int delta_index, int k) const;
  std::string dir_;
  std::uint64_t config_hash_;
};

}  // namespace torusns
