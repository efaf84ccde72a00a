#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "catlab/arithmetic.hpp"
#include "catlab/hilbert.hpp"
#include "catlab/propagator.hpp"

namespace catlab {

inline constexpr const char* kCacheVersion = "catlab-0.1.0";

// $CATLAB_CACHE_DIR, or .catlab_cache under the working directory.
std::filesystem::path default_cache_dir();

// 16 hex digits of FNV-1a over the canonical (sorted-key) build descriptor.
std::string cache_key(const SpaceParams& p, const CatMatrix& m,
                      std::uint64_t seed);

// On-disk propagator store: <key>.bin holds the matrix, <key>.json the
// descriptor and residuals.  The json is written last and acts as the
// commit marker; a missing or torn pair reads as a miss.
class PropagatorCache {
 public:
  explicit PropagatorCache(std::filesystem::path dir = {});

  const std::filesystem::path& dir() const { return dir_; }

  std::optional<Propagator> load(const SpaceParams& p, const CatMatrix& m,
                                 std::uint64_t seed) const;
  bool store(const Propagator& p) const;  // best effort; false if skipped

  // Cached build: loads on a hit, otherwise builds and stores.
  Propagator get(const SpaceParams& p, const CatMatrix& m,
                 std::uint64_t seed) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace catlab
