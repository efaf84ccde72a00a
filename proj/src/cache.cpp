#include "catlab/cache.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <vector>

#include "json.hpp"

namespace catlab {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

json descriptor(const SpaceParams& p, const CatMatrix& m, std::uint64_t seed) {
  json j;
  j["version"] = kCacheVersion;
  j["N"] = p.N;
  j["kappa1"] = p.kappa1;
  j["kappa2"] = p.kappa2;
  j["map"] = {m.a, m.b, m.c, m.d};
  j["seed"] = seed;
  return j;
}

bool write_atomic(const std::filesystem::path& target, const char* data,
                  std::size_t bytes) {
  std::filesystem::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out.write(data, std::streamsize(bytes));
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      return false;
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) std::filesystem::remove(tmp, ec);
  return !ec;
}

}  // namespace

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("CATLAB_CACHE_DIR"); env && *env)
    return env;
  return ".catlab_cache";
}

std::string cache_key(const SpaceParams& p, const CatMatrix& m,
                      std::uint64_t seed) {
  std::uint64_t h = fnv1a(descriptor(p, m, seed).dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

PropagatorCache::PropagatorCache(std::filesystem::path dir)
    : dir_(dir.empty() ? default_cache_dir() : std::move(dir)) {}

std::optional<Propagator> PropagatorCache::load(const SpaceParams& p,
                                                const CatMatrix& m,
                                                std::uint64_t seed) const {
  std::string key = cache_key(p, m, seed);
  std::filesystem::path meta = dir_ / (key + ".json");
  std::filesystem::path bin = dir_ / (key + ".bin");

  json j;
  {
    std::ifstream in(meta);
    if (!in) return std::nullopt;
    try {
      in >> j;
    } catch (const json::exception&) {
      return std::nullopt;
    }
  }
  json want = descriptor(p, m, seed);
  for (auto it = want.begin(); it != want.end(); ++it)
    if (!j.contains(it.key()) || j[it.key()] != it.value())
      return std::nullopt;

  std::int64_t N = p.N;
  std::vector<double> raw(std::size_t(N) * N * 2);
  std::size_t bytes = raw.size() * sizeof(double);
  {
    std::ifstream in(bin, std::ios::binary);
    if (!in) return std::nullopt;
    in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(bytes));
    if (std::size_t(in.gcount()) != bytes) return std::nullopt;
    if (in.get() != std::ifstream::traits_type::eof()) return std::nullopt;
  }

  Propagator out;
  out.params = p;
  out.map = m;
  out.build_seed = seed;
  out.u = Mat(N, N);
  for (std::int64_t c = 0; c < N; ++c)
    for (std::int64_t r = 0; r < N; ++r) {
      std::size_t at = 2 * std::size_t(c * N + r);
      out.u(r, c) = cplx{raw[at], raw[at + 1]};
    }
  out.unitarity_residual = j.value("unitarity_residual", 0.0);
  out.egorov_residual = j.value("egorov_residual", 0.0);
  return out;
}

bool PropagatorCache::store(const Propagator& p) const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) return false;

  std::string key = cache_key(p.params, p.map, p.build_seed);
  std::filesystem::path lock = dir_ / (key + ".lock");
  int fd = ::open(lock.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) return false;  // another writer owns this key
  ::close(fd);

  bool ok = false;
  {
    std::int64_t N = p.params.N;
    std::vector<double> raw(std::size_t(N) * N * 2);
    for (std::int64_t c = 0; c < N; ++c)
      for (std::int64_t r = 0; r < N; ++r) {
        std::size_t at = 2 * std::size_t(c * N + r);
        raw[at] = p.u(r, c).real();
        raw[at + 1] = p.u(r, c).imag();
      }
    ok = write_atomic(dir_ / (key + ".bin"),
                      reinterpret_cast<const char*>(raw.data()),
                      raw.size() * sizeof(double));
    if (ok) {
      json j = descriptor(p.params, p.map, p.build_seed);
      j["unitarity_residual"] = p.unitarity_residual;
      j["egorov_residual"] = p.egorov_residual;
      std::string text = j.dump(2);
      text.push_back('\n');
      ok = write_atomic(dir_ / (key + ".json"), text.data(), text.size());
    }
  }
  std::filesystem::remove(lock, ec);
  return ok;
}

Propagator PropagatorCache::get(const SpaceParams& p, const CatMatrix& m,
                                std::uint64_t seed) const {
  if (auto hit = load(p, m, seed)) return *hit;
  Propagator built = build_propagator(p, m, seed);
  store(built);
  return built;
}

}  // namespace catlab
