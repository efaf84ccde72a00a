#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "catlab/arithmetic.hpp"
#include "catlab/bsapprox.hpp"
#include "catlab/cache.hpp"
#include "catlab/hilbert.hpp"
#include "catlab/propagator.hpp"
#include "catlab/stats.hpp"

using namespace catlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

// outputs go through temp-then-rename so an interrupted run leaves nothing
void save_text(const fs::path& path, const std::string& text) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << text;
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw CliError("cannot write " + path.string());
    }
  }
  fs::rename(tmp, path);
}

CatMatrix parse_map(const std::vector<std::int64_t>& v) {
  if (v.size() != 4) throw CliError("--map: expected four integers a,b,c,d");
  CatMatrix m{v[0], v[1], v[2], v[3]};
  if (!is_cat(m))
    throw CliError("--map: not a cat map (need det 1 and |trace| > 2)");
  return m;
}

SpaceParams parse_kappa(const std::string& s, const CatMatrix& m,
                        std::int64_t N) {
  if (s == "auto") {
    try {
      return preferred_kappa(m, N);
    } catch (const ZeroProjection&) {
      throw CliError("--kappa: no admissible half-integer choice for this map and N");
    }
  }
  double k1 = 0.0, k2 = 0.0;
  char sep = 0;
  std::istringstream in(s);
  if (!(in >> k1 >> sep >> k2) || sep != ',' || !(in >> std::ws).eof())
    throw CliError("--kappa: expected 'auto' or two reals k1,k2");
  return make_params(N, k1, k2);
}

BasisKind parse_basis(const std::string& s) {
  if (s == "generic") return BasisKind::Generic;
  if (s == "rotated") return BasisKind::Rotated;
  if (s == "hecke") return BasisKind::Hecke;
  throw CliError("--basis: expected generic, rotated, or hecke");
}

std::pair<std::int64_t, std::int64_t> parse_range(const std::string& s) {
  std::int64_t lo = 0, hi = 0;
  char sep = 0;
  std::istringstream in(s);
  if (!(in >> lo >> sep >> hi) || sep != ':' || !(in >> std::ws).eof() ||
      lo < 2 || hi < lo)
    throw CliError("--range: expected lo:hi with 2 <= lo <= hi");
  return {lo, hi};
}

json map_json(const CatMatrix& m) { return json{m.a, m.b, m.c, m.d}; }

struct Ctx {
  fs::path out = ".";
  fs::path cache_dir;  // empty: default
  bool no_cache = false;

  Propagator obtain(const SpaceParams& p, const CatMatrix& m,
                    std::uint64_t seed, bool* hit = nullptr) const {
    if (no_cache) {
      if (hit) *hit = false;
      return build_propagator(p, m, seed);
    }
    PropagatorCache cache(cache_dir);
    if (auto loaded = cache.load(p, m, seed)) {
      if (hit) *hit = true;
      return *loaded;
    }
    if (hit) *hit = false;
    Propagator built = build_propagator(p, m, seed);
    cache.store(built);
    return built;
  }
};

json run_meta(const std::string& cmd) {
  json j;
  j["version"] = kCacheVersion;
  j["command"] = cmd;
  return j;
}

void finish_meta(json& j, const fs::path& where,
                 std::chrono::steady_clock::time_point t0) {
  j["wall_clock_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  save_text(where, j.dump(2) + "\n");
}

int cmd_period(const Ctx& ctx, const std::vector<std::int64_t>& map_v,
               const std::string& range_s, double threshold) {
  auto t0 = std::chrono::steady_clock::now();
  CatMatrix m = parse_map(map_v);
  auto [lo, hi] = parse_range(range_s);
  if (threshold <= 0.0) threshold = default_short_threshold(m);

  auto rows = period_sweep(m, lo, hi, threshold);
  std::string csv = "N,period,ratio,flagged\n";
  std::printf("%8s %8s %10s %8s\n", "N", "period", "ratio", "flagged");
  std::size_t flagged = 0;
  for (const auto& r : rows) {
    csv += std::to_string(r.modulus) + "," + std::to_string(r.period) + "," +
           fmt(r.ratio) + "," + (r.short_period ? "1" : "0") + "\n";
    std::printf("%8lld %8lld %10.4f %8s\n", (long long)r.modulus,
                (long long)r.period, r.ratio, r.short_period ? "yes" : "");
    if (r.short_period) ++flagged;
  }
  save_text(ctx.out / "period.csv", csv);

  json meta = run_meta("period");
  meta["map"] = map_json(m);
  meta["range"] = {lo, hi};
  meta["threshold"] = threshold;
  meta["rows"] = rows.size();
  meta["flagged"] = flagged;
  finish_meta(meta, ctx.out / "period.json", t0);
  std::printf("%zu rows, %zu flagged (threshold %.3f)\n", rows.size(), flagged,
              threshold);
  return 0;
}

int cmd_build(const Ctx& ctx, const std::vector<std::int64_t>& map_v,
              std::int64_t N, const std::string& kappa_s, std::uint64_t seed) {
  auto t0 = std::chrono::steady_clock::now();
  CatMatrix m = parse_map(map_v);
  if (N < 2) throw CliError("--N: must be at least 2");
  SpaceParams params = parse_kappa(kappa_s, m, N);

  bool hit = false;
  Propagator prop = ctx.obtain(params, m, seed, &hit);
  std::string key = cache_key(params, m, seed);
  std::printf("N=%lld kappa=(%g,%g) seed=%llu cache=%s key=%s\n", (long long)N,
              params.kappa1, params.kappa2, (unsigned long long)seed,
              ctx.no_cache ? "off" : (hit ? "hit" : "miss"), key.c_str());
  std::printf("unitarity residual %.3e, egorov residual %.3e\n",
              prop.unitarity_residual, prop.egorov_residual);

  json meta = run_meta("build");
  meta["map"] = map_json(m);
  meta["N"] = N;
  meta["kappa"] = {params.kappa1, params.kappa2};
  meta["seed"] = seed;
  meta["cache_key"] = key;
  meta["cache_hit"] = hit;
  meta["unitarity_residual"] = prop.unitarity_residual;
  meta["egorov_residual"] = prop.egorov_residual;
  finish_meta(meta, ctx.out / ("build_" + key + ".json"), t0);
  return 0;
}

int cmd_spectrum(const Ctx& ctx, const std::vector<std::int64_t>& map_v,
                 std::int64_t N, const std::string& kappa_s,
                 std::uint64_t seed, std::uint64_t basis_seed,
                 double cluster_tol) {
  auto t0 = std::chrono::steady_clock::now();
  CatMatrix m = parse_map(map_v);
  if (N < 2) throw CliError("--N: must be at least 2");
  if (cluster_tol <= 0.0) throw CliError("--cluster-tol: must be positive");
  SpaceParams params = parse_kappa(kappa_s, m, N);

  Propagator prop = ctx.obtain(params, m, seed);
  EigenData ed = eigendecompose(prop, basis_seed, cluster_tol);

  std::vector<int> cluster_of(std::size_t(N), -1);
  std::size_t max_cluster = 0;
  for (std::size_t c = 0; c < ed.clusters.size(); ++c) {
    max_cluster = std::max(max_cluster, ed.clusters[c].size());
    for (int j : ed.clusters[c]) cluster_of[std::size_t(j)] = int(c);
  }

  std::string csv = "j,phase,cluster\n";
  for (std::int64_t j = 0; j < N; ++j)
    csv += std::to_string(j) + "," + fmt(ed.phases(j)) + "," +
           std::to_string(cluster_of[std::size_t(j)]) + "\n";
  std::string tag = std::to_string(N);
  save_text(ctx.out / ("spectrum_" + tag + ".csv"), csv);

  std::int64_t P = period(m, N);
  std::printf("N=%lld period=%lld clusters=%zu max_cluster=%zu\n",
              (long long)N, (long long)P, ed.clusters.size(), max_cluster);

  json meta = run_meta("spectrum");
  meta["map"] = map_json(m);
  meta["N"] = N;
  meta["kappa"] = {params.kappa1, params.kappa2};
  meta["seed"] = seed;
  meta["basis_seed"] = basis_seed;
  meta["cluster_tol"] = cluster_tol;
  meta["period"] = P;
  meta["cluster_count"] = ed.clusters.size();
  meta["max_cluster_size"] = max_cluster;
  finish_meta(meta, ctx.out / ("spectrum_" + tag + ".json"), t0);
  return 0;
}

void validate_p_list(const std::vector<double>& ps) {
  for (double p : ps)
    if (p != 1.0 && p != 2.0 && p != 4.0)
      throw CliError("--p: must be one of 1, 2, 4");
}

int cmd_moments(const Ctx& ctx, const std::vector<std::int64_t>& map_v,
                const std::vector<std::int64_t>& Ns, int degree,
                std::vector<double> ps, const std::string& kappa_s,
                const std::string& basis_s, std::uint64_t seed,
                const std::string& csv_name) {
  auto t0 = std::chrono::steady_clock::now();
  CatMatrix m = parse_map(map_v);
  if (Ns.empty()) throw CliError("--N: at least one modulus");
  for (std::int64_t N : Ns)
    if (N < 2) throw CliError("--N: moduli must be at least 2");
  if (degree < 1) throw CliError("--degree: must be at least 1");
  if (ps.empty()) ps = {2.0, 4.0};
  validate_p_list(ps);
  BasisKind basis = parse_basis(basis_s);

  std::string csv = "N,n1,n2,p,moment\n";
  for (std::int64_t N : Ns) {
    SpaceParams params = parse_kappa(kappa_s, m, N);
    Propagator prop = ctx.obtain(params, m, seed);
    Mat vectors = experiment_basis(prop, basis, seed);

    std::vector<TranslationIndex> modes;
    for (std::int64_t a = -degree; a <= degree; ++a)
      for (std::int64_t b = -degree; b <= degree; ++b)
        if (a != 0 || b != 0) modes.push_back({a, b});
    MatrixElementTable table = matrix_elements(params, vectors, modes);

    for (const auto& n : table.modes)
      for (double p : ps)
        csv += std::to_string(N) + "," + std::to_string(n[0]) + "," +
               std::to_string(n[1]) + "," + fmt(p) + "," +
               fmt(moment(table, n, p)) + "\n";
  }
  save_text(ctx.out / csv_name, csv);

  json meta = run_meta("moments");
  meta["map"] = map_json(m);
  meta["moduli"] = Ns;
  meta["degree"] = degree;
  meta["p"] = ps;
  meta["kappa"] = kappa_s;
  meta["basis"] = basis_s;
  meta["seed"] = seed;
  finish_meta(meta, ctx.out / (csv_name.substr(0, csv_name.size() - 4) + ".json"),
              t0);
  std::printf("moments written to %s\n", (ctx.out / csv_name).c_str());
  return 0;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("--config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CliError("--config: invalid JSON (" + std::string(e.what()) + ")");
  }
  return j;
}

template <typename T>
T config_get(const json& j, const std::string& field, const T& fallback) {
  if (!j.contains(field)) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    throw CliError("config." + field + ": wrong type");
  }
}

int cmd_qescan(const Ctx& ctx, const std::string& config_path) {
  auto t0 = std::chrono::steady_clock::now();
  json cj = load_config(config_path);

  QeConfig cfg;
  auto map_v = config_get<std::vector<std::int64_t>>(cj, "map", {2, 1, 3, 2});
  if (map_v.size() != 4) throw CliError("config.map: expected four integers");
  cfg.map = CatMatrix{map_v[0], map_v[1], map_v[2], map_v[3]};
  if (!is_cat(cfg.map)) throw CliError("config.map: not a cat map");
  cfg.moduli = config_get<std::vector<std::int64_t>>(cj, "moduli", {});
  if (cfg.moduli.empty()) throw CliError("config.moduli: at least one modulus");
  for (std::int64_t N : cfg.moduli)
    if (N < 2) throw CliError("config.moduli: values must be at least 2");
  cfg.poly_scale = config_get<bool>(cj, "poly_scale", false);
  cfg.alpha = config_get<double>(cj, "alpha", 0.2);
  if (cfg.alpha < 0.0) throw CliError("config.alpha: must be nonnegative");
  cfg.beta = config_get<double>(cj, "beta", 0.225);
  if (cfg.beta <= 0.0 || cfg.beta >= 0.25)
    throw CliError("config.beta: must sit in (0, 1/4)");
  cfg.gamma = config_get<double>(cj, "gamma", 0.0);
  if (cfg.gamma < 0.0) throw CliError("config.gamma: must be nonnegative");
  cfg.dim = config_get<int>(cj, "dim", 2);
  if (cfg.dim != 1 && cfg.dim != 2) throw CliError("config.dim: must be 1 or 2");
  cfg.p = config_get<double>(cj, "p", 2.0);
  if (cfg.p != 2.0 && cfg.p != 4.0) throw CliError("config.p: must be 2 or 4");
  cfg.grid = config_get<int>(cj, "grid", 0);
  if (cfg.grid < 0) throw CliError("config.grid: must be nonnegative");
  cfg.basis = parse_basis(config_get<std::string>(cj, "basis", "generic"));
  cfg.seed = config_get<std::uint64_t>(cj, "seed", 1);

  fs::path cache_dir = ctx.cache_dir;
  bool no_cache = ctx.no_cache;
  cfg.provider = [cache_dir, no_cache](const SpaceParams& p, const CatMatrix& m,
                                       std::uint64_t seed) {
    if (no_cache) return build_propagator(p, m, seed);
    return PropagatorCache(cache_dir).get(p, m, seed);
  };

  QeReport rep = qe_experiment(cfg);

  std::string csv =
      "N,r,degree,L,ehrenfest,period,density_plus,density_minus,"
      "bound_plus,bound_minus,max_sup\n";
  for (const auto& row : rep.rows) {
    csv += std::to_string(row.N) + "," + fmt(row.r) + "," +
           std::to_string(row.degree) + "," + fmt(row.L) + "," +
           fmt(row.ehrenfest) + "," + std::to_string(row.map_period) + "," +
           fmt(row.density[0]) + "," + fmt(row.density[1]) + "," +
           fmt(row.analytic_bound[0]) + "," + fmt(row.analytic_bound[1]) +
           "," + fmt(row.max_sup) + "\n";
    std::printf(
        "N=%lld r=%.4f D=%d L=%.4f density=(%.4f,%.4f) bound=(%.3g,%.3g)\n",
        (long long)row.N, row.r, row.degree, row.L, row.density[0],
        row.density[1], row.analytic_bound[0], row.analytic_bound[1]);
  }
  save_text(ctx.out / "qescan.csv", csv);

  json meta = run_meta("qescan");
  meta["config"] = cj;
  meta["gamma_used"] = rep.gamma_used;
  meta["non_increasing"] = rep.non_increasing;
  meta["final_density"] = rep.final_density;
  meta["alpha_thresholds"] = {
      {"log_interval", kLogAlphaInterval},   {"log_ball", kLogAlphaBall},
      {"poly_interval", kPolyAlphaInterval}, {"poly_ball", kPolyAlphaBall},
      {"hecke_interval", kHeckeAlphaInterval}, {"hecke_ball", kHeckeAlphaBall}};
  json jrows = json::array();
  for (const auto& row : rep.rows)
    jrows.push_back({{"N", row.N},
                     {"r", row.r},
                     {"degree", row.degree},
                     {"L", row.L},
                     {"ehrenfest", row.ehrenfest},
                     {"period", row.map_period},
                     {"density", {row.density[0], row.density[1]}},
                     {"analytic_bound",
                      {row.analytic_bound[0], row.analytic_bound[1]}},
                     {"max_sup", row.max_sup}});
  meta["rows"] = jrows;
  finish_meta(meta, ctx.out / "qescan.json", t0);
  std::printf("trend non-increasing: %s, final density %.4f\n",
              rep.non_increasing ? "yes" : "no", rep.final_density);
  return 0;
}

int cmd_physscan(const Ctx& ctx, const std::string& config_path) {
  auto t0 = std::chrono::steady_clock::now();
  json cj = load_config(config_path);

  auto map_v = config_get<std::vector<std::int64_t>>(cj, "map", {2, 1, 3, 2});
  if (map_v.size() != 4) throw CliError("config.map: expected four integers");
  CatMatrix m{map_v[0], map_v[1], map_v[2], map_v[3]};
  if (!is_cat(m)) throw CliError("config.map: not a cat map");
  std::int64_t N = config_get<std::int64_t>(cj, "N", 0);
  if (N < 2) throw CliError("config.N: must be at least 2");
  double r = config_get<double>(cj, "r", 0.1);
  if (r <= 0.0 || r > 0.5) throw CliError("config.r: must sit in (0, 1/2]");
  int degree = config_get<int>(cj, "degree", 0);
  if (degree < 1 || double(degree) * r < 1.0)
    throw CliError("config.degree: need degree >= 1 with degree * r >= 1");
  int q_count = config_get<int>(cj, "q_count", 64);
  if (q_count < 1) throw CliError("config.q_count: must be positive");
  std::uint64_t seed = config_get<std::uint64_t>(cj, "seed", 1);
  BasisKind basis = parse_basis(config_get<std::string>(cj, "basis", "generic"));
  std::string kappa_s = config_get<std::string>(cj, "kappa", "auto");

  SpaceParams params = parse_kappa(kappa_s, m, N);
  Propagator prop = ctx.obtain(params, m, seed);
  Mat vectors = experiment_basis(prop, basis, seed);
  SandwichPair pair = interval_pair(r, degree);

  std::vector<TranslationIndex> modes;
  for (const TrigPolynomial* b : {&pair.minorant, &pair.majorant})
    for (const auto& [n, v] : b->coeffs())
      if (n[0] != 0) modes.push_back({0, n[0]});
  MatrixElementTable table = matrix_elements(params, vectors, modes);

  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  std::string csv = "j,q,lower,mass,upper,ok\n";
  double worst_low = 0.0, worst_high = 0.0;
  bool all_ok = true;
  for (std::int64_t j = 0; j < N; ++j) {
    Vec psi = vectors.col(j);
    for (int t = 0; t < q_count; ++t) {
      double q = double(t) / q_count;
      double vals[2];
      for (int k = 0; k < 2; ++k) {
        const TrigPolynomial& b = k == 0 ? pair.minorant : pair.majorant;
        cplx acc = b.coeff0();
        for (const auto& [n, v] : b.coeffs()) {
          if (n[0] == 0) continue;
          acc += v * std::polar(1.0, -kTwoPi * n[0] * q) *
                 table.at({0, n[0]})(j);
        }
        vals[k] = acc.real();
      }
      double mass = physical_mass(params, psi, q, r);
      worst_low = std::max(worst_low, vals[0] - mass);
      worst_high = std::max(worst_high, mass - vals[1]);
      bool ok = vals[0] <= mass + 1e-10 && mass <= vals[1] + 1e-10;
      all_ok = all_ok && ok;
      csv += std::to_string(j) + "," + fmt(q) + "," + fmt(vals[0]) + "," +
             fmt(mass) + "," + fmt(vals[1]) + "," + (ok ? "1" : "0") + "\n";
    }
  }
  save_text(ctx.out / "physscan.csv", csv);

  json meta = run_meta("physscan");
  meta["config"] = cj;
  meta["kappa"] = {params.kappa1, params.kappa2};
  meta["worst_lower_slack"] = worst_low;
  meta["worst_upper_slack"] = worst_high;
  meta["all_ok"] = all_ok;
  finish_meta(meta, ctx.out / "physscan.json", t0);
  std::printf("mass sandwich %s (worst slack %.3e / %.3e)\n",
              all_ok ? "holds" : "VIOLATED", worst_low, worst_high);
  return all_ok ? 0 : 1;
}

int cmd_hecke(const Ctx& ctx, const std::vector<std::int64_t>& map_v,
              const std::vector<std::int64_t>& Ns, std::size_t cap, int degree,
              std::vector<double> ps, std::uint64_t seed) {
  auto t0 = std::chrono::steady_clock::now();
  CatMatrix m = parse_map(map_v);
  if (Ns.empty()) throw CliError("--N: at least one modulus");
  for (std::int64_t N : Ns)
    if (N < 2) throw CliError("--N: moduli must be at least 2");
  if (cap < 3) throw CliError("--cap: must be at least 3");
  if (degree < 1) throw CliError("--degree: must be at least 1");
  if (ps.empty()) ps = {2.0, 4.0};
  validate_p_list(ps);

  std::string csv = "N,n1,n2,p,moment\n";
  json per_n = json::array();
  for (std::int64_t N : Ns) {
    SpaceParams params = parse_kappa("auto", m, N);
    Propagator prop = ctx.obtain(params, m, seed);
    Mat vectors = experiment_basis(prop, BasisKind::Hecke, seed);

    std::vector<TranslationIndex> modes;
    for (std::int64_t a = -degree; a <= degree; ++a)
      for (std::int64_t b = -degree; b <= degree; ++b)
        if (a != 0 || b != 0) modes.push_back({a, b});
    MatrixElementTable table = matrix_elements(params, vectors, modes);
    for (const auto& n : table.modes)
      for (double p : ps)
        csv += std::to_string(N) + "," + std::to_string(n[0]) + "," +
               std::to_string(n[1]) + "," + fmt(p) + "," +
               fmt(moment(table, n, p)) + "\n";

    per_n.push_back({{"N", N},
                     {"commutant_size", commutant_mod(m, N, cap).size()},
                     {"kappa", {params.kappa1, params.kappa2}}});
    std::printf("N=%lld done\n", (long long)N);
  }
  save_text(ctx.out / "hecke_moments.csv", csv);

  json meta = run_meta("hecke");
  meta["map"] = map_json(m);
  meta["moduli"] = Ns;
  meta["cap"] = cap;
  meta["degree"] = degree;
  meta["p"] = ps;
  meta["seed"] = seed;
  meta["per_modulus"] = per_n;
  finish_meta(meta, ctx.out / "hecke_moments.json", t0);
  return 0;
}

int cmd_majorant_check(const Ctx& ctx, double r, int degree, int dim,
                       int grid) {
  auto t0 = std::chrono::steady_clock::now();
  if (dim != 1 && dim != 2) throw CliError("--dim: must be 1 or 2");
  if (r <= 0.0 || r > 0.5) throw CliError("--r: must sit in (0, 1/2]");
  if (degree < 1 || double(degree) * r < 1.0)
    throw CliError("--degree: need degree >= 1 with degree * r >= 1");
  if (grid < 0) throw CliError("--grid: must be nonnegative");

  SandwichPair pair = dim == 1 ? interval_pair(r, degree)
                               : ball_pair_2d(r, degree);
  CertReport rep = certify(pair, grid);
  double vol = ball_volume(dim, r);
  double err_plus = std::abs(pair.majorant.coeff0().real() - vol);
  double err_minus = std::abs(pair.minorant.coeff0().real() - vol);

  std::printf("dim=%d r=%g degree=%d grid=%d\n", dim, r, degree, rep.grid);
  std::printf("violations=%lld margin=%.3e max_imag=%.3e\n",
              (long long)rep.violations, rep.margin, rep.max_imag);
  std::printf("worst majorant slack %.3e, worst minorant slack %.3e\n",
              rep.worst_majorant, rep.worst_minorant);
  std::printf("mean errors: +%.6f / -%.6f (volume %.6f)\n", err_plus,
              err_minus, vol);

  json meta = run_meta("majorant-check");
  meta["dim"] = dim;
  meta["r"] = r;
  meta["degree"] = degree;
  meta["grid"] = rep.grid;
  meta["violations"] = rep.violations;
  meta["margin"] = rep.margin;
  meta["max_imag"] = rep.max_imag;
  meta["worst_majorant"] = rep.worst_majorant;
  meta["worst_minorant"] = rep.worst_minorant;
  meta["volume"] = vol;
  meta["mean_error"] = {err_plus, err_minus};
  meta["certified"] = pair.certified;
  finish_meta(meta, ctx.out / "majorant_check.json", t0);
  return rep.violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for quantized torus automorphisms"};
  app.require_subcommand(1);

  Ctx ctx;
  std::string out_s = ".", cache_s;
  app.add_option("--out", out_s, "output directory");
  app.add_option("--cache-dir", cache_s, "cache directory");
  app.add_flag("--no-cache", ctx.no_cache, "bypass the propagator cache");

  std::vector<std::int64_t> map_v{2, 1, 1, 1};
  std::string range_s = "2:100";
  double threshold = -1.0;
  auto* c_period = app.add_subcommand("period", "map order sweep over moduli");
  c_period->add_option("--map", map_v, "matrix entries a,b,c,d")->delimiter(',');
  c_period->add_option("--range", range_s, "modulus range lo:hi");
  c_period->add_option("--threshold", threshold, "short-period ratio flag");

  std::int64_t N = 0;
  std::string kappa_s = "auto";
  std::uint64_t seed = 1;
  auto* c_build = app.add_subcommand("build", "build and cache a propagator");
  c_build->add_option("--map", map_v, "matrix entries a,b,c,d")->delimiter(',');
  c_build->add_option("--N", N, "modulus")->required();
  c_build->add_option("--kappa", kappa_s, "auto or k1,k2");
  c_build->add_option("--seed", seed, "build seed");

  std::uint64_t basis_seed = 0;
  double cluster_tol = kDefaultClusterTol;
  auto* c_spec = app.add_subcommand("spectrum", "eigenphases and clusters");
  c_spec->add_option("--map", map_v, "matrix entries a,b,c,d")->delimiter(',');
  c_spec->add_option("--N", N, "modulus")->required();
  c_spec->add_option("--kappa", kappa_s, "auto or k1,k2");
  c_spec->add_option("--seed", seed, "build seed");
  c_spec->add_option("--basis-seed", basis_seed, "in-cluster rotation seed");
  c_spec->add_option("--cluster-tol", cluster_tol, "phase gap for clustering");

  std::vector<std::int64_t> Ns;
  int degree = 8;
  std::vector<double> ps;
  std::string basis_s = "generic";
  auto* c_mom = app.add_subcommand("moments", "matrix-element moment table");
  c_mom->add_option("--map", map_v, "matrix entries a,b,c,d")->delimiter(',');
  c_mom->add_option("--N", Ns, "moduli")->delimiter(',')->required();
  c_mom->add_option("--degree", degree, "mode box cap");
  c_mom->add_option("--p", ps, "moment exponents")->delimiter(',');
  c_mom->add_option("--kappa", kappa_s, "auto or k1,k2");
  c_mom->add_option("--basis", basis_s, "generic, rotated, or hecke");
  c_mom->add_option("--seed", seed, "build seed");

  std::string config_path;
  auto* c_qe = app.add_subcommand("qescan", "exceptional-set scaling scan");
  c_qe->add_option("--config", config_path, "JSON config file")->required();

  auto* c_phys = app.add_subcommand("physscan", "position-ball mass sandwich");
  c_phys->add_option("--config", config_path, "JSON config file")->required();

  std::vector<std::int64_t> hecke_map{5, 8, 8, 13};
  std::size_t cap = 16;
  auto* c_hecke = app.add_subcommand("hecke", "joint-basis moment table");
  c_hecke->add_option("--map", hecke_map, "matrix entries a,b,c,d")
      ->delimiter(',');
  c_hecke->add_option("--N", Ns, "moduli")->delimiter(',')->required();
  c_hecke->add_option("--cap", cap, "commutant enumeration cap");
  c_hecke->add_option("--degree", degree, "mode box cap");
  c_hecke->add_option("--p", ps, "moment exponents")->delimiter(',');
  c_hecke->add_option("--seed", seed, "build seed");

  double r = 0.1;
  int dim = 2, grid = 0;
  auto* c_maj = app.add_subcommand("majorant-check", "sandwich certification");
  c_maj->add_option("--r", r, "ball radius")->required();
  c_maj->add_option("--degree", degree, "degree bound")->required();
  c_maj->add_option("--dim", dim, "1 or 2");
  c_maj->add_option("--grid", grid, "certification grid (0: auto)");

  CLI11_PARSE(app, argc, argv);

  ctx.out = out_s;
  ctx.cache_dir = cache_s;

  try {
    if (c_period->parsed())
      return cmd_period(ctx, map_v, range_s, threshold);
    if (c_build->parsed()) return cmd_build(ctx, map_v, N, kappa_s, seed);
    if (c_spec->parsed())
      return cmd_spectrum(ctx, map_v, N, kappa_s, seed, basis_seed,
                          cluster_tol);
    if (c_mom->parsed())
      return cmd_moments(ctx, map_v, Ns, degree, ps, kappa_s, basis_s, seed,
                         "moments.csv");
    if (c_qe->parsed()) return cmd_qescan(ctx, config_path);
    if (c_phys->parsed()) return cmd_physscan(ctx, config_path);
    if (c_hecke->parsed())
      return cmd_hecke(ctx, hecke_map, Ns, cap, degree, ps, seed);
    if (c_maj->parsed()) return cmd_majorant_check(ctx, r, degree, dim, grid);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ZeroProjection& e) {
    std::fprintf(stderr, "error: kappa: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return 0;
}
