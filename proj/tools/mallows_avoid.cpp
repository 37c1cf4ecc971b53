// mallows_avoid: sampling, limit curves, partition tables, comparison and
// self-validation for Mallows permutations avoiding a pattern of length 3.
//
// Exit codes: 0 ok, 1 validation failure, 2 usage, 3 I/O.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mallows/mallows.hpp"

#ifndef MALLOWS_AVOID_VERSION
#define MALLOWS_AVOID_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mallows;

namespace {

constexpr const char* kVersion = MALLOWS_AVOID_VERSION;
constexpr const char* kGenerator = "mt19937_64 seeded by seed_seq(seed lo, seed hi, stream lo, stream hi)";

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string sidecar(const std::string& out, const char* ext) { return fs::path(out).replace_extension(ext).string(); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f.flush()) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_json(const std::string& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

const std::vector<std::string> kPatternNames{"123", "132", "213", "231", "312", "321"};

// ---------------------------------------------------------------------------
// sample

struct SampleArgs {
  std::string pattern;
  int n = 0;
  double beta = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t thin = 0;
  std::string init = "min";
  bool coupling_check = false;
  std::string out;
};

int cmd_sample(const SampleArgs& a) {
  RunConfig cfg;
  cfg.pattern = parse_pattern(a.pattern);
  cfg.n = a.n;
  cfg.beta = a.beta;
  cfg.steps = a.steps;
  cfg.seed = a.seed;
  cfg.thin = a.thin;
  cfg.init = parse_init(a.init);
  cfg.coupling_check = a.coupling_check;
  cfg.validate();

  std::ofstream samples;
  SampleSink sink;
  const std::string samples_path = sidecar(a.out, ".samples.csv");
  if (cfg.thin > 0) {
    samples.open(samples_path, std::ios::binary);
    if (!samples) throw IoError("cannot open '" + samples_path + "' for writing");
    samples << "step,permutation\n";
    sink = [&samples](std::uint64_t step, const Permutation& p) {
      samples << step << ',' << format_permutation(p) << '\n';
    };
  }
  const RunResult r = run_chain(cfg, sink);
  if (samples.is_open() && !samples.flush()) throw IoError("write to '" + samples_path + "' failed");

  write_file(a.out, permutation_csv(r.final_permutation));
  json outputs = json::array({a.out});
  if (cfg.thin > 0) outputs.push_back(samples_path);

  json meta;
  meta["subcommand"] = "sample";
  meta["version"] = kVersion;
  meta["generator"] = kGenerator;
  meta["pattern"] = a.pattern;
  meta["n"] = a.n;
  meta["beta"] = a.beta;
  meta["steps"] = a.steps;
  meta["seed"] = a.seed;
  meta["thin"] = a.thin;
  meta["init"] = a.init;
  meta["coupling-check"] = a.coupling_check;
  meta["out"] = a.out;
  meta["canonical_pattern"] = to_string(canonical(cfg.pattern));
  meta["chain_beta"] = cfg.effective_beta();
  meta["accepted"] = r.accepted;
  meta["accept_rate"] = r.accept_rate;
  meta["final_inv"] = r.final_inv;
  if (cfg.coupling_check) {
    const std::string cpath = sidecar(a.out, ".coupling.csv");
    std::string csv = "step,sup_distance\n";
    for (const auto& c : r.coupling) csv += std::to_string(c.step) + ',' + fmt17(c.sup_distance) + '\n';
    write_file(cpath, csv);
    outputs.push_back(cpath);
    meta["coupling"] = "chains from min and max share the proposal index and the acceptance uniform";
    meta["final_sup_distance"] = r.coupling.back().sup_distance;
  }
  meta["wall_time"] = r.wall_time;
  meta["outputs"] = outputs;
  write_json(sidecar(a.out, ".meta.json"), meta);

  std::cout << "final_inv " << r.final_inv << "  accept_rate " << fmt17(r.accept_rate) << "  wall_time "
            << r.wall_time << " s\n";
  return 0;
}

// ---------------------------------------------------------------------------
// limit

struct LimitArgs {
  std::string pattern;
  double beta = 0.0;
  int grid = 1000;
  std::string out;
};

// Maps a point of the canonical limit to the limit for alpha.
std::pair<double, double> to_alpha(Pattern3 alpha, double x, double y) {
  switch (symmetry_of(alpha)) {
    case Symmetry::reverse: return {1.0 - x, y};
    case Symmetry::complement: return {x, 1.0 - y};
    case Symmetry::reverse_complement: return {1.0 - x, 1.0 - y};
    case Symmetry::identity: break;
  }
  return {x, y};
}

int cmd_limit(const LimitArgs& a) {
  const Pattern3 alpha = parse_pattern(a.pattern);
  const Pattern3 c = canonical(alpha);
  const double b = flips_inversions(alpha) ? -a.beta : a.beta;
  const int m = a.grid;

  // f for alpha: the canonical curve pushed through the symmetry.
  auto f_alpha = [&](double x) {
    const double cx = to_alpha(alpha, x, 0.0).first;
    return to_alpha(alpha, cx, limit_rlm_curve(c, b, cx)).second;
  };

  std::string curve = "x,f,phi\n", density = "x,rho1,rho2\n";
  for (int k = 0; k <= m; ++k) {
    const double x = static_cast<double>(k) / m;
    double f = f_alpha(x);
    if (k == 0 || k == m) f = std::round(f);
    double phi, r1, r2;
    if (c == Pattern3::p231) {
      phi = closed::excursion_231(b, x);
      const double d = closed::rlm_curve_231_derivative(b, x);
      r1 = std::min(1.0, d);
      r2 = x < closed::x_star(b) ? std::max(0.0, 1.0 - d) : 0.0;
    } else {
      phi = closed::cdf2_321(b, x) - closed::cdf1_321(b, x);
      std::tie(r1, r2) = closed::density_pair_321(b, x);
    }
    curve += fmt17(x) + ',' + fmt17(f) + ',' + fmt17(phi) + '\n';
    density += fmt17(x) + ',' + fmt17(r1) + ',' + fmt17(r2) + '\n';
  }
  write_file(a.out, curve);
  const std::string dpath = sidecar(a.out, ".density.csv");
  write_file(dpath, density);

  const CurvePermuton mu = limit_permuton(c, b);
  json comps = json::array();
  for (std::size_t k = 0; k < mu.components().size(); ++k) {
    const char* kind = "graph";
    if (mu.components()[k].kind == CurveKind::transpose) kind = "transpose";
    if (mu.components()[k].kind == CurveKind::antidiagonal) kind = "antidiagonal";
    comps.push_back({{"kind", kind}, {"mass", mu.component_mass(k)}});
  }
  json meta;
  meta["subcommand"] = "limit";
  meta["version"] = kVersion;
  meta["pattern"] = a.pattern;
  meta["beta"] = a.beta;
  meta["grid"] = a.grid;
  meta["out"] = a.out;
  meta["canonical_pattern"] = to_string(c);
  meta["canonical_beta"] = b;
  meta["coordinates"] = "f in the coordinates of the pattern; phi, rho1, rho2 in those of the canonical pattern";
  meta["x_star"] = (c == Pattern3::p231 && b > 0) ? json(closed::x_star(b)) : json(nullptr);
  meta["components"] = comps;
  meta["total_mass"] = mu.total_mass();
  meta["outputs"] = json::array({a.out, dpath});
  write_json(sidecar(a.out, ".meta.json"), meta);
  std::cout << "total mass " << fmt17(mu.total_mass()) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// partition

struct PartitionArgs {
  std::string pattern;
  double beta = 0.0;
  std::vector<int> ns;
  int n_max = 0;
  bool exact = false;
  std::string out;
};

int cmd_partition(const PartitionArgs& a) {
  const Pattern3 alpha = parse_pattern(a.pattern);
  std::vector<int> ns = a.ns;
  if (ns.empty()) {
    const int top = a.n_max > 0 ? a.n_max : 1024;
    for (int n = 1; n <= top; n *= 2) ns.push_back(n);
    if (ns.back() != top) ns.push_back(top);
  }
  for (int n : ns)
    if (n < 1) throw std::invalid_argument("n must be positive");
  const auto table = partition_convergence(alpha, a.beta, ns);

  std::string csv = "n,log_z_over_n,limit,residual\n";
  for (const auto& r : table.rows)
    csv += std::to_string(r.n) + ',' + fmt17(r.log_z_over_n) + ',' + fmt17(r.limit) + ',' + fmt17(r.residual) + '\n';
  write_file(a.out, csv);
  json outputs = json::array({a.out});

  if (a.exact) {
    std::string poly = "n,k,coeff\n";
    for (int n : ns) {
      if (n > kMaxExactN) continue;
      const auto p = partition_poly(alpha, n);
      for (std::size_t k = 0; k < p.coeffs.size(); ++k)
        poly += std::to_string(n) + ',' + std::to_string(k) + ',' + p.coeffs[k].str() + '\n';
    }
    const std::string ppath = sidecar(a.out, ".poly.csv");
    write_file(ppath, poly);
    outputs.push_back(ppath);
  }

  json meta;
  meta["subcommand"] = "partition";
  meta["version"] = kVersion;
  meta["pattern"] = a.pattern;
  meta["beta"] = a.beta;
  meta["ns"] = ns;
  meta["exact"] = a.exact;
  meta["out"] = a.out;
  meta["residuals_strictly_decreasing"] = table.residuals_strictly_decreasing();
  meta["outputs"] = outputs;
  write_json(sidecar(a.out, ".meta.json"), meta);
  std::cout << "limit " << fmt17(table.rows.front().limit) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::string input;
  std::string pattern;
  double beta = 0.0;
  int grid = 256;
  std::string out;
};

int cmd_compare(const CompareArgs& a) {
  const Pattern3 alpha = parse_pattern(a.pattern);
  const Permutation p = parse_permutation_text(read_file(a.input));
  if (!avoids(alpha, p)) throw std::invalid_argument("input permutation contains " + a.pattern);
  const Pattern3 c = canonical(alpha);
  const double b = flips_inversions(alpha) ? -a.beta : a.beta;
  const Permutation s = symmetry_apply(alpha, p);
  const int n = s.size();

  json rep;
  rep["subcommand"] = "compare";
  rep["version"] = kVersion;
  rep["input"] = a.input;
  rep["pattern"] = a.pattern;
  rep["beta"] = a.beta;
  rep["grid"] = a.grid;
  rep["out"] = a.out;
  rep["n"] = n;
  rep["canonical_pattern"] = to_string(c);
  rep["canonical_beta"] = b;

  CellVariant variant;
  if (c == Pattern3::p231) {
    const Excursion emp = empirical_excursion(s);
    const Excursion lim = Excursion::sample([b](double t) { return closed::excursion_231(b, t); }, std::max(2 * n, 4096));
    rep["statistic"] = "excursion";
    rep["excursion_distance"] = kolmogorov_distance(emp, lim);
    variant = CellVariant::antidiag;
  } else {
    const MeasurePairD emp = empirical_measure_pair(s);
    const double d1 = kolmogorov_distance(emp.first(), [b](double x) { return closed::cdf1_321(b, x); });
    const double d2 = kolmogorov_distance(emp.second(), [b](double x) { return closed::cdf2_321(b, x); });
    rep["statistic"] = "measure_pair";
    rep["pair_distance"] = std::max(d1, d2);
    rep["position_distance"] = d1;
    rep["value_distance"] = d2;
    variant = CellVariant::diag;
  }
  const double gd = kolmogorov_distance(permuton_of_perm(s, variant, a.grid), limit_permuton(c, b).to_grid(a.grid));
  rep["grid_distance"] = gd;

  if (!a.out.empty()) write_json(a.out, rep);
  std::cout << rep.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// validate

struct ValidateArgs {
  int n_max = 8;
  std::string out;
};

int cmd_validate(const ValidateArgs& a) {
  const ValidationReport rep = validate_all(a.n_max);
  json suites = json::array();
  for (const auto& s : rep.suites) {
    json j{{"suite", s.suite}, {"n", s.n}, {"cases", s.cases}, {"failures", s.failures},
           {"first_counterexample", s.first_counterexample}};
    if (!s.note.empty()) j["note"] = s.note;
    suites.push_back(j);
    if (s.failures) std::cout << "FAIL " << s.suite << " n=" << s.n << ": " << s.first_counterexample << '\n';
  }
  if (!a.out.empty()) write_json(a.out, suites);
  std::cout << rep.suites.size() << " suite runs, " << rep.failures() << " failures, " << rep.seconds << " s\n";
  return rep.ok() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// config overlay: a flat JSON object whose keys are long flag names. Keys
// that are not flags of the chosen subcommand are ignored; flags given on the
// command line win.

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return fmt17(v.get<double>());
  return v.dump();
}

std::vector<std::string> overlay_config(CLI::App& app, std::vector<std::string> args) {
  std::string config;
  std::size_t at = args.size();
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      config = args[k + 1];
      at = k;
    } else if (args[k].rfind("--config=", 0) == 0) {
      config = args[k].substr(9);
      at = k;
    }
  }
  if (config.empty() || args.empty()) return args;
  CLI::App* sub = nullptr;
  for (auto* s : app.get_subcommands({}))
    if (s->get_name() == args[0]) sub = s;
  if (!sub) return args;

  json j;
  try {
    j = json::parse(read_file(config));
  } catch (const json::exception& e) {
    throw CLI::ValidationError("--config", std::string("not a JSON object: ") + e.what());
  }
  if (!j.is_object()) throw CLI::ValidationError("--config", "not a JSON object");

  auto given = [&](const std::string& flag) {
    for (std::size_t k = 1; k < args.size(); ++k)
      if (k != at && (args[k] == flag || args[k].rfind(flag + "=", 0) == 0)) return true;
    return false;
  };

  std::vector<std::string> extra;
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (key == "config" || !sub->get_option_no_throw(flag) || given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
    } else if (value.is_array()) {
      if (value.empty()) continue;
      extra.push_back(flag);
      for (const auto& e : value) extra.push_back(json_scalar(e));
    } else if (!value.is_null()) {
      extra.push_back(flag);
      extra.push_back(json_scalar(value));
    }
  }
  args.insert(args.begin() + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mallows permutations avoiding a pattern of length 3"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config;
  auto add_config = [&config](CLI::App* s) {
    s->add_option("--config", config, "JSON file of flag values (flags on the command line win)");
  };

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "run the Metropolis chain and write the final permutation");
  sample->add_option("--pattern", sa.pattern)->required()->check(CLI::IsMember(kPatternNames));
  sample->add_option("--n", sa.n)->required()->check(CLI::PositiveNumber);
  sample->add_option("--beta", sa.beta)->required();
  sample->add_option("--steps", sa.steps)->required();
  sample->add_option("--seed", sa.seed)->required();
  sample->add_option("--thin", sa.thin, "record every THIN steps (0: final state only)");
  sample->add_option("--init", sa.init)->check(CLI::IsMember({"min", "max", "alt"}));
  sample->add_flag("--coupling-check", sa.coupling_check, "also run the two-extremes coupling");
  sample->add_option("--out", sa.out, "permutation CSV; metadata goes next to it")->required();
  add_config(sample);

  LimitArgs la;
  auto* limit = app.add_subcommand("limit", "tabulate the limit curve and densities");
  limit->add_option("--pattern", la.pattern)->required()->check(CLI::IsMember(kPatternNames));
  limit->add_option("--beta", la.beta)->required();
  limit->add_option("--grid", la.grid)->check(CLI::PositiveNumber);
  limit->add_option("--out", la.out, "x,f,phi CSV; x,rho1,rho2 and the summary go next to it")->required();
  add_config(limit);

  PartitionArgs pa;
  auto* partition = app.add_subcommand("partition", "table of (1/n) log Z_n against its limit");
  partition->add_option("--pattern", pa.pattern)->required()->check(CLI::IsMember(kPatternNames));
  partition->add_option("--beta", pa.beta)->required();
  auto* ns_opt = partition->add_option("--ns", pa.ns, "explicit list of n");
  partition->add_option("--n-max", pa.n_max, "n = 1, 2, 4, ... up to N-MAX")->check(CLI::PositiveNumber)->excludes(ns_opt);
  partition->add_flag("--exact", pa.exact, "also write the inversion polynomials for n <= 60");
  partition->add_option("--out", pa.out)->required();
  add_config(partition);

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "distances from a permutation to the limit objects");
  compare->add_option("--input", ca.input, "permutation CSV or one-line text")->required();
  compare->add_option("--pattern", ca.pattern)->required()->check(CLI::IsMember(kPatternNames));
  compare->add_option("--beta", ca.beta)->required();
  compare->add_option("--grid", ca.grid)->check(CLI::PositiveNumber);
  compare->add_option("--out", ca.out, "JSON report");
  add_config(compare);

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "exhaustive small-n checks");
  validate->add_option("--n-max", va.n_max)->check(CLI::Range(1, 10));
  validate->add_option("--out", va.out, "JSON list of suite results");
  add_config(validate);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = overlay_config(app, std::move(args));
    std::vector<const char*> cargs{argv[0]};
    for (const auto& s : args) cargs.push_back(s.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());

    if (sample->parsed()) return cmd_sample(sa);
    if (limit->parsed()) return cmd_limit(la);
    if (partition->parsed()) return cmd_partition(pa);
    if (compare->parsed()) return cmd_compare(ca);
    if (validate->parsed()) return cmd_validate(va);
    return 2;
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
