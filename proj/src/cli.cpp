#include "jacobi2p/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "jacobi2p/jost.hpp"
#include "jacobi2p/random.hpp"
#include "jacobi2p/serialize.hpp"
#include "jacobi2p/verify.hpp"
#include "json.hpp"

namespace jacobi2p {

namespace {

using nlohmann::json;

Complex parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument("config: " + where + " must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Complex> parse_complex_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw std::invalid_argument("config: " + where + " must be an array");
  std::vector<Complex> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_complex(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

double need_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw std::invalid_argument("config: " + where + "." + key + " must be a number");
  return j[key].get<double>();
}

}  // namespace

JobConfig parse_job_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  JobConfig cfg;
  if (j.contains("borg")) {
    const json& b = j["borg"];
    BorgData borg;
    borg.s = need_number(b, "s", "borg");
    borg.d = need_number(b, "d", "borg");
    borg.nu = need_number(b, "nu", "borg");
    borg.eps = static_cast<int>(need_number(b, "eps", "borg"));
    borg.validate();
    cfg.borg = borg;
  }
  if (j.contains("perturbation")) {
    const json& p = j["perturbation"];
    Perturbation pert;
    pert.support = static_cast<int>(need_number(p, "support", "perturbation"));
    if (!p.contains("a") || !p.contains("b") || !p.contains("c"))
      throw std::invalid_argument("config: perturbation needs a, b, c arrays");
    pert.a = parse_complex_list(p["a"], "perturbation.a");
    pert.b = parse_complex_list(p["b"], "perturbation.b");
    pert.c = parse_complex_list(p["c"], "perturbation.c");
    pert.validate();
    cfg.perturbation = pert;
  }
  if (j.contains("lambda")) cfg.lambda = parse_complex(j["lambda"], "lambda");
  if (j.contains("grid")) {
    const json& g = j["grid"];
    GridSpec grid;
    grid.re0 = need_number(g, "re0", "grid");
    grid.im0 = need_number(g, "im0", "grid");
    grid.re1 = need_number(g, "re1", "grid");
    grid.im1 = need_number(g, "im1", "grid");
    grid.nx = static_cast<int>(need_number(g, "nx", "grid"));
    grid.ny = static_cast<int>(need_number(g, "ny", "grid"));
    grid.validate();
    cfg.grid = grid;
  }
  if (j.contains("total0")) cfg.total0 = j["total0"].get<double>();
  if (j.contains("total1")) cfg.total1 = j["total1"].get<double>();
  if (j.contains("truncation")) cfg.truncation = j["truncation"].get<int>();
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (t.contains("tol")) cfg.tol = t["tol"].get<double>();
    if (t.contains("j_max")) cfg.j_max = t["j_max"].get<int>();
  }
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("n_cases")) cfg.n_cases = j["n_cases"].get<int>();
  if (j.contains("solver")) {
    cfg.solver = j["solver"].get<std::string>();
    if (cfg.solver != "backsub" && cfg.solver != "series")
      throw std::invalid_argument("config: solver must be 'backsub' or 'series'");
  }
  if (j.contains("max_support")) cfg.max_support = j["max_support"].get<int>();
  if (j.contains("scale")) cfg.scale = j["scale"].get<double>();
  if (j.contains("raw_edges")) {
    const json& e = j["raw_edges"];
    if (!e.is_array() || e.size() != 4)
      throw std::invalid_argument("config: raw_edges must have four entries");
    std::array<double, 4> edges{};
    for (int i = 0; i < 4; ++i) edges[static_cast<std::size_t>(i)] = e[i].get<double>();
    cfg.raw_edges = edges;
  }
  if (j.contains("raw_nu")) cfg.raw_nu = j["raw_nu"].get<double>();
  if (j.contains("raw_eps")) cfg.raw_eps = j["raw_eps"].get<int>();
  return cfg;
}

namespace {

std::string complex_list_json(const std::vector<Complex>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out += format_complex(xs[i]);
    if (i + 1 < xs.size()) out += ", ";
  }
  return out + "]";
}

std::string perturbation_json(const Perturbation& p) {
  return "{\"support\": " + std::to_string(p.support) + ", \"a\": " + complex_list_json(p.a) +
         ", \"b\": " + complex_list_json(p.b) + ", \"c\": " + complex_list_json(p.c) + "}";
}

std::string pole_aware_json(const PoleAware& v) {
  return std::string("{\"value\": ") + format_complex(v.value) +
         ", \"pole\": " + (v.pole ? "true" : "false") + "}";
}

}  // namespace

std::string JobConfig::to_json_string() const {
  std::string out = "{";
  bool first = true;
  auto field = [&](const std::string& key, const std::string& value) {
    if (!first) out += ", ";
    first = false;
    out += "\"" + key + "\": " + value;
  };
  if (borg)
    field("borg", "{\"s\": " + format_double(borg->s) + ", \"d\": " + format_double(borg->d) +
                      ", \"nu\": " + format_double(borg->nu) +
                      ", \"eps\": " + std::to_string(borg->eps) + "}");
  if (perturbation) field("perturbation", perturbation_json(*perturbation));
  if (lambda) field("lambda", format_complex(*lambda));
  if (grid)
    field("grid", "{\"re0\": " + format_double(grid->re0) + ", \"im0\": " +
                      format_double(grid->im0) + ", \"re1\": " + format_double(grid->re1) +
                      ", \"im1\": " + format_double(grid->im1) +
                      ", \"nx\": " + std::to_string(grid->nx) +
                      ", \"ny\": " + std::to_string(grid->ny) + "}");
  if (total0) field("total0", format_double(*total0));
  if (total1) field("total1", format_double(*total1));
  field("truncation", std::to_string(truncation));
  field("tolerances",
        "{\"tol\": " + format_double(tol) + ", \"j_max\": " + std::to_string(j_max) + "}");
  field("seed", std::to_string(seed));
  field("n_cases", std::to_string(n_cases));
  field("solver", "\"" + solver + "\"");
  field("max_support", std::to_string(max_support));
  field("scale", format_double(scale));
  if (raw_edges) {
    std::string e = "[";
    for (int i = 0; i < 4; ++i) {
      e += format_double((*raw_edges)[static_cast<std::size_t>(i)]);
      if (i < 3) e += ", ";
    }
    field("raw_edges", e + "]");
  }
  if (raw_nu) field("raw_nu", format_double(*raw_nu));
  if (raw_eps) field("raw_eps", std::to_string(*raw_eps));
  return out + "}";
}

namespace {

struct CommandContext {
  JobConfig cfg;
  int threads = 1;
};

const BorgData& need_borg(const JobConfig& cfg) {
  if (!cfg.borg) throw std::invalid_argument("config: this command needs a 'borg' block");
  return *cfg.borg;
}

const Perturbation& need_pert(const JobConfig& cfg) {
  if (!cfg.perturbation)
    throw std::invalid_argument("config: this command needs a 'perturbation' block");
  return *cfg.perturbation;
}

Complex need_lambda(const JobConfig& cfg) {
  if (!cfg.lambda) throw std::invalid_argument("config: this command needs 'lambda'");
  return *cfg.lambda;
}

double effective_total0(const JobConfig& cfg, const Background& bg) {
  if (cfg.total0) return *cfg.total0;
  if (cfg.perturbation) return moments(*cfg.perturbation, bg).total0;
  throw std::invalid_argument("config: need 'total0' or a 'perturbation' block");
}

double effective_total1(const JobConfig& cfg, const Background& bg) {
  if (cfg.total1) return *cfg.total1;
  if (cfg.perturbation) return moments(*cfg.perturbation, bg).total1;
  throw std::invalid_argument("config: need 'total1' or a 'perturbation' block");
}

std::string cmd_reconstruct(const CommandContext& ctx) {
  const Background bg = reconstruct(need_borg(ctx.cfg));
  return "{\"a1\": " + format_double(bg.a1) + ", \"a2\": " + format_double(bg.a2) +
         ", \"b1\": " + format_double(bg.b1) + ", \"b2\": " + format_double(bg.b2) + "}\n";
}

std::string cmd_eval(const CommandContext& ctx) {
  const BorgData& borg = need_borg(ctx.cfg);
  const Background bg = reconstruct(borg);
  const BackgroundEval ev = evaluate(borg, bg, need_lambda(ctx.cfg));
  std::string out = "{\n";
  out += "  \"lambda\": " + format_complex(ev.lambda) + ",\n";
  out += "  \"u\": " + format_complex(ev.u) + ",\n";
  out += "  \"v\": " + format_complex(ev.v) + ",\n";
  out += "  \"sqrt_u2m1\": " + format_complex(ev.sqrt_u2m1) + ",\n";
  out += "  \"rho\": " + format_complex(ev.rho) + ",\n";
  out += "  \"w\": " + format_complex(ev.w) + ",\n";
  out += "  \"m\": " + pole_aware_json(ev.m) + ",\n";
  out += "  \"mhat\": " + pole_aware_json(ev.mhat) + ",\n";
  out += "  \"reg_m\": " + format_complex(ev.reg_m) + ",\n";
  out += "  \"reg_mhat_w2\": " + format_complex(ev.reg_mhat_w2) + ",\n";
  out += "  \"chi1\": " + pole_aware_json(ev.chi1) + "\n";
  return out + "}\n";
}

std::string cmd_jost(const CommandContext& ctx) {
  const BorgData& borg = need_borg(ctx.cfg);
  const Background bg = reconstruct(borg);
  const Perturbation& pert = need_pert(ctx.cfg);
  const Complex lambda = need_lambda(ctx.cfg);
  const JostSolution sol =
      ctx.cfg.solver == "series"
          ? solve_series(pert, borg, bg, lambda, ctx.cfg.tol, ctx.cfg.j_max)
          : solve_backsub(pert, borg, bg, lambda);
  std::string out = "{\n";
  out += "  \"lambda\": " + format_complex(sol.lambda) + ",\n";
  out += "  \"solver\": \"" + ctx.cfg.solver + "\",\n";
  out += "  \"v\": " + complex_list_json(sol.v) + ",\n";
  out += "  \"V\": " + complex_list_json(sol.V) + ",\n";
  out += "  \"recurrence_residual\": " + format_double(sol.recurrence_residual) + ",\n";
  out += "  \"series_terms_used\": " + std::to_string(sol.series_terms_used) + ",\n";
  out += std::string("  \"converged\": ") + (sol.converged ? "true" : "false") + ",\n";
  out += std::string("  \"conditioning_warning\": ") +
         (sol.conditioning_warning ? "true" : "false") + "\n";
  return out + "}\n";
}

std::string cmd_region_scan(const CommandContext& ctx) {
  const BorgData& borg = need_borg(ctx.cfg);
  const Background bg = reconstruct(borg);
  if (!ctx.cfg.grid) throw std::invalid_argument("config: region-scan needs a 'grid' block");
  const RegionParams params = constants(borg);
  const double total0 = effective_total0(ctx.cfg, bg);
  const RegionReport report = scan(borg, params, total0, *ctx.cfg.grid, ctx.threads);
  return region_report_csv(report);
}

std::string cmd_check_empty(const CommandContext& ctx) {
  const BorgData& borg = need_borg(ctx.cfg);
  const Background bg = reconstruct(borg);
  const RegionParams params = constants(borg);
  const EmptinessResult r =
      criterion_first_moment_empty(borg, params, effective_total1(ctx.cfg, bg));
  return std::string("{\"empty_guaranteed\": ") + (r.empty_guaranteed ? "true" : "false") +
         ", \"lhs\": " + format_double(r.lhs) + ", \"t\": " + format_double(r.t) + "}\n";
}

std::string cmd_oracle_eigs(const CommandContext& ctx) {
  const BorgData& borg = need_borg(ctx.cfg);
  const Background bg = reconstruct(borg);
  const Perturbation pert = ctx.cfg.perturbation.value_or(Perturbation::none());
  const OracleResult r = truncated_eigs(pert, bg, ctx.cfg.truncation);
  std::string stable = "[";
  for (std::size_t i = 0; i < r.stable.size(); ++i) {
    stable += r.stable[i] ? "true" : "false";
    if (i + 1 < r.stable.size()) stable += ", ";
  }
  stable += "]";
  return "{\n  \"truncation\": " + std::to_string(r.truncation) +
         ",\n  \"eigenvalues\": " + complex_list_json(r.eigenvalues) +
         ",\n  \"stable\": " + stable + ",\n  \"filtered\": " + complex_list_json(r.filtered) +
         "\n}\n";
}

std::string cmd_random_pert(const CommandContext& ctx) {
  const BorgData& borg = need_borg(ctx.cfg);
  const Background bg = reconstruct(borg);
  Rng rng(ctx.cfg.seed);
  const Perturbation pert =
      random_perturbation(rng, bg, ctx.cfg.max_support, ctx.cfg.scale);
  return "{\"perturbation\": " + perturbation_json(pert) + "}\n";
}

std::string cmd_normalize(const CommandContext& ctx) {
  if (!ctx.cfg.raw_edges)
    throw std::invalid_argument("config: normalize needs 'raw_edges' [e1, e2, e3, e4]");
  const auto& e = *ctx.cfg.raw_edges;
  if (!(e[0] < e[1] && e[1] < e[2] && e[2] < e[3]))
    throw std::invalid_argument("config: raw_edges must be strictly increasing");
  const double span = e[3] - e[0];
  if (std::abs((e[1] - e[0]) - (e[3] - e[2])) > 1e-9 * span)
    throw std::invalid_argument(
        "config: raw_edges do not describe a 2-periodic spectrum (unequal band widths)");
  const double shift = 0.5 * (e[0] + e[3]);
  const double s = 0.5 * (e[2] - e[1]);
  const double d = 0.5 * (e[3] - e[0]);
  std::string out = "{\"s\": " + format_double(s) + ", \"d\": " + format_double(d) +
                    ", \"shift\": " + format_double(shift);
  if (ctx.cfg.raw_nu) out += ", \"nu\": " + format_double(*ctx.cfg.raw_nu - shift);
  if (ctx.cfg.raw_eps) out += ", \"eps\": " + std::to_string(*ctx.cfg.raw_eps);
  return out + "}\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral toolkit for complex perturbations of 2-periodic Jacobi matrices"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::optional<std::uint64_t> seed_override;
  int threads = 1;

  struct SubSpec {
    const char* name;
    const char* desc;
    std::string (*fn)(const CommandContext&);
    bool needs_config;
  };
  const std::vector<SubSpec> specs = {
      {"reconstruct", "Restore the 2-periodic entries from spectral data", cmd_reconstruct, true},
      {"eval", "Evaluate background spectral functions at one point", cmd_eval, true},
      {"jost", "Solve the Jost integral equation at one point", cmd_jost, true},
      {"region-scan", "Scan the spectrum-free criterion over a grid (CSV)", cmd_region_scan,
       true},
      {"check-empty", "First-moment guarantee of empty discrete spectrum", cmd_check_empty,
       true},
      {"oracle-eigs", "Finite-section eigenvalue oracle with stability filter",
       cmd_oracle_eigs, true},
      {"random-pert", "Generate a random finitely supported perturbation", cmd_random_pert,
       true},
      {"normalize", "Affine pre-shift of raw band edges into normal form", cmd_normalize,
       true},
  };

  std::vector<CLI::App*> subs;
  for (const SubSpec& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.desc);
    sub->add_option("--config", config_path, "JSON job config")->required(s.needs_config);
    sub->add_option("--out", out_path, "output path (default stdout)");
    sub->add_option("--seed", seed_override, "seed override");
    sub->add_option("--threads", threads, "worker threads for grid work");
    subs.push_back(sub);
  }
  CLI::App* verify_sub = app.add_subcommand("verify", "Run the randomized invariant suite");
  verify_sub->add_option("--config", config_path, "JSON job config (optional)");
  verify_sub->add_option("--out", out_path, "output path (default stdout)");
  verify_sub->add_option("--seed", seed_override, "seed override");
  verify_sub->add_option("--threads", threads, "worker threads");

  std::vector<const char*> argv;
  argv.push_back("jacobi2p");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream os;
    const int code = app.exit(e, os, os);
    (code == 0 ? out : err) << os.str();
    return code == 0 ? 0 : 2;
  }

  try {
    CommandContext ctx;
    ctx.threads = threads;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("config: cannot open " + config_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      ctx.cfg = parse_job_config(buf.str());
    }
    if (seed_override) ctx.cfg.seed = *seed_override;

    std::string result;
    int status = 0;
    if (verify_sub->parsed()) {
      const InvariantReport report =
          run_invariant_suite(ctx.cfg.seed, ctx.cfg.n_cases, threads);
      result = to_json(report);
      if (!report.all_passed()) status = 4;
    } else {
      for (std::size_t i = 0; i < specs.size(); ++i) {
        if (subs[i]->parsed()) {
          result = specs[i].fn(ctx);
          break;
        }
      }
    }

    std::string path = out_path;
    if (!path.empty()) {
      if (const char* dir = std::getenv("JACOBI2P_OUT_DIR"); dir != nullptr && path[0] != '/')
        path = std::string(dir) + "/" + path;
      std::ofstream f(path, std::ios::binary);
      if (!f) throw std::invalid_argument("cannot open output path " + path);
      f << result;
    } else {
      out << result;
    }
    return status;
  } catch (const NearSingularError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const ConvergenceError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace jacobi2p
