#include "esslab/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "esslab/criteria.hpp"
#include "esslab/error.hpp"
#include "esslab/esscore.hpp"
#include "esslab/limits.hpp"
#include "esslab/localization.hpp"

#ifndef ESSLAB_BUILD_DESCRIBE
#define ESSLAB_BUILD_DESCRIBE "unknown"
#endif

namespace esslab {

using nlohmann::json;

const char* build_describe() { return ESSLAB_BUILD_DESCRIBE; }

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void emit_plot_data(const PlotTable& table, const json& provenance, const std::string& path) {
  std::ofstream csv(path);
  if (!csv) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  for (std::size_t i = 0; i < table.header.size(); ++i) csv << (i ? "," : "") << table.header[i];
  csv << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << row[i];
    csv << '\n';
  }
  if (!csv) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
  std::ofstream side(path + ".json");
  if (!side) throw Error(ErrorKind::kIo, "cannot write '" + path + ".json'");
  side << provenance.dump(2) << '\n';
  if (!side) throw Error(ErrorKind::kIo, "write to '" + path + ".json' failed");
}

namespace {

struct Tolerances {
  double merge = kDefaultMergeTol;
  double persist = 0.02;
  double krein = 1e-3;
  double cluster_gap = 1e-2;
  int grid = 64;
  int qp_max_denominator = 400;
};

json tolerance_json(const Tolerances& t) {
  return {{"merge", t.merge},           {"persist", t.persist},
          {"krein", t.krein},           {"cluster_gap", t.cluster_gap},
          {"family_grid", t.grid},      {"qp_max_denominator", t.qp_max_denominator}};
}

VerifyOptions verify_options(const Tolerances& t) {
  VerifyOptions o;
  o.ess.merge_tol = t.merge;
  o.ess.limits.family_grid = t.grid;
  o.ess.limits.qp_max_denominator = t.qp_max_denominator;
  o.truncation.delta = t.persist;
  return o;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::kUsage, "not a number: '" + s + "'");
  }
  return v;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& x : split(s)) out.push_back(parse_double(x));
  return out;
}

std::vector<long> parse_longs(const std::string& s) {
  std::vector<long> out;
  for (const auto& x : split(s)) {
    long v = 0;
    auto res = std::from_chars(x.data(), x.data() + x.size(), v);
    if (res.ec != std::errc() || res.ptr != x.data() + x.size()) {
      throw Error(ErrorKind::kUsage, "not an integer: '" + x + "'");
    }
    out.push_back(v);
  }
  return out;
}

PlotTable set_table(const SpectralSet& s) {
  PlotTable t;
  t.header = {"piece", "lo", "hi"};
  if (const auto* r = std::get_if<RealSpectralSet>(&s)) {
    for (const auto& iv : r->intervals()) t.rows.push_back({"interval", format_number(iv.lo), format_number(iv.hi)});
    for (double p : r->points()) t.rows.push_back({"point", format_number(p), format_number(p)});
  } else {
    const auto& c = std::get<CircleSpectralSet>(s);
    for (const auto& a : c.arcs()) t.rows.push_back({"arc", format_number(a.lo), format_number(a.hi)});
    for (double p : c.points()) t.rows.push_back({"point", format_number(p), format_number(p)});
  }
  return t;
}

PlotTable cloud_table(PointCloud c) {
  c.sort();
  PlotTable t;
  t.header = c.kind == SetKind::kCircle ? std::vector<std::string>{"theta", "zero"}
                                        : std::vector<std::string>{"x", "eigenvalue"};
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    t.rows.push_back({format_number(c.values[i]), std::to_string(i + 1)});
  }
  return t;
}

json cloud_json(const PointCloud& c) {
  return {{"kind", to_string(c.kind)}, {"N", c.truncation_size}, {"values", c.values}};
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  Tolerances tol;
  std::string command;

  json provenance(const std::string& scenario_path, const ScenarioSpec* spec) const {
    json p{{"command", command},
           {"build", build_describe()},
           {"tolerances", tolerance_json(tol)},
           {"seeds", {{"power_iteration", 0x5eed}}}};
    if (spec) {
      p["scenario"] = {{"path", scenario_path}, {"id", spec->id}, {"spec", scenario_to_json(*spec)}};
    }
    return p;
  }
};

int cmd_spectrum(Context& ctx, const std::string& path, const std::string& method, long N,
                 const std::string& out_path) {
  ScenarioSpec spec = load_scenario(path);
  json result;
  PlotTable table;
  if (method == "structural") {
    EssOptions eo = verify_options(ctx.tol).ess;
    EssentialSpectrumReport r = essential_spectrum(spec, eo);
    to_json(result, r.set);
    result["method"] = method;
    result["was_closed"] = r.was_closed;
    result["approximate"] = r.approximate;
    result["provenance"] = r.provenance;
    table = set_table(r.set);
  } else if (method == "truncation") {
    TruncationOptions to = verify_options(ctx.tol).truncation;
    TruncationResult r = truncation_result(spec, static_cast<std::size_t>(N), to);
    result = cloud_json(r.persistent);
    result["method"] = method;
    result["raw_count"] = r.raw.values.size();
    result["sizes"] = r.sizes;
    table = cloud_table(r.persistent);
  } else {
    if (spec.kind != ScenarioKind::kPeriodic) {
      throw Error(ErrorKind::kUnsupported, "the discriminant method needs a periodic scenario");
    }
    const auto& p = std::get<PeriodicParams>(spec.params);
    SpectralSet s;
    if (spec.family == Family::kJacobi) s = band_spectrum(PeriodicJacobi{p.a, p.b});
    else s = cmv_band_arcs(PeriodicVerblunsky{p.alpha});
    to_json(result, s);
    result["method"] = method;
    table = set_table(s);
  }
  ctx.out << result.dump(2) << '\n';
  if (!out_path.empty()) emit_plot_data(table, ctx.provenance(path, &spec), out_path);
  return 0;
}

int cmd_rightlimits(Context& ctx, const std::string& path, bool detect, long L, double eps,
                    long centers_max, long centers_step) {
  ScenarioSpec spec = load_scenario(path);
  if (!detect) {
    RightLimitOptions o;
    o.family_grid = ctx.tol.grid;
    o.qp_max_denominator = ctx.tol.qp_max_denominator;
    ctx.out << to_json(right_limit_set(spec, o)).dump(2) << '\n';
    return 0;
  }
  if (centers_step < 1 || centers_max < 0) throw Error(ErrorKind::kUsage, "bad center range");
  std::vector<long> centers;
  for (long c = 0; c <= centers_max; c += centers_step) centers.push_back(c);
  ctx.out << to_json(detect_right_limits(spec, L, centers, eps), spec.family).dump(2) << '\n';
  return 0;
}

int cmd_verify_localization(Context& ctx, const std::vector<long>& budget, const std::string& out_path) {
  std::vector<long> Ls = budget.empty() ? std::vector<long>{4, 8, 16, 32, 64, 128, 256} : budget;
  PlotTable t;
  t.header = {"L", "c_L", "C_norm", "C_norm_L2"};
  ScenarioSpec free = free_jacobi();
  std::vector<double> scaled, norms;
  for (long L : Ls) {
    TentPartition tent = tent_values(L);
    NormEstimate e = commutator_C_norm(free, L, 0, 16 * L);
    scaled.push_back(e.norm_L2);
    norms.push_back(e.norm);
    t.rows.push_back({std::to_string(L), format_number(tent.c), format_number(e.norm), format_number(e.norm_L2)});
  }
  bool pass = true;
  if (!scaled.empty()) {
    auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    pass = *hi <= 2.0 * *lo;
  }
  for (std::size_t i = 1; i < Ls.size(); ++i) {
    if (Ls[i] == 2 * Ls[i - 1] && Ls[i - 1] >= 8) {
      double r = norms[i] / norms[i - 1];
      pass = pass && r >= 0.2 && r <= 0.3;
    }
  }
  for (std::size_t i = 0; i < t.header.size(); ++i) ctx.out << (i ? "," : "") << t.header[i];
  ctx.out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) ctx.out << (i ? "," : "") << row[i];
    ctx.out << '\n';
  }
  if (!out_path.empty()) emit_plot_data(t, ctx.provenance("", nullptr), out_path);
  return pass ? 0 : 1;
}

int cmd_verify(Context& ctx, const std::string& tag, const std::string& budget_s,
               const std::string& out_path) {
  std::vector<long> budget = parse_longs(budget_s);
  if (tag == "localization") return cmd_verify_localization(ctx, budget, out_path);
  TheoremReport r = verify_theorem(tag, budget, verify_options(ctx.tol));
  ctx.out << to_json(r).dump(2) << '\n';
  if (!out_path.empty()) {
    PlotTable t;
    t.header = {"N", "distance"};
    for (const auto& row : r.rows) t.rows.push_back({std::to_string(row.N), format_number(row.distance)});
    emit_plot_data(t, ctx.provenance("", nullptr), out_path);
  }
  return r.pass ? 0 : 1;
}

int cmd_sweep(Context& ctx, const std::string& path, const std::string& sizes_s,
              const std::string& out_path) {
  ScenarioSpec spec = load_scenario(path);
  std::vector<long> sizes = parse_longs(sizes_s);
  auto rows = convergence_sweep(spec, sizes, verify_options(ctx.tol));
  PlotTable t;
  t.header = {"N", "hausdorff"};
  for (const auto& r : rows) t.rows.push_back({std::to_string(r.N), format_number(r.distance)});
  ctx.out << "N,hausdorff\n";
  for (const auto& row : t.rows) ctx.out << row[0] << ',' << row[1] << '\n';
  if (!out_path.empty()) emit_plot_data(t, ctx.provenance(path, &spec), out_path);
  return 0;
}

int cmd_criteria(Context& ctx, const std::string& which, const std::string& path,
                 const std::string& targets_s, long N) {
  ScenarioSpec spec = load_scenario(path);
  if (which == "golinskii") {
    GolinskiiResult g = golinskii_decay_spectrum(spec, N, ctx.tol.cluster_gap);
    json j;
    to_json(j, g.set);
    j["criterion"] = "golinskii";
    j["warnings"] = g.warnings;
    ctx.out << j.dump(2) << '\n';
    return 0;
  }
  std::vector<double> x = parse_doubles(targets_s);
  Verdict v;
  if (which == "krein") {
    v = krein_check(spec, TargetSet::line(x), N, ctx.tol.krein);
  } else {
    if (x.size() != 2) throw Error(ErrorKind::kUsage, "chihara needs exactly two targets");
    TargetSet::line(x);
    v = chihara_check(spec, x[0], x[1], N, ctx.tol.krein);
  }
  ctx.out << to_json(v).dump(2) << '\n';
  return v.holds ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Essential spectra of Jacobi and CMV operators via right limits", "esslab"};
  app.require_subcommand(1);
  Context ctx{out, err, {}, {}};
  for (std::size_t i = 0; i < args.size(); ++i) ctx.command += (i ? " " : "") + args[i];

  long threads = 0;
  app.add_option("--threads", threads, "Worker threads (overrides ESSLAB_THREADS)");
  app.add_option("--tol-merge", ctx.tol.merge, "Fusion tolerance for unions")->capture_default_str();
  app.add_option("--tol-persist", ctx.tol.persist, "Persistence radius for truncation points")->capture_default_str();
  app.add_option("--tol-krein", ctx.tol.krein, "Band-entry tolerance for tail criteria")->capture_default_str();
  app.add_option("--tol-cluster", ctx.tol.cluster_gap, "Cluster gap for tail limit sets")->capture_default_str();
  app.add_option("--grid", ctx.tol.grid, "Sample count for parametrized right-limit families")->capture_default_str();
  app.add_option("--qp-max-denominator", ctx.tol.qp_max_denominator,
                 "Largest period of quasi-periodic approximants")->capture_default_str();

  std::string scenario, method = "structural", out_path, tag, budget, sizes, reference = "structural",
                        which, targets;
  long N = 2000, L = 8, centers_max = 4096, centers_step = 1, horizon = 10000;
  double eps = 1e-2;
  bool detect = false;

  auto* spectrum = app.add_subcommand("spectrum", "Essential spectrum of a scenario");
  spectrum->add_option("--scenario", scenario, "Scenario JSON file")->required();
  spectrum->add_option("--method", method, "structural | truncation | discriminant")
      ->check(CLI::IsMember({"structural", "truncation", "discriminant"}))
      ->capture_default_str();
  spectrum->add_option("--N", N, "Truncation size")->capture_default_str();
  spectrum->add_option("--out", out_path, "CSV plot data (with a .json provenance sidecar)");

  auto* rl = app.add_subcommand("rightlimits", "Right limits of a scenario");
  rl->add_option("--scenario", scenario, "Scenario JSON file")->required();
  rl->add_flag("--detect", detect, "Cluster stream windows instead of the structural description");
  rl->add_option("--L", L, "Window half-width")->capture_default_str();
  rl->add_option("--eps", eps, "Cluster radius (sup norm)")->capture_default_str();
  rl->add_option("--centers-max", centers_max, "Largest window center")->capture_default_str();
  rl->add_option("--centers-step", centers_step, "Spacing of window centers")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Run a registered check");
  verify->add_option("tag", tag, "Check tag, or 'localization'")->required();
  verify->add_option("--budget", budget, "Comma-separated size schedule");
  verify->add_option("--out", out_path, "CSV plot data");

  auto* sweep = app.add_subcommand("sweep", "Truncation convergence sweep");
  sweep->add_option("--scenario", scenario, "Scenario JSON file")->required();
  sweep->add_option("--sizes", sizes, "Comma-separated truncation sizes")->required();
  sweep->add_option("--reference", reference, "Reference spectrum")
      ->check(CLI::IsMember({"structural"}))
      ->capture_default_str();
  sweep->add_option("--out", out_path, "CSV plot data");

  auto* crit = app.add_subcommand("criteria", "Finite essential spectrum criteria");
  crit->add_option("which", which, "krein | chihara | golinskii")
      ->required()
      ->check(CLI::IsMember({"krein", "chihara", "golinskii"}));
  crit->add_option("--scenario", scenario, "Scenario JSON file")->required();
  crit->add_option("--targets", targets, "Comma-separated target points");
  crit->add_option("--N", horizon, "Horizon")->capture_default_str();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  }

  if (threads > 0) setenv("ESSLAB_THREADS", std::to_string(threads).c_str(), 1);

  try {
    if (spectrum->parsed()) return cmd_spectrum(ctx, scenario, method, N, out_path);
    if (rl->parsed()) return cmd_rightlimits(ctx, scenario, detect, L, eps, centers_max, centers_step);
    if (verify->parsed()) return cmd_verify(ctx, tag, budget, out_path);
    if (sweep->parsed()) return cmd_sweep(ctx, scenario, sizes, out_path);
    if (crit->parsed()) {
      if (which != "golinskii" && targets.empty()) throw Error(ErrorKind::kUsage, "--targets is required");
      return cmd_criteria(ctx, which, scenario, targets, horizon);
    }
  } catch (const Error& e) {
    err << to_string(e.kind()) << " error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kUsage ? 2 : 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, out, err);
}

}  // namespace esslab
