// mrfselect command-line tool: estimation runs, chain simulation,
// consistency sweeps, envelope checks, and mixing diagnostics.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mrfselect/io.hpp"
#include "mrfselect/sweep.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mrfselect;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitCompute = 4;

void write_json(const json& j, const fs::path& path) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open file for writing: " + path.string());
  out << j.dump(2) << '\n';
}

json edge_list_json(const Graph& g) {
  json edges = json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u + 1, v + 1});
  return edges;
}

json neighborhoods_json(const Graph& g) {
  json nbs = json::object();
  for (int v = 0; v < g.dims().d; ++v) {
    json list = json::array();
    for (int w : g.neighbors(v)) list.push_back(w + 1);
    nbs[std::to_string(v + 1)] = list;
  }
  return nbs;
}

std::vector<std::uint64_t> parse_grid(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const long long v = std::stoll(item);
    if (v < 1) throw Error("n grid entries must be positive");
    out.push_back(static_cast<std::uint64_t>(v));
  }
  if (out.empty()) throw Error("empty n grid");
  return out;
}

std::vector<std::uint64_t> seed_list(std::uint64_t base_seed, int count) {
  std::vector<std::uint64_t> seeds(count);
  for (int i = 0; i < count; ++i) seeds[i] = base_seed + static_cast<std::uint64_t>(i);
  return seeds;
}

struct CommonOpts {
  std::string input;
  std::string model;
  double c = 1.0;
  std::string mode = "exhaustive";
  std::uint64_t seed = 1;
  std::string n_grid = "1024,4096,16384";
  int seed_count = 20;
  double rho = 0.5;
  double delta = 1.0;
  std::string out_dir = ".";
  int alphabet_size = 0;
  bool has_header = false;
  std::uint64_t n = 1000;
  int max_lag = 20;
  std::string kind = "lazy_refresh";
};

json config_echo(const CommonOpts& o, const std::string& command) {
  return json{{"command", command},     {"input", o.input},   {"model", o.model},
              {"c", o.c},               {"mode", o.mode},     {"seed", o.seed},
              {"n_grid", o.n_grid},     {"seeds", o.seed_count}, {"rho", o.rho},
              {"delta", o.delta},       {"out_dir", o.out_dir},
              {"alphabet_size", o.alphabet_size}, {"has_header", o.has_header},
              {"n", o.n},               {"max_lag", o.max_lag}, {"kind", o.kind}};
}

int cmd_estimate(const CommonOpts& o) {
  const Sample sample = ingest_csv_file(o.input, o.has_header, o.alphabet_size);
  const PenaltyConfig pen(o.c, sample.n());
  const SearchMode mode = search_mode_from_string(o.mode);
  const SearchResult result = run_search(sample, pen, mode, o.seed);

  VertexScoreCache cache(sample.dims().d);
  std::vector<double> logliks(sample.dims().d);
  for (int v = 0; v < sample.dims().d; ++v)
    logliks[v] = cache.get_or_compute(sample, v, result.best_graph.neighbor_mask(v));
  const double loglik = std::accumulate(logliks.begin(), logliks.end(), 0.0);
  const std::uint64_t units = penalty_units(result.best_graph);

  json report;
  report["config"] = config_echo(o, "estimate");
  report["n"] = sample.n();
  report["d"] = sample.dims().d;
  report["alphabet_size"] = sample.dims().alphabet_size;
  report["edges"] = edge_list_json(result.best_graph);
  report["neighborhoods"] = neighborhoods_json(result.best_graph);
  report["loglik"] = loglik;
  report["penalty_units"] = units;
  report["lambda"] = pen.lambda();
  report["score"] = result.best_score;
  report["search"] = {{"mode", o.mode}, {"evaluations", result.evaluations}, {"seed", o.seed}};

  write_json(report, fs::path(o.out_dir) / "estimate.json");
  export_dot_file(result.best_graph, (fs::path(o.out_dir) / "estimate.dot").string());
  return 0;
}

int cmd_simulate(const CommonOpts& o) {
  const TrueModel model = joint_from_potentials(import_model_file(o.model));
  const MixingChainConfig cfg(chain_kind_from_string(o.kind),
                              o.kind == "lazy_refresh" ? o.rho : 0.0, o.seed);
  const Sample sample = generate_chain(model, cfg, o.n);
  fs::create_directories(o.out_dir);
  export_csv_file(sample, (fs::path(o.out_dir) / "sample.csv").string());
  return 0;
}

int cmd_consistency_sweep(const CommonOpts& o) {
  const TrueModel model = joint_from_potentials(import_model_file(o.model));
  const auto [nes, gstar] = basic_neighborhoods(model);
  const auto grid = parse_grid(o.n_grid);
  const auto seeds = seed_list(o.seed, o.seed_count);
  const SweepReport sweep =
      run_consistency_sweep(model, gstar, o.c, search_mode_from_string(o.mode), grid, seeds,
                            {ChainKind::iid, ChainKind::lazy_refresh}, o.rho);

  json report;
  report["config"] = config_echo(o, "consistency-sweep");
  report["true_edges"] = edge_list_json(gstar);
  json cells = json::array();
  std::ostringstream csv;
  csv << "kind,n,runs,recovery,overfit,underfit\n";
  for (const SweepCell& cell : sweep.cells) {
    cells.push_back({{"kind", to_string(cell.kind)},
                     {"n", cell.n},
                     {"runs", cell.runs},
                     {"recovery_fraction", cell.recovery_fraction()},
                     {"overfit_fraction", cell.overfit_fraction()},
                     {"underfit_fraction", cell.underfit_fraction()}});
    csv << to_string(cell.kind) << ',' << cell.n << ',' << cell.runs << ','
        << cell.recovery_fraction() << ',' << cell.overfit_fraction() << ','
        << cell.underfit_fraction() << '\n';
  }
  report["cells"] = cells;
  write_json(report, fs::path(o.out_dir) / "sweep.json");
  std::ofstream table(fs::path(o.out_dir) / "sweep.csv");
  table << csv.str();
  return 0;
}

int cmd_envelope(const CommonOpts& o) {
  const TrueModel model = joint_from_potentials(import_model_file(o.model));
  const auto grid = parse_grid(o.n_grid);
  const auto seeds = seed_list(o.seed, o.seed_count);

  // All singleton and pair margins.
  std::vector<std::vector<int>> margins;
  for (int v = 0; v < model.dims().d; ++v) margins.push_back({v});
  for (int u = 0; u < model.dims().d; ++u)
    for (int v = u + 1; v < model.dims().d; ++v) margins.push_back({u, v});

  const MixingChainConfig base(chain_kind_from_string(o.kind),
                               o.kind == "lazy_refresh" ? o.rho : 0.0, 0);
  const EnvelopeReport env = envelope_check(model, base, o.delta, grid, seeds, margins);

  json report;
  report["config"] = config_echo(o, "envelope");
  report["delta"] = env.delta;
  json points = json::array();
  for (const EnvelopePoint& p : env.points)
    points.push_back({{"n", p.n},
                      {"marginal_fraction", p.marginal_fraction},
                      {"conditional_fraction", p.conditional_fraction}});
  report["points"] = points;
  write_json(report, fs::path(o.out_dir) / "envelope.json");
  return 0;
}

int cmd_diagnose(const CommonOpts& o) {
  const Sample sample = ingest_csv_file(o.input, o.has_header, o.alphabet_size);
  const auto coeffs = mixing_diagnostic(sample, o.max_lag);

  json report;
  report["config"] = config_echo(o, "diagnose");
  json lags = json::array();
  for (std::size_t lag = 0; lag < coeffs.size(); ++lag)
    lags.push_back({{"lag", lag + 1}, {"per_vertex", coeffs[lag]}});
  report["coefficients"] = lags;
  write_json(report, fs::path(o.out_dir) / "diagnose.json");
  return 0;
}

void write_error_json(const std::string& out_dir, const std::string& kind,
                      const std::string& message) {
  try {
    write_json(json{{"error", kind}, {"message", message}}, fs::path(out_dir) / "error.json");
  } catch (...) {
    // Report still goes to stderr below.
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph structure estimation by penalized pseudo-likelihood"};
  app.require_subcommand(1);

  CommonOpts o;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--c", o.c, "penalty constant (default 1.0)");
    sub->add_option("--seed", o.seed, "base RNG seed");
    sub->add_option("--out-dir", o.out_dir, "output directory");
  };

  auto* estimate = app.add_subcommand("estimate", "estimate the dependency graph from a sample");
  estimate->add_option("--input", o.input, "sample CSV")->required();
  estimate->add_option("--mode", o.mode, "exhaustive | greedy | anneal");
  estimate->add_option("--alphabet-size", o.alphabet_size, "override inferred alphabet size");
  estimate->add_flag("--has-header", o.has_header, "skip the first CSV line");
  add_common(estimate);

  auto* simulate = app.add_subcommand("simulate", "generate a sample from a model file");
  simulate->add_option("--model", o.model, "model file")->required();
  simulate->add_option("--n", o.n, "sample size");
  simulate->add_option("--rho", o.rho, "lazy-refresh hold probability");
  simulate->add_option("--kind", o.kind, "iid | lazy_refresh | gibbs_scan");
  add_common(simulate);

  auto* sweep = app.add_subcommand("consistency-sweep", "recovery fractions over an n grid");
  sweep->add_option("--model", o.model, "model file")->required();
  sweep->add_option("--mode", o.mode, "exhaustive | greedy | anneal");
  sweep->add_option("--n-grid", o.n_grid, "comma-separated sample sizes");
  sweep->add_option("--seeds", o.seed_count, "replications per cell");
  sweep->add_option("--rho", o.rho, "lazy-refresh hold probability");
  add_common(sweep);

  auto* envelope = app.add_subcommand("envelope", "empirical convergence-envelope check");
  envelope->add_option("--model", o.model, "model file")->required();
  envelope->add_option("--delta", o.delta, "envelope constant");
  envelope->add_option("--n-grid", o.n_grid, "comma-separated sample sizes");
  envelope->add_option("--seeds", o.seed_count, "replications per n");
  envelope->add_option("--rho", o.rho, "lazy-refresh hold probability");
  envelope->add_option("--kind", o.kind, "iid | lazy_refresh | gibbs_scan");
  add_common(envelope);

  auto* diagnose = app.add_subcommand("diagnose", "per-lag dependence coefficients of a sample");
  diagnose->add_option("--input", o.input, "sample CSV")->required();
  diagnose->add_option("--max-lag", o.max_lag, "largest lag to report");
  diagnose->add_option("--alphabet-size", o.alphabet_size, "override inferred alphabet size");
  diagnose->add_flag("--has-header", o.has_header, "skip the first CSV line");
  add_common(diagnose);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (estimate->parsed()) return cmd_estimate(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (sweep->parsed()) return cmd_consistency_sweep(o);
    if (envelope->parsed()) return cmd_envelope(o);
    if (diagnose->parsed()) return cmd_diagnose(o);
  } catch (const FormatError& e) {
    write_error_json(o.out_dir, "format", e.what());
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const InvalidSymbol& e) {
    write_error_json(o.out_dir, "symbol", e.what());
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const Error& e) {
    write_error_json(o.out_dir, "compute", e.what());
    std::cerr << "error: " << e.what() << '\n';
    return kExitCompute;
  }
  return kExitUsage;
}
