// Command-line entry point: denoise, path, simulate, transduce, theory.
// Every command is a pure function of (input files, flags, seed); outputs
// are written with max-precision decimals so re-runs are byte-identical
// (the wall_time_ms metadata field is the one intentionally volatile value).

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gtf/graph.hpp"
#include "gtf/io.hpp"
#include "gtf/model_eval.hpp"
#include "gtf/rng.hpp"
#include "gtf/solvers.hpp"
#include "gtf/synthesis.hpp"
#include "gtf/theory.hpp"
#include "gtf/transduction.hpp"

using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitUnconverged = 2;
constexpr int kExitFailedCheck = 3;

struct SolverFlags {
  double rho = 0.0;
  double tol = 1e-8;
  int max_iters = 5000;
  double cg_tol = 1e-10;
  std::uint64_t seed = 0;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--rho", f.rho, "augmented Lagrangian parameter (0 = auto)");
  cmd->add_option("--tol", f.tol, "solver tolerance");
  cmd->add_option("--max-iters", f.max_iters, "solver iteration cap");
  cmd->add_option("--cg-tol", f.cg_tol, "inner PCG tolerance");
  cmd->add_option("--seed", f.seed, "random seed");
}

gtf::SolverOptions to_options(const SolverFlags& f) {
  gtf::SolverOptions o;
  o.rho = f.rho;
  o.tolerance = f.tol;
  o.max_iterations = f.max_iters;
  o.cg_tolerance = f.cg_tol;
  o.seed = f.seed;
  return o;
}

class Timer {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream os(path);
  if (!os) gtf::fail(gtf::ErrorCode::FileNotFound, "cannot open for writing: " + path);
  os << j.dump(2) << '\n';
}

std::vector<double> parse_double_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) gtf::fail(gtf::ErrorCode::InvalidParameter, "empty list: " + spec);
  return out;
}

std::vector<double> parse_lambda_grid(const std::string& spec) {
  // lo:hi:count -> count geometric points from hi down to lo.
  double lo = 0.0, hi = 0.0;
  int count = 0;
  char c1 = 0, c2 = 0;
  std::stringstream ss(spec);
  if (!(ss >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1 || lo <= 0.0 ||
      hi < lo)
    gtf::fail(gtf::ErrorCode::InvalidParameter, "--lambda-grid expects lo:hi:count with 0 < lo <= hi");
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i)
    grid[i] = count == 1 ? hi : hi * std::pow(lo / hi, static_cast<double>(i) / (count - 1));
  return grid;
}

gtf::GraphPtr load_graph(const std::string& path) {
  return std::make_shared<const gtf::Graph>(gtf::read_edge_list_file(path));
}

ordered_json graph_summary(const gtf::Graph& g) {
  return ordered_json{{"nodes", g.num_nodes()}, {"edges", g.num_edges()}};
}

// ---------------------------------------------------------------- denoise

struct DenoiseConfig {
  std::string graph, signal, truth, output;
  int k = 0;
  double lambda = 0.0;
  double lambda2 = 0.0;
  std::string method = "auto";
  SolverFlags solver;
};

int run_denoise(const DenoiseConfig& cfg) {
  Timer timer;
  const auto g = load_graph(cfg.graph);
  const auto y = gtf::read_signal_csv(cfg.signal);
  if (static_cast<int>(y.size()) != g->num_nodes())
    gtf::fail(gtf::ErrorCode::DimensionMismatch,
              "signal has " + std::to_string(y.size()) + " rows but graph has " +
                  std::to_string(g->num_nodes()) + " nodes");
  std::vector<double> truth;
  if (!cfg.truth.empty()) truth = gtf::read_signal_csv(cfg.truth);

  gtf::GtfFit fit;
  if (cfg.lambda2 > 0.0) {
    fit = gtf::sparse_gtf(y, g, cfg.k, cfg.lambda, cfg.lambda2, to_options(cfg.solver));
  } else {
    fit = gtf::solve(y, g, cfg.k, cfg.lambda, gtf::method_from_string(cfg.method),
                     to_options(cfg.solver));
  }

  gtf::write_signal_csv(cfg.output + ".csv", fit.beta);
  ordered_json meta{{"command", "denoise"},
                    {"graph", graph_summary(*g)},
                    {"lambda", fit.lambda},
                    {"k", fit.k},
                    {"method", fit.method},
                    {"df", gtf::estimate_df(fit, *g)},
                    {"objective", fit.objective},
                    {"iterations", fit.iterations},
                    {"converged", fit.converged}};
  if (cfg.lambda2 > 0.0) meta["lambda2"] = cfg.lambda2;
  if (!truth.empty()) {
    meta["mse"] = gtf::mse(fit.beta, truth);
    meta["denoised_snr"] = gtf::denoised_snr(fit.beta, truth);
  }
  meta["wall_time_ms"] = timer.ms();
  write_json(cfg.output + ".meta.json", meta);
  return fit.converged ? kExitOk : kExitUnconverged;
}

// ------------------------------------------------------------------- path

struct PathConfig {
  std::string graph, signal, truth, output;
  int k = 0;
  std::string grid_spec;  // empty = auto
  std::string method = "auto";
  bool emit_fits = false;
  SolverFlags solver;
};

int run_path(const PathConfig& cfg) {
  Timer timer;
  const auto g = load_graph(cfg.graph);
  const auto y = gtf::read_signal_csv(cfg.signal);
  if (static_cast<int>(y.size()) != g->num_nodes())
    gtf::fail(gtf::ErrorCode::DimensionMismatch, "signal/graph size mismatch");
  std::vector<double> truth;
  if (!cfg.truth.empty()) truth = gtf::read_signal_csv(cfg.truth);

  std::vector<double> grid;
  if (!cfg.grid_spec.empty()) grid = parse_lambda_grid(cfg.grid_spec);
  const auto path = gtf::lambda_path(y, g, cfg.k, grid, to_options(cfg.solver),
                                     gtf::method_from_string(cfg.method), truth);

  std::ostringstream csv;
  csv << (path.has_truth ? "lambda,df,objective,mse,snr\n" : "lambda,df,objective\n");
  bool all_converged = true;
  for (size_t i = 0; i < path.points.size(); ++i) {
    const auto& pt = path.points[i];
    csv << gtf::format_double(pt.lambda) << ',' << pt.df << ',' << gtf::format_double(pt.objective);
    if (path.has_truth)
      csv << ',' << gtf::format_double(pt.mse) << ',' << gtf::format_double(pt.snr);
    csv << '\n';
    all_converged = all_converged && pt.fit.converged;
    if (cfg.emit_fits) {
      char suffix[16];
      std::snprintf(suffix, sizeof(suffix), ".fit%03zu.csv", i);
      gtf::write_signal_csv(cfg.output + suffix, pt.fit.beta);
    }
  }
  gtf::write_text_file(cfg.output + ".path.csv", csv.str());
  ordered_json meta{{"command", "path"},
                    {"graph", graph_summary(*g)},
                    {"k", cfg.k},
                    {"method", cfg.method},
                    {"points", path.points.size()},
                    {"converged", all_converged}};
  meta["wall_time_ms"] = timer.ms();
  write_json(cfg.output + ".meta.json", meta);
  return all_converged ? kExitOk : kExitUnconverged;
}

// --------------------------------------------------------------- simulate

struct SimulateConfig {
  std::string generator;
  std::string graph;
  std::string grid_spec = "20:20";
  std::string er_spec;
  int nnz = 30;
  int starters = 10;
  int max_walks = 1000;
  std::string sigma_spec = "0.5,1,2";
  int k = 0;
  std::uint64_t seed = 0;
  std::string output;
  SolverFlags solver;
};

int run_simulate(const SimulateConfig& cfg) {
  Timer timer;
  gtf::GraphPtr g;
  std::vector<std::vector<double>> coords;
  if (!cfg.graph.empty()) {
    g = load_graph(cfg.graph);
  } else if (!cfg.er_spec.empty()) {
    double p = 0.0;
    int n = 0;
    char c = 0;
    std::stringstream ss(cfg.er_spec);
    if (!(ss >> n >> c >> p) || c != ':')
      gtf::fail(gtf::ErrorCode::InvalidParameter, "--er expects n:p");
    g = std::make_shared<const gtf::Graph>(gtf::erdos_renyi(n, p, cfg.seed));
  } else {
    int rows = 0, cols = 0;
    char c = 0;
    std::stringstream ss(cfg.grid_spec);
    if (!(ss >> rows >> c >> cols) || c != ':')
      gtf::fail(gtf::ErrorCode::InvalidParameter, "--grid expects rows:cols");
    g = std::make_shared<const gtf::Graph>(gtf::grid2d(rows, cols));
    coords = gtf::grid2d_coordinates(rows, cols);
  }

  std::vector<double> x;
  if (cfg.generator == "mixture") {
    if (coords.empty())
      gtf::fail(gtf::ErrorCode::InvalidParameter, "mixture generator needs --grid coordinates");
    // Five Gaussians in grid fractions: two sharp peaks near the center,
    // three broad background bumps.
    const double r = coords.back()[0], c = coords.back()[1];
    const std::vector<gtf::GaussianCenter> centers = {
        {{0.45 * r, 0.45 * c}, 0.04 * (r + c), 4.0}, {{0.55 * r, 0.60 * c}, 0.05 * (r + c), 3.5},
        {{0.20 * r, 0.75 * c}, 0.18 * (r + c), 1.0}, {{0.75 * r, 0.25 * c}, 0.20 * (r + c), 0.8},
        {{0.85 * r, 0.85 * c}, 0.16 * (r + c), 0.6}};
    x = gtf::gaussian_mixture_signal(coords, centers);
  } else if (cfg.generator == "poisson-dense") {
    x = gtf::poisson_equation_signal(*g, gtf::PoissonMode::Dense, 0, cfg.seed).x;
  } else if (cfg.generator == "poisson-sparse") {
    x = gtf::poisson_equation_signal(*g, gtf::PoissonMode::Sparse, cfg.nnz, cfg.seed).x;
  } else if (cfg.generator == "random-walk") {
    x = gtf::random_walk_signal(*g, cfg.starters, cfg.max_walks, cfg.seed);
  } else {
    gtf::fail(gtf::ErrorCode::InvalidParameter, "unknown generator: " + cfg.generator);
  }

  gtf::write_edge_list_file(*g, cfg.output + ".graph.txt");
  gtf::write_signal_csv(cfg.output + ".truth.csv", x);

  const auto sigmas = parse_double_list(cfg.sigma_spec);
  std::ostringstream sweep;
  sweep << "noise_snr,method,best_mse\n";
  const auto opts = to_options(cfg.solver);
  for (size_t si = 0; si < sigmas.size(); ++si) {
    const double sigma = sigmas[si];
    const auto y = gtf::add_noise(x, sigma, cfg.seed + 1000 + si);
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), ".noisy%zu.csv", si);
    gtf::write_signal_csv(cfg.output + suffix, y);
    const double snr = gtf::noise_snr(x, sigma);

    const auto grid = gtf::auto_lambda_grid(y, *g, cfg.k, 30, 3.0);
    const auto path = gtf::lambda_path(y, g, cfg.k, grid, opts, gtf::Method::Auto, x);
    double best_gtf = std::numeric_limits<double>::infinity();
    for (const auto& pt : path.points) best_gtf = std::min(best_gtf, pt.mse);
    sweep << gtf::format_double(snr) << ",gtf," << gtf::format_double(best_gtf) << '\n';

    double best_lap = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 50; ++t) {
      const double lam = 1e-4 * std::pow(10.0, 10.0 * t / 49.0);
      best_lap = std::min(best_lap, gtf::mse(gtf::laplacian_smooth(y, *g, cfg.k, lam), x));
    }
    sweep << gtf::format_double(snr) << ",laplacian," << gtf::format_double(best_lap) << '\n';
  }
  gtf::write_text_file(cfg.output + ".sweep.csv", sweep.str());

  ordered_json meta{{"command", "simulate"}, {"generator", cfg.generator},
                    {"seed", cfg.seed},     {"sigma", sigmas},
                    {"k", cfg.k},           {"graph", graph_summary(*g)}};
  if (cfg.generator == "poisson-sparse") meta["nnz"] = cfg.nnz;
  if (cfg.generator == "random-walk") {
    meta["starters"] = cfg.starters;
    meta["max_walks"] = cfg.max_walks;
  }
  meta["wall_time_ms"] = timer.ms();
  write_json(cfg.output + ".meta.json", meta);
  return kExitOk;
}

// -------------------------------------------------------------- transduce

struct TransduceConfig {
  std::string graph, features, labels, truth_labels, output;
  int knn = 5;
  int classes = 0;
  int seeds_per_class = 5;
  int k = 0;
  double lambda = 1.0;
  double epsilon = 0.01;
  std::string prior = "uniform";
  std::string baseline;
  SolverFlags solver;
};

int run_transduce(const TransduceConfig& cfg) {
  Timer timer;
  gtf::GraphPtr g;
  if (!cfg.graph.empty()) {
    g = load_graph(cfg.graph);
  } else if (!cfg.features.empty()) {
    g = std::make_shared<const gtf::Graph>(gtf::knn_graph(gtf::read_features_csv(cfg.features), cfg.knn));
  } else {
    gtf::fail(gtf::ErrorCode::InvalidParameter, "transduce needs --graph or --features");
  }
  const int n = g->num_nodes();

  std::vector<int> truth(n, -1);
  bool have_truth = false;
  if (!cfg.truth_labels.empty()) {
    for (const auto& [node, cls] : gtf::read_labels_csv(cfg.truth_labels)) {
      if (node < 0 || node >= n) gtf::fail(gtf::ErrorCode::IndexOutOfRange, "truth label node out of range");
      truth[node] = cls;
    }
    have_truth = true;
  }

  std::vector<int> observed_nodes, observed_labels;
  if (!cfg.labels.empty()) {
    for (const auto& [node, cls] : gtf::read_labels_csv(cfg.labels)) {
      if (node < 0 || node >= n) gtf::fail(gtf::ErrorCode::IndexOutOfRange, "seed label node out of range");
      observed_nodes.push_back(node);
      observed_labels.push_back(cls);
    }
  } else if (have_truth) {
    // Draw seeds_per_class seeds per class, deterministically from --seed.
    int num_classes = 0;
    for (int t : truth) num_classes = std::max(num_classes, t + 1);
    gtf::Rng rng(cfg.solver.seed);
    for (int cls = 0; cls < num_classes; ++cls) {
      std::vector<int> members;
      for (int i = 0; i < n; ++i)
        if (truth[i] == cls) members.push_back(i);
      const int draw = std::min<int>(cfg.seeds_per_class, members.size());
      for (int t = 0; t < draw; ++t) {
        const int pick = t + static_cast<int>(rng.uniform_int(members.size() - t));
        std::swap(members[t], members[pick]);
        observed_nodes.push_back(members[t]);
        observed_labels.push_back(cls);
      }
    }
  } else {
    gtf::fail(gtf::ErrorCode::InvalidParameter, "transduce needs --labels or --truth-labels");
  }

  int num_classes = cfg.classes;
  for (int cls : observed_labels) num_classes = std::max(num_classes, cls + 1);
  if (have_truth)
    for (int t : truth) num_classes = std::max(num_classes, t + 1);

  gtf::MadProblem problem = gtf::make_mad_problem(g, num_classes, observed_nodes, observed_labels,
                                                  cfg.lambda, cfg.k, cfg.epsilon);
  if (cfg.prior != "uniform") {
    const auto rows = gtf::read_features_csv(cfg.prior);
    if (static_cast<int>(rows.size()) != n || static_cast<int>(rows[0].size()) != num_classes)
      gtf::fail(gtf::ErrorCode::DimensionMismatch, "--prior matrix must be n x K");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < num_classes; ++j) problem.R(i, j) = rows[i][j];
  }

  const bool use_laplacian = cfg.baseline == "laplacian";
  const gtf::MadFit fit = use_laplacian ? gtf::mad_laplacian(problem, to_options(cfg.solver))
                                        : gtf::mad_gtf(problem, to_options(cfg.solver));

  gtf::write_labels_csv(cfg.output + ".labels.csv", fit.labels);
  bool all_converged = true;
  for (bool c : fit.converged_per_class) all_converged = all_converged && c;

  ordered_json meta{{"command", "transduce"},
                    {"graph", graph_summary(*g)},
                    {"method", use_laplacian ? "mad-laplacian" : "mad-gtf"},
                    {"k", cfg.k},
                    {"lambda", cfg.lambda},
                    {"epsilon", cfg.epsilon},
                    {"classes", num_classes},
                    {"observed", observed_nodes.size()},
                    {"converged", all_converged}};
  if (have_truth) {
    std::vector<char> is_observed(n, 0);
    for (int i : observed_nodes) is_observed[i] = 1;
    std::vector<int> eval;
    for (int i = 0; i < n; ++i)
      if (!is_observed[i] && truth[i] >= 0) eval.push_back(i);
    meta["misclassification"] = gtf::misclassification_rate(fit.labels, truth, eval);
  }
  meta["wall_time_ms"] = timer.ms();
  write_json(cfg.output + ".meta.json", meta);
  return all_converged ? kExitOk : kExitUnconverged;
}

// ----------------------------------------------------------------- theory

struct TheoryConfig {
  std::string check;
  int n = 0;
  std::uint64_t seed = 0;
  std::string output;
};

int run_theory(const TheoryConfig& cfg) {
  gtf::TheoryOptions options;
  options.only_check = cfg.check;
  options.seed = cfg.seed;
  if (cfg.n > 0) {
    options.covering_n = cfg.n;
    options.atom_n = cfg.n;
  }
  const auto reports = gtf::run_theory_suite(options);
  if (reports.empty()) gtf::fail(gtf::ErrorCode::InvalidParameter, "unknown check: " + cfg.check);

  std::ostringstream lines;
  bool all_pass = true;
  for (const auto& r : reports) {
    ordered_json j{{"check", r.check},
                   {"params", r.params},
                   {"computed", r.computed},
                   {"bound", r.bound},
                   {"pass", r.pass}};
    lines << j.dump() << '\n';
    if (!r.pass) {
      all_pass = false;
      std::cerr << "FAILED " << j.dump() << '\n';
    }
  }
  gtf::write_text_file(cfg.output + ".jsonl", lines.str());
  return all_pass ? kExitOk : kExitFailedCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph trend filtering: denoising, paths, simulation, transduction, theory checks"};
  app.require_subcommand(1);

  DenoiseConfig denoise;
  auto* cmd_denoise = app.add_subcommand("denoise", "fit a single GTF estimate");
  cmd_denoise->add_option("--graph", denoise.graph, "edge-list file")->required();
  cmd_denoise->add_option("--signal", denoise.signal, "observed signal CSV")->required();
  cmd_denoise->add_option("--truth", denoise.truth, "ground-truth CSV (adds error metrics)");
  cmd_denoise->add_option("--k", denoise.k, "difference order");
  cmd_denoise->add_option("--lambda", denoise.lambda, "penalty parameter")->required();
  cmd_denoise->add_option("--lambda2", denoise.lambda2, "sparse GTF l1 penalty on beta");
  cmd_denoise->add_option("--method", denoise.method, "auto|admm|newton|maxflow");
  cmd_denoise->add_option("--output", denoise.output, "output base path")->required();
  add_solver_flags(cmd_denoise, denoise.solver);

  PathConfig path;
  auto* cmd_path = app.add_subcommand("path", "lambda-grid sweep with df estimates");
  cmd_path->add_option("--graph", path.graph)->required();
  cmd_path->add_option("--signal", path.signal)->required();
  cmd_path->add_option("--truth", path.truth);
  cmd_path->add_option("--k", path.k);
  cmd_path->add_option("--lambda-grid", path.grid_spec, "lo:hi:count (default: auto grid)");
  cmd_path->add_option("--method", path.method);
  cmd_path->add_flag("--emit-fits", path.emit_fits, "write one fitted-signal CSV per lambda");
  cmd_path->add_option("--output", path.output)->required();
  add_solver_flags(cmd_path, path.solver);

  SimulateConfig simulate;
  auto* cmd_simulate = app.add_subcommand("simulate", "synthetic instances and MSE-vs-noise sweep");
  cmd_simulate
      ->add_option("--generator", simulate.generator,
                   "mixture|poisson-dense|poisson-sparse|random-walk")
      ->required();
  cmd_simulate->add_option("--graph", simulate.graph, "edge-list file (otherwise --grid/--er)");
  cmd_simulate->add_option("--grid", simulate.grid_spec, "rows:cols grid graph (default 20:20)");
  cmd_simulate->add_option("--er", simulate.er_spec, "n:p Erdos-Renyi graph");
  cmd_simulate->add_option("--nnz", simulate.nnz, "nonzeros for poisson-sparse");
  cmd_simulate->add_option("--starters", simulate.starters, "random-walk starter nodes");
  cmd_simulate->add_option("--max-walks", simulate.max_walks, "random-walk per-starter cap");
  cmd_simulate->add_option("--sigma", simulate.sigma_spec, "comma-separated noise levels");
  cmd_simulate->add_option("--k", simulate.k, "difference order for the sweep");
  cmd_simulate->add_option("--seed", simulate.seed);
  cmd_simulate->add_option("--output", simulate.output)->required();

  TransduceConfig transduce;
  auto* cmd_transduce = app.add_subcommand("transduce", "MAD-GTF / MAD-Laplacian label imputation");
  cmd_transduce->add_option("--graph", transduce.graph);
  cmd_transduce->add_option("--features", transduce.features, "feature CSV for knn graph");
  cmd_transduce->add_option("--knn", transduce.knn, "k for the knn graph");
  cmd_transduce->add_option("--labels", transduce.labels, "observed seed labels CSV");
  cmd_transduce->add_option("--truth-labels", transduce.truth_labels, "full labels CSV");
  cmd_transduce->add_option("--seeds-per-class", transduce.seeds_per_class);
  cmd_transduce->add_option("--classes", transduce.classes, "class count override");
  cmd_transduce->add_option("--k", transduce.k);
  cmd_transduce->add_option("--lambda", transduce.lambda);
  cmd_transduce->add_option("--epsilon", transduce.epsilon);
  cmd_transduce->add_option("--prior", transduce.prior, "uniform or an n x K CSV");
  cmd_transduce->add_option("--baseline", transduce.baseline, "laplacian switches the regularizer");
  cmd_transduce->add_option("--output", transduce.output)->required();
  add_solver_flags(cmd_transduce, transduce.solver);

  TheoryConfig theory;
  auto* cmd_theory = app.add_subcommand("theory", "run the numerical verification suite");
  cmd_theory->add_option("--check", theory.check, "run a single named check");
  cmd_theory->add_option("--n", theory.n, "override the covering/atom size");
  cmd_theory->add_option("--seed", theory.seed);
  cmd_theory->add_option("--output", theory.output)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (*cmd_denoise) return run_denoise(denoise);
    if (*cmd_path) return run_path(path);
    if (*cmd_simulate) return run_simulate(simulate);
    if (*cmd_transduce) return run_transduce(transduce);
    if (*cmd_theory) return run_theory(theory);
  } catch (const gtf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
