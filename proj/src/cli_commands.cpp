#include "bmms/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bmms/csv.hpp"
#include "bmms/multiscale.hpp"
#include "bmms/partition.hpp"
#include "bmms/sampler.hpp"
#include "bmms/simgen.hpp"
#include "bmms/svg.hpp"

namespace bmms::cli {

namespace fs = std::filesystem;

namespace {

fs::path out_dir(const KeyValueConfig& cfg) {
  const fs::path dir(cfg.get_string("out", "out"));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::exists(dir)) {
    throw InvalidConfig("cannot create output directory: " + dir.string());
  }
  return dir;
}

std::uint64_t require_seed(const KeyValueConfig& cfg) {
  const long seed = cfg.require_int("seed");
  if (seed < 0) throw InvalidConfig("seed must be non-negative");
  return static_cast<std::uint64_t>(seed);
}

Index thread_cap(Index chains) {
  long cap = static_cast<long>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BMMS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) cap = v;
  }
  if (cap < 1) cap = 1;
  return std::min<Index>(chains, static_cast<Index>(cap));
}

struct MetricRow {
  std::string name;
  long level = 0;
  double value = 0.0;
};

void write_metric_rows(const fs::path& path, const std::vector<MetricRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "metric,level,value\n";
  for (const auto& r : rows) {
    out << r.name << ',' << r.level << ',' << format_double(r.value) << '\n';
  }
}

std::vector<MetricRow> read_metric_rows(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInput(path.string());
  std::vector<MetricRow> rows;
  std::string line;
  long line_no = 0;
  std::getline(in, line);  // header
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    MetricRow r;
    std::string level_s, value_s;
    if (!std::getline(ss, r.name, ',') || !std::getline(ss, level_s, ',') ||
        !std::getline(ss, value_s)) {
      throw ParseError("expected metric,level,value", path.string(), line_no);
    }
    r.level = std::strtol(level_s.c_str(), nullptr, 10);
    r.value = std::strtod(value_s.c_str(), nullptr);
    rows.push_back(r);
  }
  return rows;
}

// Rank-statistic AUC with average ranks for tied scores.
double auc_rank(const VectorXd& scores, const VectorXd& labels) {
  const Index n = scores.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return scores(a) < scores(b); });
  std::vector<double> rank(static_cast<std::size_t>(n));
  Index i = 0;
  while (i < n) {
    Index j = i;
    while (j + 1 < n && scores(order[static_cast<std::size_t>(j + 1)]) ==
                            scores(order[static_cast<std::size_t>(i)])) {
      ++j;
    }
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Index k = i; k <= j; ++k) {
      rank[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = avg;
    }
    i = j + 1;
  }
  double pos_ranks = 0.0;
  Index n1 = 0;
  for (Index k = 0; k < n; ++k) {
    if (labels(k) == 1.0) {
      pos_ranks += rank[static_cast<std::size_t>(k)];
      ++n1;
    }
  }
  const Index n0 = n - n1;
  if (n1 == 0 || n0 == 0) {
    throw InvalidInput("AUC requires both classes present");
  }
  return (pos_ranks - 0.5 * static_cast<double>(n1) *
                          (static_cast<double>(n1) + 1.0)) /
         (static_cast<double>(n1) * static_cast<double>(n0));
}

struct FitSetup {
  std::optional<MultiscaleDesign> design;
  std::vector<ModuleSpec> specs;
  bool any_partition = false;
};

FitSetup build_fit_setup(const KeyValueConfig& cfg, const MatrixXd& X) {
  const auto parsed = parse_module_list(cfg.require_string("modules"));
  const Index K = static_cast<Index>(parsed.size());
  const Index p = X.cols();
  const GaussianPrior level_prior =
      parse_level_prior(cfg.get_string("prior", "unit_info"));
  const NoisePrior noise = parse_noise_prior(cfg.get_string("noise", "jeffreys"));

  FitSetup setup;
  for (const auto& m : parsed) {
    if (m.kind != ModuleSpec::Kind::ConjugateGaussian) {
      setup.any_partition = true;
    }
  }

  std::vector<CoarseningOperator> ops;
  if (setup.any_partition) {
    // Partition modules act on the finest design at every level; their
    // coarsening is the sampled partition itself.
    for (Index j = 1; j < K; ++j) ops.push_back(CoarseningOperator::identity(p));
  } else {
    // Conjugate chain: parameters are resolution sizes, finest must match.
    for (Index j = 1; j < K; ++j) {
      const Index coarse = parsed[static_cast<std::size_t>(j - 1)].parameter;
      const Index fine = parsed[static_cast<std::size_t>(j)].parameter;
      if (coarse > fine) {
        throw InvalidConfig("module resolutions must be non-decreasing");
      }
      ops.push_back(build_dyadic_operator(fine, coarse));
    }
    if (parsed.back().parameter != p) {
      throw InvalidConfig("finest module resolution must equal data columns");
    }
  }
  setup.design.emplace(X, std::move(ops));

  Index prev_pieces = 0;
  for (Index j = 1; j <= K; ++j) {
    const auto& m = parsed[static_cast<std::size_t>(j - 1)];
    ModuleSpec spec;
    spec.kind = m.kind;
    spec.level = j;
    spec.prior = level_prior;
    spec.noise = noise;
    spec.mh.width = cfg.get_int("mh.width", 3);
    spec.mh.min_segment = cfg.get_int("mh.min_segment", 1);
    spec.mh.window = cfg.get_int("mh.window", 2);
    if (m.kind == ModuleSpec::Kind::Changepoint ||
        m.kind == ModuleSpec::Kind::Voronoi) {
      spec.pieces = m.parameter;
      if (m.parameter < prev_pieces) {
        throw InvalidConfig("partition piece counts must be non-decreasing");
      }
      prev_pieces = m.parameter;
      if (m.kind == ModuleSpec::Kind::Voronoi) {
        spec.grid_height = cfg.require_int("grid.height");
        spec.grid_width = cfg.require_int("grid.width");
        if (spec.grid_height * spec.grid_width != p) {
          throw InvalidConfig("grid.height * grid.width must equal data columns");
        }
      }
      // Partition levels need a proper prior for the marginal likelihood.
      if (level_prior.kind == GaussianPrior::Kind::Flat) {
        throw InvalidConfig("partition modules require a proper level prior");
      }
    }
    setup.specs.push_back(std::move(spec));
  }
  return setup;
}

std::vector<Index> modal_partition(const ModularChain& chain, Index level) {
  std::map<std::vector<Index>, Index> counts;
  for (const auto& draw : chain.draws) {
    ++counts[draw.partition[static_cast<std::size_t>(level - 1)]];
  }
  std::vector<Index> best;
  Index best_count = -1;
  for (const auto& [rep, count] : counts) {
    if (count > best_count) {
      best_count = count;
      best = rep;
    }
  }
  return best;
}

std::string fixed_width(const std::string& s, std::size_t w) {
  std::string out = s;
  while (out.size() < w) out.push_back(' ');
  return out;
}

std::string num3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf);
}

}  // namespace

int run_simulate(const KeyValueConfig& cfg) {
  SimulationDesign design;
  design.n = cfg.get_int("sim.n", 60);
  design.p = cfg.get_int("sim.p", 128);
  design.rho = cfg.get_double("sim.rho", 0.98);
  design.sigma_eps = cfg.get_double("sim.sigma", 1.0);
  design.f = test_function_from_string(cfg.get_string("sim.function", "blocks"));
  design.seed = require_seed(cfg);

  const auto data = gen_design(design);
  const fs::path dir = out_dir(cfg);
  write_csv(dir / "X.csv", data.X, numbered_columns("x", data.X.cols()));
  write_csv(dir / "y.csv", data.y, {"y"});
  write_csv(dir / "beta_true.csv", data.beta, {"beta"});
  std::cout << "simulate: wrote " << (dir / "X.csv").string() << " ("
            << data.X.rows() << "x" << data.X.cols() << "), y.csv, beta_true.csv\n";
  return 0;
}

int run_fit(const KeyValueConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const Table x_table = read_csv(cfg.require_string("data.x"));
  const Table y_table = read_csv(cfg.require_string("data.y"));
  if (y_table.values.cols() != 1) {
    throw InvalidInput("data.y must have exactly one column");
  }
  const MatrixXd X = x_table.values;
  const VectorXd y = y_table.values.col(0);
  if (X.rows() != y.size()) {
    throw InvalidInput("data.x and data.y row counts differ");
  }
  std::optional<VectorXd> beta_true;
  if (cfg.has("data.beta_true")) {
    const Table t = read_csv(cfg.get_string("data.beta_true"));
    beta_true = t.values.col(0);
    if (beta_true->size() != X.cols()) {
      throw InvalidInput("beta_true length does not match data columns");
    }
  }

  FitSetup setup = build_fit_setup(cfg, X);
  const auto& design = *setup.design;
  const Index K = design.levels();

  SamplerOptions options;
  options.iterations = cfg.get_int("mcmc.iterations", 5000);
  options.burn_in = cfg.get_int("mcmc.burn_in", 1000);
  options.thin = cfg.get_int("mcmc.thin", 1);
  options.inner_mh_steps = cfg.get_int("mcmc.inner", 10);
  options.seed = require_seed(cfg);
  const Index n_chains = cfg.get_int("chains", 1);
  const bool probit = cfg.get_bool("probit", false);
  const double alpha = cfg.get_double("alpha", 0.05);

  if (probit) {
    for (Index i = 0; i < y.size(); ++i) {
      if (y(i) != 0.0 && y(i) != 1.0) {
        throw InvalidInput("probit fit requires a 0/1 response");
      }
    }
  }

  const auto chains = run_chains(design, y, setup.specs, options, n_chains,
                                 thread_cap(n_chains), probit);
  const ModularChain chain = merge_chains(chains);
  const auto T = static_cast<Index>(chain.draws.size());
  const PosteriorSummary summary = posterior_summaries(chain, design, alpha);

  // --- chain draws, one scale per file -------------------------------------
  for (Index j = 1; j <= K; ++j) {
    MatrixXd draws(T, design.p(j));
    for (Index t = 0; t < T; ++t) {
      draws.row(t) =
          chain.draws[static_cast<std::size_t>(t)].theta[static_cast<std::size_t>(j - 1)];
    }
    write_csv(dir / ("theta_scale" + std::to_string(j) + ".csv"), draws,
              numbered_columns("c", design.p(j)));
  }
  {
    MatrixXd s2(T, K);
    for (Index t = 0; t < T; ++t) {
      s2.row(t) = chain.draws[static_cast<std::size_t>(t)].sigma2;
    }
    write_csv(dir / "sigma2.csv", s2, numbered_columns("sigma2_", K));
  }
  for (Index j = 1; j <= K; ++j) {
    const auto& first = chain.draws.front().partition[static_cast<std::size_t>(j - 1)];
    if (first.empty()) continue;
    MatrixXd part(T, static_cast<Index>(first.size()));
    for (Index t = 0; t < T; ++t) {
      const auto& rep =
          chain.draws[static_cast<std::size_t>(t)].partition[static_cast<std::size_t>(j - 1)];
      for (std::size_t c = 0; c < rep.size(); ++c) {
        part(t, static_cast<Index>(c)) = static_cast<double>(rep[c]);
      }
    }
    write_csv(dir / ("partitions_scale" + std::to_string(j) + ".csv"), part,
              numbered_columns("k", part.cols()));
  }
  if (probit) {
    MatrixXd zdraws(T, design.n());
    for (Index t = 0; t < T; ++t) {
      zdraws.row(t) = chain.draws[static_cast<std::size_t>(t)].z;
    }
    write_csv(dir / "z.csv", zdraws, numbered_columns("z", design.n()));
  }

  // --- per-scale summary table ---------------------------------------------
  {
    const Index pK = design.p(K);
    MatrixXd rows(K * pK, 8);
    for (Index j = 0; j < K; ++j) {
      for (Index i = 0; i < pK; ++i) {
        const Index r = j * pK + i;
        rows(r, 0) = static_cast<double>(j + 1);
        rows(r, 1) = static_cast<double>(i + 1);
        rows(r, 2) = summary.contribution[static_cast<std::size_t>(j)].mean(i);
        rows(r, 3) = summary.contribution[static_cast<std::size_t>(j)].lower(i);
        rows(r, 4) = summary.contribution[static_cast<std::size_t>(j)].upper(i);
        rows(r, 5) = summary.accumulated[static_cast<std::size_t>(j)].mean(i);
        rows(r, 6) = summary.accumulated[static_cast<std::size_t>(j)].lower(i);
        rows(r, 7) = summary.accumulated[static_cast<std::size_t>(j)].upper(i);
      }
    }
    write_csv(dir / "summary_scales.csv", rows,
              {"scale", "index", "contribution_mean", "contribution_lower",
               "contribution_upper", "accumulated_mean", "accumulated_lower",
               "accumulated_upper"});
  }
  const VectorXd beta_mean = summary.accumulated.back().mean;
  write_csv(dir / "beta_mean.csv", beta_mean, {"beta"});

  // --- metrics ---------------------------------------------------------------
  std::vector<MetricRow> metrics;
  if (beta_true) {
    metrics.push_back(
        {"beta_mse", K,
         (beta_mean - *beta_true).squaredNorm() / static_cast<double>(beta_mean.size())});
  }
  for (Index j = 1; j <= K; ++j) {
    const VectorXd& b = summary.accumulated[static_cast<std::size_t>(j - 1)].mean;
    const VectorXd& prev =
        j == 1 ? VectorXd::Zero(b.size()).eval()
               : summary.accumulated[static_cast<std::size_t>(j - 2)].mean;
    metrics.push_back({"scale_norm", j, (b - prev).norm()});
  }
  // Flat-prior plug-in RSS ladder: sequential LS through the design chain,
  // or through the modal partitions for partition modules.
  try {
    std::vector<double> rss;
    if (setup.any_partition) {
      std::vector<CoarseningOperator> ops;
      for (Index j = 1; j <= K; ++j) {
        const auto& spec = setup.specs[static_cast<std::size_t>(j - 1)];
        if (spec.kind == ModuleSpec::Kind::Changepoint) {
          ChangepointPartition part;
          part.p = design.p(j);
          part.splits = modal_partition(chain, j);
          ops.push_back(partition_to_operator(part));
        } else if (spec.kind == ModuleSpec::Kind::Voronoi) {
          VoronoiPartition part;
          part.height = spec.grid_height;
          part.width = spec.grid_width;
          const auto rep = modal_partition(chain, j);
          for (std::size_t c = 0; c + 1 < rep.size(); c += 2) {
            part.centers.push_back({rep[c], rep[c + 1]});
          }
          ops.push_back(partition_to_operator(part));
        } else {
          ops.push_back(CoarseningOperator::identity(design.p(j)));
        }
      }
      rss = sequential_ls_grouped(design.design(K), y, ops).rss;
    } else {
      rss = sequential_ls_oracle(design, y).rss;
    }
    for (Index j = 1; j <= K; ++j) {
      metrics.push_back({"rss", j, rss[static_cast<std::size_t>(j - 1)]});
    }
  } catch (const NumericalSingularity&) {
    // ladder unavailable for this design; omit rather than fail the fit
  }

  double accuracy = std::numeric_limits<double>::quiet_NaN();
  double auc = std::numeric_limits<double>::quiet_NaN();
  if (probit) {
    const VectorXd eta = design.design(K) * beta_mean;
    Index correct = 0;
    for (Index i = 0; i < y.size(); ++i) {
      const double prob = standard_normal_cdf(eta(i));
      if ((prob >= 0.5 ? 1.0 : 0.0) == y(i)) ++correct;
    }
    accuracy = static_cast<double>(correct) / static_cast<double>(y.size());
    auc = auc_rank(eta, y);
    metrics.push_back({"accuracy", K, accuracy});
    metrics.push_back({"auc", K, auc});
  }
  write_metric_rows(dir / "metrics.csv", metrics);

  // --- figure ------------------------------------------------------------------
  if (cfg.get_bool("figures", true)) {
    std::vector<SeriesPanel> panels;
    for (Index j = 0; j < K; ++j) {
      SeriesPanel panel;
      panel.title = "Scale " + std::to_string(j + 1);
      panel.mean = summary.contribution[static_cast<std::size_t>(j)].mean;
      panel.lower = summary.contribution[static_cast<std::size_t>(j)].lower;
      panel.upper = summary.contribution[static_cast<std::size_t>(j)].upper;
      panels.push_back(std::move(panel));
    }
    SeriesPanel total;
    total.title = "Total";
    total.mean = summary.accumulated.back().mean;
    total.lower = summary.accumulated.back().lower;
    total.upper = summary.accumulated.back().upper;
    if (beta_true) total.truth = *beta_true;
    panels.push_back(std::move(total));
    write_decomposition_svg(dir / "decomposition.svg", panels);
  }

  // --- fit info + text summary ---------------------------------------------
  {
    std::ofstream info(dir / "fit_info.txt");
    info << "n = " << design.n() << "\n";
    info << "p = " << design.p(K) << "\n";
    info << "k = " << K << "\n";
    info << "probit = " << (probit ? 1 : 0) << "\n";
    info << "draws = " << T << "\n";
    info << "chains = " << n_chains << "\n";
    info << "seed = " << options.seed << "\n";
  }
  {
    std::ofstream txt(dir / "summary.txt");
    txt << "bmms fit summary\n";
    txt << "----------------\n";
    txt << "observations " << design.n() << ", finest resolution "
        << design.p(K) << ", scales " << K << "\n";
    txt << "draws " << T << " (iterations " << options.iterations
        << ", burn-in " << options.burn_in << ", thin " << options.thin
        << ", chains " << n_chains << ", seed " << options.seed << ")\n\n";

    txt << fixed_width("scale", 7) << fixed_width("||theta||", 12)
        << fixed_width("sigma2", 12) << fixed_width("ess", 10)
        << fixed_width("rhat", 8) << "\n";
    for (Index j = 1; j <= K; ++j) {
      std::vector<std::vector<double>> norm_by_chain;
      for (const auto& c : chains) {
        std::vector<double> series;
        for (const auto& draw : c.draws) {
          series.push_back(draw.theta[static_cast<std::size_t>(j - 1)].norm());
        }
        norm_by_chain.push_back(std::move(series));
      }
      std::vector<double> pooled;
      for (const auto& s : norm_by_chain) {
        pooled.insert(pooled.end(), s.begin(), s.end());
      }
      const double ess = effective_sample_size(pooled);
      const double rhat =
          norm_by_chain.size() > 1 ? split_rhat(norm_by_chain) : 1.0;
      const double mean_norm =
          std::accumulate(pooled.begin(), pooled.end(), 0.0) /
          static_cast<double>(pooled.size());
      txt << fixed_width(std::to_string(j), 7) << fixed_width(num3(mean_norm), 12)
          << fixed_width(num3(summary.sigma2_mean(j - 1)), 12)
          << fixed_width(num3(ess), 10)
          << fixed_width(norm_by_chain.size() > 1 ? num3(rhat) : "-", 8) << "\n";
    }
    txt << "\nper-scale posterior means and " << 100.0 * (1.0 - alpha)
        << "% intervals: summary_scales.csv\n";
    txt << "accumulated coefficient (finest scale): beta_mean.csv\n";
    if (probit) {
      txt << "\nprobit in-sample: accuracy " << num3(accuracy) << ", auc "
          << num3(auc) << "\n";
    }
  }

  std::cout << "fit: " << T << " draws over " << K << " scales -> "
            << dir.string() << "\n";
  return 0;
}

int run_predict(const KeyValueConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const fs::path fit_dir(cfg.get_string("fit.dir", dir.string()));
  const KeyValueConfig info = KeyValueConfig::from_file(fit_dir / "fit_info.txt");
  const bool probit = info.get_bool("probit", false);
  const Index p = info.require_int("p");

  const Table beta_table = read_csv(fit_dir / "beta_mean.csv");
  const VectorXd beta = beta_table.values.col(0);
  const Table x_table = read_csv(cfg.require_string("predict.x"));
  if (x_table.values.cols() != p || beta.size() != p) {
    throw InvalidInput("predict: column count does not match training design");
  }
  const VectorXd eta = x_table.values * beta;

  if (probit) {
    MatrixXd outm(eta.size(), 2);
    for (Index i = 0; i < eta.size(); ++i) {
      const double prob = standard_normal_cdf(eta(i));
      outm(i, 0) = prob;
      outm(i, 1) = prob >= 0.5 ? 1.0 : 0.0;
    }
    write_csv(dir / "predictions.csv", outm, {"prob", "label"});
  } else {
    write_csv(dir / "predictions.csv", eta, {"pred"});
  }

  if (cfg.has("predict.y")) {
    const Table y_table = read_csv(cfg.get_string("predict.y"));
    const VectorXd y = y_table.values.col(0);
    if (y.size() != eta.size()) {
      throw InvalidInput("predict: label count does not match rows");
    }
    std::vector<MetricRow> metrics;
    if (probit) {
      Index correct = 0;
      for (Index i = 0; i < y.size(); ++i) {
        const double label = standard_normal_cdf(eta(i)) >= 0.5 ? 1.0 : 0.0;
        if (label == y(i)) ++correct;
      }
      metrics.push_back({"accuracy", 0,
                         static_cast<double>(correct) /
                             static_cast<double>(y.size())});
      metrics.push_back({"auc", 0, auc_rank(eta, y)});
    } else {
      metrics.push_back({"mape", 0, (y - eta).cwiseAbs().mean()});
    }
    write_metric_rows(dir / "predict_metrics.csv", metrics);
    for (const auto& m : metrics) {
      std::cout << "predict: " << m.name << " = " << num3(m.value) << "\n";
    }
  }
  std::cout << "predict: wrote " << (dir / "predictions.csv").string() << "\n";
  return 0;
}

int run_summarize(const KeyValueConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const fs::path fit_dir(cfg.get_string("fit.dir", dir.string()));
  const fs::path metrics_path = fit_dir / "metrics.csv";
  if (!fs::exists(metrics_path)) throw MissingInput(metrics_path.string());
  auto rows = read_metric_rows(metrics_path);
  const fs::path predict_path = fit_dir / "predict_metrics.csv";
  if (fs::exists(predict_path)) {
    auto extra = read_metric_rows(predict_path);
    rows.insert(rows.end(), extra.begin(), extra.end());
  }

  std::ostringstream text;
  text << fixed_width("metric", 14) << fixed_width("level", 7) << "value\n";
  for (const auto& r : rows) {
    text << fixed_width(r.name, 14)
         << fixed_width(r.level > 0 ? std::to_string(r.level) : "-", 7)
         << num3(r.value) << "\n";
  }
  bool has_rss = false;
  for (const auto& r : rows) has_rss = has_rss || r.name == "rss";
  if (has_rss) {
    text << "\nrss ladder:";
    for (const auto& r : rows) {
      if (r.name == "rss") text << " " << num3(r.value);
    }
    text << "\n";
  }
  std::cout << text.str();
  std::ofstream txt(dir / "summary_table.txt");
  txt << text.str();
  write_metric_rows(dir / "summary_table.csv", rows);
  return 0;
}

int run_command(const std::string& name, const KeyValueConfig& cfg) {
  if (name == "simulate") return run_simulate(cfg);
  if (name == "fit") return run_fit(cfg);
  if (name == "predict") return run_predict(cfg);
  if (name == "summarize") return run_summarize(cfg);
  throw InvalidConfig("unknown command: " + name);
}

int run_command_safely(const std::string& name, const KeyValueConfig& cfg) {
  try {
    return run_command(name, cfg);
  } catch (const MissingInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalSingularity& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace bmms::cli
