#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bmms/conjugate.hpp"
#include "bmms/multiscale.hpp"
#include "bmms/partition.hpp"
#include "bmms/rng.hpp"

namespace bmms {

// One module of the chain: a conjugate Gaussian block at its resolution, or
// a partition module (changepoint / Voronoi) whose coarsening is sampled.
struct ModuleSpec {
  enum class Kind { ConjugateGaussian, Changepoint, Voronoi };

  Kind kind = Kind::ConjugateGaussian;
  Index level = 1;
  GaussianPrior prior = GaussianPrior::unit_information();
  NoisePrior noise = NoisePrior::jeffreys();
  Index pieces = 1;  // H (changepoint) or center count (voronoi)
  Index grid_height = 0;
  Index grid_width = 0;
  MhOptions mh;
};

struct SamplerOptions {
  Index iterations = 5000;
  Index burn_in = 1000;
  Index thin = 1;
  Index inner_mh_steps = 10;  // partition moves per module per sweep
  std::uint64_t seed = 0;
  std::vector<VectorXd> initial_theta;  // optional, one per level
  // Test/diagnostic hook, called once per sweep with the per-level states
  // and the residual after each module.
  std::function<void(Index sweep, const std::vector<VectorXd>& theta,
                     const std::vector<VectorXd>& residuals)>
      observer;
};

struct ChainDraw {
  std::vector<VectorXd> theta;                 // per level
  VectorXd sigma2;                             // per level
  std::vector<std::vector<Index>> partition;   // splits or flattened centers
  VectorXd z;                                  // probit latents (probit only)
};

struct ModularChain {
  Index n = 0;
  std::vector<Index> dims;  // p_j per level
  std::vector<ChainDraw> draws;
  std::uint64_t seed = 0;
  Index burn_in = 0;
  Index thin = 1;
  bool probit = false;
};

namespace detail {

inline void validate_specs(const MultiscaleDesign& design,
                           const std::vector<ModuleSpec>& specs) {
  if (specs.empty()) throw InvalidConfig("sampler: empty module list");
  if (static_cast<Index>(specs.size()) != design.levels()) {
    throw InvalidConfig("sampler: module count must match design levels");
  }
  for (Index j = 0; j < static_cast<Index>(specs.size()); ++j) {
    const auto& s = specs[static_cast<std::size_t>(j)];
    if (s.level != j + 1) {
      throw InvalidConfig("sampler: modules must cover levels 1..K ascending");
    }
    const Index p = design.p(s.level);
    if (s.kind == ModuleSpec::Kind::Voronoi) {
      if (s.grid_height * s.grid_width != p) {
        throw InvalidConfig("sampler: voronoi grid does not match design");
      }
      if (s.pieces < 1 || s.pieces > p) {
        throw InvalidConfig("sampler: bad voronoi center count");
      }
    } else if (s.kind == ModuleSpec::Kind::Changepoint) {
      if (s.pieces < 1 || s.pieces > p) {
        throw InvalidConfig("sampler: bad changepoint piece count");
      }
    }
  }
}

// Precomputed pieces for a conjugate module; the design block never changes
// across sweeps, only the residual does.
struct ConjugateModuleState {
  MatrixXd A;  // M^{-1} + X'X
  Eigen::LLT<MatrixXd> llt;
  MatrixXd cov_sqrt;
  VectorXd precision_mean;  // M^{-1} m
  double prior_quad = 0.0;  // m'M^{-1}m
  double noise_shape = 0.0;
  double noise_rate = 0.0;
};

inline ConjugateModuleState make_conjugate_state(const MatrixXd& X,
                                                 const GaussianPrior& prior,
                                                 const NoisePrior& noise) {
  ConjugateModuleState st;
  const MatrixXd XtX = X.transpose() * X;
  const auto rp = resolve_prior(prior, X, XtX);
  st.A = rp.precision + XtX;
  st.llt = llt_with_jitter(st.A);
  st.cov_sqrt = st.llt.matrixU().solve(MatrixXd::Identity(X.cols(), X.cols()));
  st.precision_mean = rp.precision * rp.mean;
  st.prior_quad = rp.mean.dot(st.precision_mean);
  if (noise.kind == NoisePrior::Kind::InverseGamma) {
    st.noise_shape = noise.shape;
    st.noise_rate = noise.rate;
  }
  return st;
}

}  // namespace detail

// Sequential per-module sweeps: level 1 is drawn from its own posterior and
// each finer level from its conditional given the coarser draws of the same
// sweep, through the running residual. Partition states persist across
// sweeps (warm start).
class ModularSampler {
 public:
  ModularSampler(const MultiscaleDesign& design, std::vector<ModuleSpec> specs,
                 bool probit)
      : design_(design), specs_(std::move(specs)), probit_(probit) {
    detail::validate_specs(design_, specs_);
    const Index K = design_.levels();
    for (Index j = 1; j <= K; ++j) {
      auto& spec = specs_[static_cast<std::size_t>(j - 1)];
      if (probit_) spec.noise = NoisePrior::fixed(1.0);
      switch (spec.kind) {
        case ModuleSpec::Kind::ConjugateGaussian:
          conj_.push_back(detail::make_conjugate_state(design_.design(j),
                                                       spec.prior, spec.noise));
          prefix_.emplace_back();
          cp_state_.push_back(std::nullopt);
          vp_state_.push_back(std::nullopt);
          break;
        case ModuleSpec::Kind::Changepoint:
          conj_.emplace_back();
          prefix_.emplace_back(ColumnPrefixCache(design_.design(j)));
          cp_state_.push_back(
              ChangepointPartition::equal_spacing(design_.p(j), spec.pieces));
          vp_state_.push_back(std::nullopt);
          break;
        case ModuleSpec::Kind::Voronoi:
          conj_.emplace_back();
          prefix_.emplace_back();
          cp_state_.push_back(std::nullopt);
          vp_state_.push_back(VoronoiPartition::spread(
              spec.grid_height, spec.grid_width, spec.pieces));
          break;
      }
    }
  }

  ModularChain run(const VectorXd& y, const SamplerOptions& options) {
    const Index K = design_.levels();
    if (y.size() != design_.n()) {
      throw InvalidDimension("sampler: response length mismatch");
    }
    if (options.iterations < 1 || options.burn_in < 0 || options.thin < 1 ||
        options.burn_in >= options.iterations) {
      throw InvalidConfig("sampler: bad iteration/burn-in/thin settings");
    }
    if (probit_) {
      for (Index i = 0; i < y.size(); ++i) {
        if (y(i) != 0.0 && y(i) != 1.0) {
          throw InvalidInput("probit sampler: response must be 0/1");
        }
      }
    }

    Rng rng = Rng::for_chain(options.seed, 0);
    std::vector<VectorXd> theta(static_cast<std::size_t>(K));
    for (Index j = 1; j <= K; ++j) {
      auto& t = theta[static_cast<std::size_t>(j - 1)];
      if (!options.initial_theta.empty()) {
        if (static_cast<Index>(options.initial_theta.size()) != K) {
          throw InvalidConfig("sampler: initial theta must cover all levels");
        }
        t = options.initial_theta[static_cast<std::size_t>(j - 1)];
        if (t.size() != design_.p(j)) {
          throw InvalidDimension("sampler: initial theta length mismatch");
        }
      } else {
        t = VectorXd::Zero(design_.p(j));
      }
    }
    VectorXd sigma2 = VectorXd::Ones(K);
    VectorXd z;  // probit latents

    ModularChain chain;
    chain.n = design_.n();
    for (Index j = 1; j <= K; ++j) chain.dims.push_back(design_.p(j));
    chain.seed = options.seed;
    chain.burn_in = options.burn_in;
    chain.thin = options.thin;
    chain.probit = probit_;

    std::vector<VectorXd> residuals(static_cast<std::size_t>(K));
    for (Index t = 0; t < options.iterations; ++t) {
      VectorXd response;
      if (probit_) {
        VectorXd eta = VectorXd::Zero(design_.n());
        for (Index j = 1; j <= K; ++j) {
          eta += design_.design(j) * theta[static_cast<std::size_t>(j - 1)];
        }
        z.resize(design_.n());
        for (Index i = 0; i < design_.n(); ++i) {
          z(i) = y(i) == 1.0 ? rng.trunc_normal_above(eta(i), 0.0)
                             : rng.trunc_normal_below(eta(i), 0.0);
        }
        response = z;
      } else {
        response = y;
      }

      VectorXd e = response;
      for (Index j = 1; j <= K; ++j) {
        sweep_module(j, e, theta[static_cast<std::size_t>(j - 1)],
                     sigma2(j - 1), rng);
        e -= design_.design(j) * theta[static_cast<std::size_t>(j - 1)];
        residuals[static_cast<std::size_t>(j - 1)] = e;
      }
      if (options.observer) options.observer(t, theta, residuals);

      if (t >= options.burn_in && (t - options.burn_in) % options.thin == 0) {
        ChainDraw draw;
        draw.theta = theta;
        draw.sigma2 = sigma2;
        draw.partition.resize(static_cast<std::size_t>(K));
        for (Index j = 1; j <= K; ++j) {
          auto& rep = draw.partition[static_cast<std::size_t>(j - 1)];
          if (cp_state_[static_cast<std::size_t>(j - 1)]) {
            rep = cp_state_[static_cast<std::size_t>(j - 1)]->splits;
          } else if (vp_state_[static_cast<std::size_t>(j - 1)]) {
            for (const auto& c :
                 vp_state_[static_cast<std::size_t>(j - 1)]->centers) {
              rep.push_back(c[0]);
              rep.push_back(c[1]);
            }
          }
        }
        if (probit_) draw.z = z;
        chain.draws.push_back(std::move(draw));
      }
    }
    return chain;
  }

  Index inner_mh_steps = 10;

 private:
  void sweep_module(Index j, const VectorXd& e, VectorXd& theta_j,
                    double& sigma2_j, Rng& rng) {
    const auto& spec = specs_[static_cast<std::size_t>(j - 1)];
    switch (spec.kind) {
      case ModuleSpec::Kind::ConjugateGaussian: {
        const auto& st = conj_[static_cast<std::size_t>(j - 1)];
        const auto& X = design_.design(j);
        const VectorXd mu =
            st.llt.solve(st.precision_mean + X.transpose() * e);
        if (spec.noise.kind == NoisePrior::Kind::Fixed) {
          sigma2_j = spec.noise.value;
        } else {
          const double S =
              e.squaredNorm() + st.prior_quad - mu.dot(st.A * mu);
          sigma2_j = rng.inv_gamma(
              st.noise_shape + 0.5 * static_cast<double>(e.size()),
              st.noise_rate + 0.5 * S);
        }
        theta_j = mu + std::sqrt(sigma2_j) *
                           (st.cov_sqrt * rng.normal_vector(mu.size()));
        break;
      }
      case ModuleSpec::Kind::Changepoint: {
        auto& part = *cp_state_[static_cast<std::size_t>(j - 1)];
        const auto& cache = *prefix_[static_cast<std::size_t>(j - 1)];
        PartitionPrior prior{spec.prior, spec.noise};
        std::optional<double> lml;
        for (Index s = 0; s < inner_mh_steps; ++s) {
          auto res = mh_step_splits(part, design_.design(j), e, prior, spec.mh,
                                    rng, &cache, lml);
          part = std::move(res.state);
          lml = res.log_marginal;
        }
        const auto op = partition_to_operator(part);
        auto draw =
            sample_levels_given_partition(design_.design(j), e, op, prior, rng);
        sigma2_j = draw.sigma2;
        theta_j = std::move(draw.expanded);
        break;
      }
      case ModuleSpec::Kind::Voronoi: {
        auto& part = *vp_state_[static_cast<std::size_t>(j - 1)];
        PartitionPrior prior{spec.prior, spec.noise};
        std::optional<double> lml;
        for (Index s = 0; s < inner_mh_steps; ++s) {
          auto res = mh_step_centers(part, design_.design(j), e, prior, spec.mh,
                                     rng, lml);
          part = std::move(res.state);
          lml = res.log_marginal;
        }
        const auto op = partition_to_operator(part);
        auto draw =
            sample_levels_given_partition(design_.design(j), e, op, prior, rng);
        sigma2_j = draw.sigma2;
        theta_j = std::move(draw.expanded);
        break;
      }
    }
  }

  const MultiscaleDesign& design_;
  std::vector<ModuleSpec> specs_;
  bool probit_ = false;
  std::vector<detail::ConjugateModuleState> conj_;
  std::vector<std::optional<ColumnPrefixCache>> prefix_;
  std::vector<std::optional<ChangepointPartition>> cp_state_;
  std::vector<std::optional<VoronoiPartition>> vp_state_;
};

inline ModularChain run_modular_sampler(const MultiscaleDesign& design,
                                        const VectorXd& y,
                                        const std::vector<ModuleSpec>& specs,
                                        const SamplerOptions& options) {
  ModularSampler sampler(design, specs, /*probit=*/false);
  sampler.inner_mh_steps = options.inner_mh_steps;
  return sampler.run(y, options);
}

// Albert-Chib data augmentation: alternate truncated-normal latents
// Z_i ~ N(eta_i, 1) with sign matching y_i (left-truncated at zero when
// y_i = 1, right-truncated when y_i = 0) and one modular sweep on Z with
// every module noise variance fixed at one.
inline ModularChain run_probit_sampler(const MultiscaleDesign& design,
                                       const VectorXd& y,
                                       const std::vector<ModuleSpec>& specs,
                                       const SamplerOptions& options) {
  ModularSampler sampler(design, specs, /*probit=*/true);
  sampler.inner_mh_steps = options.inner_mh_steps;
  return sampler.run(y, options);
}

// Run independent chains with derived seeds, optionally in parallel.
// Draw order and content depend only on (seed, chain index).
inline std::vector<ModularChain> run_chains(
    const MultiscaleDesign& design, const VectorXd& y,
    const std::vector<ModuleSpec>& specs, const SamplerOptions& options,
    Index n_chains, Index max_threads, bool probit = false) {
  if (n_chains < 1) throw InvalidConfig("run_chains: need at least one chain");
  std::vector<ModularChain> chains(static_cast<std::size_t>(n_chains));
  const Index workers = std::max<Index>(
      1, std::min<Index>(n_chains, max_threads > 0 ? max_threads : 1));
  std::vector<std::exception_ptr> errors(
      static_cast<std::size_t>(n_chains), nullptr);

  const auto worker = [&](Index chain_begin) {
    for (Index c = chain_begin; c < n_chains; c += workers) {
      try {
        SamplerOptions o = options;
        o.seed = splitmix64(splitmix64(options.seed) ^
                            (0x9e3779b97f4a7c15ULL *
                             (static_cast<std::uint64_t>(c) + 1)));
        chains[static_cast<std::size_t>(c)] =
            probit ? run_probit_sampler(design, y, specs, o)
                   : run_modular_sampler(design, y, specs, o);
      } catch (...) {
        errors[static_cast<std::size_t>(c)] = std::current_exception();
      }
    }
  };

  if (workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (Index w = 0; w < workers; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return chains;
}

inline ModularChain merge_chains(const std::vector<ModularChain>& chains) {
  if (chains.empty()) throw InvalidInput("merge_chains: no chains");
  ModularChain merged = chains.front();
  for (std::size_t c = 1; c < chains.size(); ++c) {
    if (chains[c].dims != merged.dims || chains[c].probit != merged.probit) {
      throw InvalidInput("merge_chains: incompatible chains");
    }
    merged.draws.insert(merged.draws.end(), chains[c].draws.begin(),
                        chains[c].draws.end());
  }
  return merged;
}

// ---------------------------------------------------------------------------
// Posterior summaries
// ---------------------------------------------------------------------------

// Empirical quantile, inverse-CDF convention (the order statistic with rank
// ceil(q m)), so two-point symmetric chains report the full [-c, c] range.
inline double empirical_quantile(std::vector<double>& values, double q) {
  if (values.empty()) throw InvalidInput("empirical_quantile: no values");
  const auto m = static_cast<std::ptrdiff_t>(values.size());
  std::ptrdiff_t rank = static_cast<std::ptrdiff_t>(
      std::ceil(q * static_cast<double>(m)));
  rank = std::clamp<std::ptrdiff_t>(rank, 1, m);
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[static_cast<std::size_t>(rank - 1)];
}

struct ScaleSummary {
  VectorXd mean;
  VectorXd lower;
  VectorXd upper;
};

struct PosteriorSummary {
  double alpha = 0.05;
  std::vector<ScaleSummary> contribution;  // lifted theta_j at finest scale
  std::vector<ScaleSummary> accumulated;   // beta_j lifted to finest scale
  VectorXd sigma2_mean;
};

// Per-scale means and pointwise credible intervals of the lifted
// contributions, plus the accumulated coefficient at each level.
inline PosteriorSummary posterior_summaries(const ModularChain& chain,
                                            const MultiscaleDesign& design,
                                            double alpha = 0.05) {
  if (chain.draws.empty()) throw InvalidInput("posterior_summaries: empty chain");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("posterior_summaries: alpha must lie in (0,1)");
  }
  const Index K = design.levels();
  const Index pK = design.p(K);
  const auto T = static_cast<Index>(chain.draws.size());

  PosteriorSummary out;
  out.alpha = alpha;
  out.sigma2_mean = VectorXd::Zero(K);

  // lifted[j][i][t] and accumulated values per draw
  std::vector<MatrixXd> lifted(static_cast<std::size_t>(K));
  std::vector<MatrixXd> accum(static_cast<std::size_t>(K));
  for (Index j = 0; j < K; ++j) {
    lifted[static_cast<std::size_t>(j)].resize(pK, T);
    accum[static_cast<std::size_t>(j)].resize(pK, T);
  }
  for (Index t = 0; t < T; ++t) {
    const auto& draw = chain.draws[static_cast<std::size_t>(t)];
    VectorXd running = VectorXd::Zero(pK);
    for (Index j = 1; j <= K; ++j) {
      const VectorXd up =
          design.lift_to_finest(draw.theta[static_cast<std::size_t>(j - 1)], j);
      lifted[static_cast<std::size_t>(j - 1)].col(t) = up;
      running += up;
      accum[static_cast<std::size_t>(j - 1)].col(t) = running;
    }
    out.sigma2_mean += draw.sigma2;
  }
  out.sigma2_mean /= static_cast<double>(T);

  const auto summarize = [&](const MatrixXd& samples) {
    ScaleSummary s;
    s.mean = samples.rowwise().mean();
    s.lower.resize(pK);
    s.upper.resize(pK);
    std::vector<double> row(static_cast<std::size_t>(T));
    for (Index i = 0; i < pK; ++i) {
      for (Index t = 0; t < T; ++t) {
        row[static_cast<std::size_t>(t)] = samples(i, t);
      }
      std::vector<double> tmp = row;
      s.lower(i) = empirical_quantile(tmp, alpha / 2.0);
      tmp = row;
      s.upper(i) = empirical_quantile(tmp, 1.0 - alpha / 2.0);
    }
    return s;
  };

  for (Index j = 0; j < K; ++j) {
    out.contribution.push_back(summarize(lifted[static_cast<std::size_t>(j)]));
    out.accumulated.push_back(summarize(accum[static_cast<std::size_t>(j)]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Basic chain diagnostics
// ---------------------------------------------------------------------------

// Effective sample size via the initial positive autocorrelation sequence.
inline double effective_sample_size(const std::vector<double>& x) {
  const auto m = static_cast<Index>(x.size());
  if (m < 4) return static_cast<double>(m);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(m);
  if (var <= 0.0) return static_cast<double>(m);

  double rho_sum = 0.0;
  for (Index lag = 1; lag + 1 < m; lag += 2) {
    double g0 = 0.0, g1 = 0.0;
    for (Index t = 0; t + lag < m; ++t) {
      g0 += (x[static_cast<std::size_t>(t)] - mean) *
            (x[static_cast<std::size_t>(t + lag)] - mean);
    }
    for (Index t = 0; t + lag + 1 < m; ++t) {
      g1 += (x[static_cast<std::size_t>(t)] - mean) *
            (x[static_cast<std::size_t>(t + lag + 1)] - mean);
    }
    g0 /= static_cast<double>(m) * var;
    g1 /= static_cast<double>(m) * var;
    if (g0 + g1 <= 0.0) break;
    rho_sum += g0 + g1;
  }
  return static_cast<double>(m) / (1.0 + 2.0 * rho_sum);
}

// Split-half potential scale reduction across chains.
inline double split_rhat(const std::vector<std::vector<double>>& chains) {
  std::vector<std::vector<double>> halves;
  for (const auto& c : chains) {
    const std::size_t half = c.size() / 2;
    if (half < 2) continue;
    halves.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
    halves.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(half),
                        c.begin() + static_cast<std::ptrdiff_t>(2 * half));
  }
  if (halves.size() < 2) return 1.0;
  const double m = static_cast<double>(halves.size());
  const double len = static_cast<double>(halves.front().size());
  std::vector<double> means;
  double grand = 0.0, W = 0.0;
  for (const auto& h : halves) {
    double mu = 0.0;
    for (double v : h) mu += v;
    mu /= len;
    means.push_back(mu);
    grand += mu;
    double s2 = 0.0;
    for (double v : h) s2 += (v - mu) * (v - mu);
    W += s2 / (len - 1.0);
  }
  grand /= m;
  W /= m;
  double B = 0.0;
  for (double mu : means) B += (mu - grand) * (mu - grand);
  B *= len / (m - 1.0);
  if (W <= 0.0) return 1.0;
  const double var_plus = (len - 1.0) / len * W + B / len;
  return std::sqrt(var_plus / W);
}

}  // namespace bmms
