#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bmms/conjugate.hpp"
#include "bmms/multiscale.hpp"
#include "bmms/rng.hpp"

namespace bmms {

// Piecewise-constant partition of columns 1..p into H contiguous pieces.
// splits holds t_1 < ... < t_{H-1} (1-based, in 1..p-1); piece h covers
// columns t_{h-1}+1 .. t_h with t_0 = 0 and t_H = p.
struct ChangepointPartition {
  Index p = 0;
  std::vector<Index> splits;

  Index pieces() const { return static_cast<Index>(splits.size()) + 1; }

  void validate(Index min_segment = 1) const {
    if (p < 1) throw InvalidPartition("changepoint partition: p < 1");
    Index prev = 0;
    for (Index t : splits) {
      if (t <= prev || t >= p) {
        throw InvalidPartition("changepoint partition: splits not increasing");
      }
      if (t - prev < min_segment) {
        throw InvalidPartition("changepoint partition: segment too short");
      }
      prev = t;
    }
    if (p - prev < min_segment) {
      throw InvalidPartition("changepoint partition: last segment too short");
    }
  }

  // Equal-sized starting partition for H pieces.
  static ChangepointPartition equal_spacing(Index p, Index pieces) {
    if (pieces < 1 || pieces > p) {
      throw InvalidPartition("changepoint partition: need 1 <= H <= p");
    }
    ChangepointPartition part;
    part.p = p;
    for (Index h = 1; h < pieces; ++h) {
      part.splits.push_back(h * p / pieces);
    }
    part.validate();
    return part;
  }

  friend bool operator==(const ChangepointPartition& a,
                         const ChangepointPartition& b) {
    return a.p == b.p && a.splits == b.splits;
  }
};

inline CoarseningOperator partition_to_operator(
    const ChangepointPartition& part) {
  part.validate();
  std::vector<Index> group_of(static_cast<std::size_t>(part.p));
  Index g = 0;
  for (Index col = 0; col < part.p; ++col) {
    while (g < static_cast<Index>(part.splits.size()) &&
           col >= part.splits[static_cast<std::size_t>(g)]) {
      ++g;
    }
    group_of[static_cast<std::size_t>(col)] = g;
  }
  return CoarseningOperator::from_groups(part.p, part.pieces(),
                                         std::move(group_of),
                                         CoarsenMode::Sum);
}

// Voronoi tessellation of a height x width pixel grid around an ordered list
// of distinct centers. Pixels are flattened row-major.
struct VoronoiPartition {
  Index height = 0;
  Index width = 0;
  std::vector<std::array<Index, 2>> centers;  // (row, col)

  Index cells() const { return static_cast<Index>(centers.size()); }
  Index pixels() const { return height * width; }

  void validate() const {
    if (height < 1 || width < 1) {
      throw InvalidPartition("voronoi partition: empty grid");
    }
    if (centers.empty()) {
      throw InvalidPartition("voronoi partition: no centers");
    }
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const auto& c = centers[i];
      if (c[0] < 0 || c[0] >= height || c[1] < 0 || c[1] >= width) {
        throw InvalidPartition("voronoi partition: center off grid");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (centers[j] == c) {
          throw InvalidPartition("voronoi partition: duplicate centers");
        }
      }
    }
  }

  // Deterministic starting layout: centers spread along the flattened grid.
  static VoronoiPartition spread(Index height, Index width, Index cells) {
    if (cells < 1 || cells > height * width) {
      throw InvalidPartition("voronoi partition: bad center count");
    }
    VoronoiPartition part;
    part.height = height;
    part.width = width;
    for (Index k = 0; k < cells; ++k) {
      const Index flat = ((2 * k + 1) * height * width) / (2 * cells);
      part.centers.push_back({flat / width, flat % width});
    }
    part.validate();
    return part;
  }

  friend bool operator==(const VoronoiPartition& a, const VoronoiPartition& b) {
    return a.height == b.height && a.width == b.width &&
           a.centers == b.centers;
  }
};

// Nearest-center assignment per pixel, squared Euclidean distance on integer
// coordinates, ties resolved to the lowest center index.
inline std::vector<Index> voronoi_assignment(const VoronoiPartition& part) {
  part.validate();
  std::vector<Index> assign(static_cast<std::size_t>(part.pixels()));
  for (Index r = 0; r < part.height; ++r) {
    for (Index c = 0; c < part.width; ++c) {
      Index best = 0;
      Index best_d = std::numeric_limits<Index>::max();
      for (Index k = 0; k < part.cells(); ++k) {
        const Index dr = r - part.centers[static_cast<std::size_t>(k)][0];
        const Index dc = c - part.centers[static_cast<std::size_t>(k)][1];
        const Index d = dr * dr + dc * dc;
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      assign[static_cast<std::size_t>(r * part.width + c)] = best;
    }
  }
  return assign;
}

inline CoarseningOperator partition_to_operator(const VoronoiPartition& part) {
  auto assign = voronoi_assignment(part);
  // from_groups throws InvalidPartition if some cell ends up empty.
  return CoarseningOperator::from_groups(part.pixels(), part.cells(),
                                         std::move(assign), CoarsenMode::Sum);
}

// Prior configuration for the step levels and the module noise.
struct PartitionPrior {
  GaussianPrior level_prior = GaussianPrior::unit_information();
  NoisePrior noise = NoisePrior::jeffreys();
};

// Marginal likelihood of the grouped design X * operator with the levels
// (and noise variance, unless fixed) integrated out analytically.
inline double partition_log_marginal(const MatrixXd& X,
                                     const VectorXd& residual,
                                     const CoarseningOperator& op,
                                     const PartitionPrior& prior) {
  if (X.cols() != op.rows()) {
    throw InvalidDimension("partition_log_marginal: operator size mismatch");
  }
  const MatrixXd grouped = downsample(X, op);
  return log_marginal_likelihood(grouped, residual, prior.level_prior,
                                 prior.noise);
}

inline double partition_log_marginal(const MatrixXd& X,
                                     const VectorXd& residual,
                                     const ChangepointPartition& part,
                                     const PartitionPrior& prior) {
  return partition_log_marginal(X, residual, partition_to_operator(part),
                                prior);
}

inline double partition_log_marginal(const MatrixXd& X,
                                     const VectorXd& residual,
                                     const VoronoiPartition& part,
                                     const PartitionPrior& prior) {
  return partition_log_marginal(X, residual, partition_to_operator(part),
                                prior);
}

// Column prefix sums, so a contiguous group column is one vector difference.
class ColumnPrefixCache {
 public:
  explicit ColumnPrefixCache(const MatrixXd& X)
      : prefix_(MatrixXd::Zero(X.rows(), X.cols() + 1)) {
    for (Index j = 0; j < X.cols(); ++j) {
      prefix_.col(j + 1) = prefix_.col(j) + X.col(j);
    }
  }

  Index cols() const { return prefix_.cols() - 1; }

  MatrixXd grouped(const ChangepointPartition& part) const {
    MatrixXd g(prefix_.rows(), part.pieces());
    Index lo = 0;
    for (Index h = 0; h < part.pieces(); ++h) {
      const Index hi =
          h < static_cast<Index>(part.splits.size())
              ? part.splits[static_cast<std::size_t>(h)]
              : part.p;
      g.col(h) = prefix_.col(hi) - prefix_.col(lo);
      lo = hi;
    }
    return g;
  }

 private:
  MatrixXd prefix_;
};

struct MhOptions {
  Index width = 3;        // 1D split proposal half-width
  Index min_segment = 1;  // 1D minimum piece length
  Index window = 2;       // 2D center proposal half-window
};

struct MhSplitResult {
  ChangepointPartition state;
  double log_marginal = 0.0;
  bool accepted = false;
};

// One Metropolis-Hastings update of a uniformly chosen split: propose a
// uniform nonzero integer move within +-width, reject proposals that break
// ordering or the minimum segment length (the window is symmetric, so no
// Hastings correction is needed), and accept by marginal-likelihood ratio.
inline MhSplitResult mh_step_splits(
    const ChangepointPartition& state, const MatrixXd& X,
    const VectorXd& residual, const PartitionPrior& prior,
    const MhOptions& options, Rng& rng,
    const ColumnPrefixCache* cache = nullptr,
    std::optional<double> current_log_marginal = std::nullopt) {
  const auto log_ml = [&](const ChangepointPartition& part) {
    if (cache != nullptr) {
      return log_marginal_likelihood(cache->grouped(part), residual,
                                     prior.level_prior, prior.noise);
    }
    return partition_log_marginal(X, residual, part, prior);
  };

  MhSplitResult result;
  result.state = state;
  result.log_marginal =
      current_log_marginal ? *current_log_marginal : log_ml(state);
  if (state.pieces() == 1) {
    result.accepted = true;  // nothing to move
    return result;
  }

  const Index k = rng.uniform_int(0, state.pieces() - 2);
  Index delta = rng.uniform_int(1, 2 * options.width);
  if (delta > options.width) delta = options.width - delta;  // +-1..width
  const Index proposed_t = state.splits[static_cast<std::size_t>(k)] + delta;

  const Index lower =
      (k == 0 ? 0 : state.splits[static_cast<std::size_t>(k - 1)]) +
      options.min_segment;
  const Index upper =
      (k + 1 < static_cast<Index>(state.splits.size())
           ? state.splits[static_cast<std::size_t>(k + 1)]
           : state.p) -
      options.min_segment;
  if (proposed_t < lower || proposed_t > upper) {
    return result;  // out-of-range proposal rejected
  }

  ChangepointPartition proposal = state;
  proposal.splits[static_cast<std::size_t>(k)] = proposed_t;
  const double proposed_ml = log_ml(proposal);
  if (std::log(rng.uniform_pos()) < proposed_ml - result.log_marginal) {
    result.state = std::move(proposal);
    result.log_marginal = proposed_ml;
    result.accepted = true;
  }
  return result;
}

struct MhCenterResult {
  VoronoiPartition state;
  double log_marginal = 0.0;
  bool accepted = false;
};

// One MH update of a uniformly chosen Voronoi center: propose a uniform
// pixel in the (2w+1)^2 window, rejecting off-grid pixels, duplicate centers
// and proposals that leave a cell empty; accept by marginal-likelihood ratio.
inline MhCenterResult mh_step_centers(
    const VoronoiPartition& state, const MatrixXd& X, const VectorXd& residual,
    const PartitionPrior& prior, const MhOptions& options, Rng& rng,
    std::optional<double> current_log_marginal = std::nullopt) {
  MhCenterResult result;
  result.state = state;
  result.log_marginal = current_log_marginal
                            ? *current_log_marginal
                            : partition_log_marginal(X, residual, state, prior);

  const Index k = rng.uniform_int(0, state.cells() - 1);
  const Index dr = rng.uniform_int(-options.window, options.window);
  const Index dc = rng.uniform_int(-options.window, options.window);
  const std::array<Index, 2> moved = {
      state.centers[static_cast<std::size_t>(k)][0] + dr,
      state.centers[static_cast<std::size_t>(k)][1] + dc};
  if (moved[0] < 0 || moved[0] >= state.height || moved[1] < 0 ||
      moved[1] >= state.width) {
    return result;
  }
  for (Index j = 0; j < state.cells(); ++j) {
    if (j != k && state.centers[static_cast<std::size_t>(j)] == moved) {
      return result;  // duplicate center rejected
    }
  }

  VoronoiPartition proposal = state;
  proposal.centers[static_cast<std::size_t>(k)] = moved;
  double proposed_ml;
  try {
    proposed_ml = partition_log_marginal(X, residual, proposal, prior);
  } catch (const InvalidPartition&) {
    return result;  // empty cell rejected
  }
  if (std::log(rng.uniform_pos()) < proposed_ml - result.log_marginal) {
    result.state = std::move(proposal);
    result.log_marginal = proposed_ml;
    result.accepted = true;
  }
  return result;
}

struct LevelDraw {
  VectorXd levels;
  double sigma2 = 1.0;
  VectorXd expanded;  // step vector at full resolution
};

// Conjugate draw of the step levels and (unless fixed) the noise variance,
// given the partition: sigma^2 from its inverse-gamma conditional with the
// levels marginalized out, then levels | sigma^2 from the Gaussian update.
inline LevelDraw sample_levels_given_partition(const MatrixXd& X,
                                               const VectorXd& residual,
                                               const CoarseningOperator& op,
                                               const PartitionPrior& prior,
                                               Rng& rng) {
  const MatrixXd grouped = downsample(X, op);
  const auto post =
      module_posterior(grouped, residual, prior.level_prior, prior.noise);
  LevelDraw draw;
  draw.sigma2 = post.draw_sigma2(rng);
  draw.levels = post.draw_theta(draw.sigma2, rng);
  draw.expanded = lift(draw.levels, op);
  return draw;
}

}  // namespace bmms
