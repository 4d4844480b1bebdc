#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bmms/conjugate.hpp"
#include "bmms/multiscale.hpp"
#include "bmms/rng.hpp"

namespace bmms {

// ---------------------------------------------------------------------------
// Test functions (Donoho-Johnstone / Nason-Silverman), raw closed forms
// ---------------------------------------------------------------------------

enum class TestFunction { Doppler, Blocks, HeaviSine, Bumps, Ppoly };

inline TestFunction test_function_from_string(const std::string& name) {
  if (name == "doppler") return TestFunction::Doppler;
  if (name == "blocks") return TestFunction::Blocks;
  if (name == "heavisine") return TestFunction::HeaviSine;
  if (name == "bumps") return TestFunction::Bumps;
  if (name == "ppoly") return TestFunction::Ppoly;
  throw InvalidConfig("unknown test function: " + name);
}

inline std::string to_string(TestFunction f) {
  switch (f) {
    case TestFunction::Doppler: return "doppler";
    case TestFunction::Blocks: return "blocks";
    case TestFunction::HeaviSine: return "heavisine";
    case TestFunction::Bumps: return "bumps";
    case TestFunction::Ppoly: return "ppoly";
  }
  return "?";
}

namespace detail {

constexpr double kJumpT[11] = {0.10, 0.13, 0.15, 0.23, 0.25, 0.40,
                               0.44, 0.65, 0.76, 0.78, 0.81};
constexpr double kBlocksH[11] = {4.0, -5.0, 3.0, -4.0, 5.0, -4.2,
                                 2.1, 4.3, -3.1, 2.1, -4.2};
constexpr double kBumpsH[11] = {4.0, 5.0, 3.0, 4.0, 5.0, 4.2,
                                2.1, 4.3, 3.1, 5.1, 4.2};
constexpr double kBumpsW[11] = {0.005, 0.005, 0.006, 0.01, 0.01, 0.03,
                                0.01,  0.01,  0.005, 0.008, 0.005};

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace detail

// Evaluate one test function at t in [0,1].
inline double test_function_value(TestFunction f, double t) {
  switch (f) {
    case TestFunction::Blocks: {
      // Step kernel 1{t >= t_j}: the value at a jump belongs to the right
      // piece, so the discretized vector has exactly the 11 standard jumps.
      double v = 0.0;
      for (int j = 0; j < 11; ++j) {
        if (t >= detail::kJumpT[j]) v += detail::kBlocksH[j];
      }
      return v;
    }
    case TestFunction::Bumps: {
      double v = 0.0;
      for (int j = 0; j < 11; ++j) {
        const double u = std::abs(t - detail::kJumpT[j]) / detail::kBumpsW[j];
        v += detail::kBumpsH[j] * std::pow(1.0 + u, -4.0);
      }
      return v;
    }
    case TestFunction::HeaviSine:
      return 4.0 * std::sin(4.0 * M_PI * t) - detail::sgn(t - 0.3) -
             detail::sgn(0.72 - t);
    case TestFunction::Doppler:
      return std::sqrt(t * (1.0 - t)) *
             std::sin(2.0 * M_PI * 1.05 / (t + 0.05));
    case TestFunction::Ppoly: {
      if (t < 0.5) return 4.0 * t * t * (3.0 - 4.0 * t);
      if (t < 0.75) {
        return 4.0 / 3.0 * t * (4.0 * t * t - 10.0 * t + 7.0) - 1.5;
      }
      return 16.0 / 3.0 * t * (t - 1.0) * (t - 1.0);
    }
  }
  throw InvalidConfig("test_function_value: unknown function");
}

// Discretize on the regular grid t_i = i/p, i = 1..p.
inline VectorXd gen_test_function(TestFunction f, Index p) {
  if (p < 2) throw InvalidConfig("gen_test_function: p must be >= 2");
  VectorXd beta(p);
  for (Index i = 1; i <= p; ++i) {
    beta(i - 1) =
        test_function_value(f, static_cast<double>(i) / static_cast<double>(p));
  }
  return beta;
}

inline VectorXd scale_to_unit_max(const VectorXd& v) {
  const double m = v.cwiseAbs().maxCoeff();
  if (m <= 0.0) return v;
  return v / m;
}

// ---------------------------------------------------------------------------
// Simulation design
// ---------------------------------------------------------------------------

struct SimulationDesign {
  Index n = 60;
  Index p = 128;
  double rho = 0.98;       // correlation decay, 0 <= rho < 1
  double sigma_eps = 1.0;  // noise standard deviation
  TestFunction f = TestFunction::Blocks;
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1 || p < 1) throw InvalidConfig("simulation design: n, p >= 1");
    if (!(rho >= 0.0 && rho < 1.0)) {
      throw InvalidConfig("simulation design: need 0 <= rho < 1");
    }
    if (sigma_eps < 0.0) {
      throw InvalidConfig("simulation design: sigma must be >= 0");
    }
  }
};

// omega_{h,j} = exp(-(1-rho) |h-j|).
inline MatrixXd ar_moment_matrix(Index p, double rho) {
  MatrixXd omega(p, p);
  for (Index h = 0; h < p; ++h) {
    for (Index j = 0; j < p; ++j) {
      omega(h, j) = std::exp(-(1.0 - rho) * std::abs(static_cast<double>(h - j)));
    }
  }
  return omega;
}

struct SimData {
  MatrixXd X;
  VectorXd y;
  VectorXd beta;  // unit-max scaled truth
};

// Rows x_i ~ N(0, Omega) via Cholesky, beta the scaled test function,
// y = X beta + sigma_eps * eps.
inline SimData gen_design(const SimulationDesign& design) {
  design.validate();
  const MatrixXd omega = ar_moment_matrix(design.p, design.rho);
  const auto llt = llt_with_jitter(omega);
  const MatrixXd chol = llt.matrixL();
  Rng rng = Rng::for_chain(design.seed, 0);

  SimData data;
  data.beta = design.p >= 2
                  ? scale_to_unit_max(gen_test_function(design.f, design.p))
                  : VectorXd::Ones(design.p);
  data.X.resize(design.n, design.p);
  for (Index i = 0; i < design.n; ++i) {
    data.X.row(i) = (chol * rng.normal_vector(design.p)).transpose();
  }
  data.y = data.X * data.beta;
  for (Index i = 0; i < design.n; ++i) {
    data.y(i) += design.sigma_eps * rng.normal();
  }
  return data;
}

// Two-column design with (1/n) X'X equal to [[1, r], [r, 1]] exactly; used
// by the analytic two-scale fixtures. Requires even n.
inline MatrixXd toy_exact_design(Index n, double r) {
  if (n < 2 || n % 2 != 0) {
    throw InvalidConfig("toy_exact_design: n must be even and >= 2");
  }
  if (!(r > -1.0 && r < 1.0)) {
    throw InvalidConfig("toy_exact_design: need -1 < r < 1");
  }
  MatrixXd X(n, 2);
  const double s = std::sqrt(1.0 - r * r);
  for (Index i = 0; i < n; ++i) {
    const double u1 = 1.0;
    const double u2 = (i % 2 == 0) ? 1.0 : -1.0;
    X(i, 0) = u1;
    X(i, 1) = r * u1 + s * u2;
  }
  return X;
}

// ---------------------------------------------------------------------------
// Sequential least squares oracle
// ---------------------------------------------------------------------------

struct SequentialLsFit {
  std::vector<VectorXd> theta;  // per level
  std::vector<VectorXd> beta;   // accumulated, at each level's resolution
  std::vector<double> rss;      // in-sample RSS after each level
};

namespace detail {

inline VectorXd ols(const MatrixXd& X, const VectorXd& y) {
  const MatrixXd XtX = X.transpose() * X;
  Eigen::LLT<MatrixXd> llt(XtX);
  if (llt.info() != Eigen::Success) {
    throw NumericalSingularity("sequential LS: singular cross-product");
  }
  return llt.solve(X.transpose() * y);
}

}  // namespace detail

// Regress the running residual on each design in turn.
inline SequentialLsFit sequential_ls_oracle(const MultiscaleDesign& design,
                                            const VectorXd& y) {
  if (y.size() != design.n()) {
    throw InvalidDimension("sequential LS: response length mismatch");
  }
  SequentialLsFit fit;
  VectorXd e = y;
  std::vector<ScaleContribution> contribs;
  for (Index j = 1; j <= design.levels(); ++j) {
    const MatrixXd& X = design.design(j);
    VectorXd t = detail::ols(X, e);
    e -= X * t;
    contribs.push_back({j, t});
    fit.theta.push_back(std::move(t));
    fit.beta.push_back(accumulate(contribs, design, j));
    fit.rss.push_back(e.squaredNorm());
  }
  return fit;
}

// Same procedure through a fixed grouped operator per level (partition
// pipelines); each level's contribution is the lifted group fit.
inline SequentialLsFit sequential_ls_grouped(
    const MatrixXd& X, const VectorXd& y,
    const std::vector<CoarseningOperator>& group_ops) {
  if (y.size() != X.rows()) {
    throw InvalidDimension("sequential LS: response length mismatch");
  }
  SequentialLsFit fit;
  VectorXd e = y;
  VectorXd total = VectorXd::Zero(X.cols());
  for (const auto& op : group_ops) {
    if (op.rows() != X.cols()) {
      throw InvalidDimension("sequential LS: operator size mismatch");
    }
    const MatrixXd grouped = downsample(X, op);
    const VectorXd levels = detail::ols(grouped, e);
    const VectorXd theta = lift(levels, op);
    e -= X * theta;
    total += theta;
    fit.theta.push_back(theta);
    fit.beta.push_back(total);
    fit.rss.push_back(e.squaredNorm());
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Large-sample distribution
// ---------------------------------------------------------------------------

// Limit moments for a two-scale problem: Omega is the second-moment matrix
// at the data-generating resolution, b the true coefficient there, and the
// composite operators map that resolution to the two model scales.
struct AsymptoticSpec {
  MatrixXd omega;
  VectorXd b;
  CoarseningOperator to_scale1;  //  truth resolution -> scale 1
  CoarseningOperator to_scale2;  //  truth resolution -> scale 2
  double sigma2_1 = 1.0;
  double sigma2_2 = 1.0;
};

struct AsymptoticDistribution {
  VectorXd beta1_star;
  VectorXd beta2_star;
  VectorXd theta1_star;
  VectorXd theta2_star;
  MatrixXd cov;  // n-scaled covariance of (theta_1, theta_2)
};

// beta*_j = (L_j' Omega L_j)^{-1} L_j' Omega b; theta*_1 = beta*_1,
// theta*_2 = beta*_2 - Lt beta*_1 with Lt = (L_2' Omega L_2)^{-1} L_2'
// Omega L_1; covariance blocks s1 O1^{-1}, -s1 O1^{-1} Lt',
// s2 O2^{-1} + s1 Lt O1^{-1} Lt'.
inline AsymptoticDistribution asymptotic_distribution(
    const AsymptoticSpec& spec) {
  const Index p = spec.omega.rows();
  if (spec.omega.cols() != p || spec.b.size() != p ||
      spec.to_scale1.rows() != p || spec.to_scale2.rows() != p) {
    throw InvalidDimension("asymptotic_distribution: dimension mismatch");
  }
  const MatrixXd L1 = spec.to_scale1.dense();
  const MatrixXd L2 = spec.to_scale2.dense();
  const MatrixXd omega1 = L1.transpose() * spec.omega * L1;
  const MatrixXd omega2 = L2.transpose() * spec.omega * L2;
  const auto llt1 = llt_with_jitter(omega1);
  const auto llt2 = llt_with_jitter(omega2);

  AsymptoticDistribution out;
  out.beta1_star = llt1.solve(L1.transpose() * spec.omega * spec.b);
  out.beta2_star = llt2.solve(L2.transpose() * spec.omega * spec.b);
  const MatrixXd Lt = llt2.solve(L2.transpose() * spec.omega * L1);
  out.theta1_star = out.beta1_star;
  out.theta2_star = out.beta2_star - Lt * out.beta1_star;

  const Index p1 = L1.cols();
  const Index p2 = L2.cols();
  const MatrixXd o1_inv = llt1.solve(MatrixXd::Identity(p1, p1));
  const MatrixXd o2_inv = llt2.solve(MatrixXd::Identity(p2, p2));
  out.cov.resize(p1 + p2, p1 + p2);
  out.cov.topLeftCorner(p1, p1) = spec.sigma2_1 * o1_inv;
  const MatrixXd cross = -spec.sigma2_1 * (Lt * o1_inv);
  out.cov.bottomLeftCorner(p2, p1) = cross;
  out.cov.topRightCorner(p1, p2) = cross.transpose();
  out.cov.bottomRightCorner(p2, p2) =
      spec.sigma2_2 * o2_inv +
      spec.sigma2_1 * Lt * o1_inv * Lt.transpose();
  return out;
}

// Finite-sample frequentist MSE of the shrunk two-scale toy estimator
// mu^c = (1-cl) L0 mu0 + c l beta_hat with l = n/(n+1):
//   MSE = (1-cl)^2 ((l-2)^2 + l^2)(b1^2+b2^2)/4 + (1-cl)^2 l (l-2) b1 b2
//       + sigma^2/(n(1+r)) ((1-cl)(1+cl) + 2 c^2 l^2/(1-r)).
inline double toy_shrunk_mse(double c, double r, Index n, double beta1,
                             double beta2, double sigma2_1) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw InvalidInput("toy_shrunk_mse: c must lie in [0,1]");
  }
  if (!(r >= 0.0 && r < 1.0)) {
    throw InvalidInput("toy_shrunk_mse: need 0 <= r < 1 (variance diverges)");
  }
  if (n < 1) throw InvalidInput("toy_shrunk_mse: n must be >= 1");
  const double l = static_cast<double>(n) / (static_cast<double>(n) + 1.0);
  const double a = 1.0 - c * l;
  const double bias2 =
      a * a * ((l - 2.0) * (l - 2.0) + l * l) * (beta1 * beta1 + beta2 * beta2) /
          4.0 +
      a * a * l * (l - 2.0) * beta1 * beta2;
  const double variance = sigma2_1 / (static_cast<double>(n) * (1.0 + r)) *
                          (a * (1.0 + c * l) + 2.0 * c * c * l * l / (1.0 - r));
  return bias2 + variance;
}

// ---------------------------------------------------------------------------
// Evaluation metrics
// ---------------------------------------------------------------------------

struct MetricsReport {
  double beta_mse = std::numeric_limits<double>::quiet_NaN();
  double mape = std::numeric_limits<double>::quiet_NaN();
  VectorXd scale_norms;  // ||theta_j|| per level (finest-scale lift)
  VectorXd rss_ladder;   // in-sample RSS per accumulated level
};

// beta_by_level holds the accumulated coefficient per level, lifted to the
// finest resolution; the last entry is the full estimate.
inline MetricsReport compute_metrics(const std::vector<VectorXd>& beta_by_level,
                                     const VectorXd* beta_true,
                                     const MatrixXd& X_in, const VectorXd& y_in,
                                     const MatrixXd* X_out = nullptr,
                                     const VectorXd* y_out = nullptr) {
  if (beta_by_level.empty()) {
    throw InvalidInput("compute_metrics: no coefficient estimates");
  }
  const VectorXd& beta_hat = beta_by_level.back();
  if (X_in.cols() != beta_hat.size() || X_in.rows() != y_in.size()) {
    throw InvalidDimension("compute_metrics: in-sample dimension mismatch");
  }

  MetricsReport report;
  if (beta_true != nullptr) {
    if (beta_true->size() != beta_hat.size()) {
      throw InvalidDimension("compute_metrics: beta length mismatch");
    }
    report.beta_mse = (beta_hat - *beta_true).squaredNorm() /
                      static_cast<double>(beta_hat.size());
  }
  if (X_out != nullptr && y_out != nullptr) {
    if (X_out->cols() != beta_hat.size() || X_out->rows() != y_out->size()) {
      throw InvalidDimension("compute_metrics: out-sample dimension mismatch");
    }
    report.mape = (*y_out - *X_out * beta_hat).cwiseAbs().mean();
  }

  const auto K = static_cast<Index>(beta_by_level.size());
  report.scale_norms.resize(K);
  report.rss_ladder.resize(K);
  VectorXd prev = VectorXd::Zero(beta_hat.size());
  for (Index j = 0; j < K; ++j) {
    const VectorXd& b = beta_by_level[static_cast<std::size_t>(j)];
    if (b.size() != beta_hat.size()) {
      throw InvalidDimension("compute_metrics: level estimates must share size");
    }
    report.scale_norms(j) = (b - prev).norm();
    report.rss_ladder(j) = (y_in - X_in * b).squaredNorm();
    prev = b;
  }
  return report;
}

}  // namespace bmms
