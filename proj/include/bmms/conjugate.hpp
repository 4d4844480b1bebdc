#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "bmms/errors.hpp"
#include "bmms/multiscale.hpp"
#include "bmms/rng.hpp"

namespace bmms {

namespace detail {

inline bool llt_ok(const Eigen::LLT<MatrixXd>& llt) {
  if (llt.info() != Eigen::Success) return false;
  // Eigen's pivot check misses NaN inputs; require a finite positive factor.
  const auto diag = llt.matrixLLT().diagonal();
  return diag.allFinite() && diag.minCoeff() > 0.0;
}

}  // namespace detail

// Cholesky with diagonal jitter fallback: on factorization failure add
// 1e-10 * trace/p to the diagonal and retry up to 3 times, escalating the
// jitter tenfold each attempt.
inline Eigen::LLT<MatrixXd> llt_with_jitter(const MatrixXd& A) {
  Eigen::LLT<MatrixXd> llt(A);
  if (detail::llt_ok(llt)) return llt;
  const Index p = A.rows();
  double jitter = 1e-10 * A.trace() / static_cast<double>(p);
  if (!(jitter > 0.0)) jitter = 1e-10;
  for (int attempt = 0; attempt < 3; ++attempt) {
    MatrixXd Aj = A;
    Aj.diagonal().array() += jitter;
    llt.compute(Aj);
    if (detail::llt_ok(llt)) return llt;
    jitter *= 10.0;
  }
  throw NumericalSingularity("matrix not positive definite after jitter");
}

inline double log_det_from_llt(const Eigen::LLT<MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// Prior theta ~ N(mean, sigma^2 * scale). Flat means scale^{-1} = 0;
// unit-information resolves to n (X'X)^{-1} from the module's own design.
struct GaussianPrior {
  enum class Kind { Proper, Flat, UnitInformation };

  Kind kind = Kind::UnitInformation;
  VectorXd mean;   // empty => zero vector
  MatrixXd scale;  // M, Proper only

  static GaussianPrior flat() {
    GaussianPrior g;
    g.kind = Kind::Flat;
    return g;
  }
  static GaussianPrior unit_information(VectorXd mean = VectorXd()) {
    GaussianPrior g;
    g.kind = Kind::UnitInformation;
    g.mean = std::move(mean);
    return g;
  }
  static GaussianPrior normal(VectorXd mean, MatrixXd scale) {
    GaussianPrior g;
    g.kind = Kind::Proper;
    g.mean = std::move(mean);
    g.scale = std::move(scale);
    return g;
  }
};

// Noise law for one module: proper inverse-gamma, the improper 1/sigma^2
// reference, or a fixed known value.
struct NoisePrior {
  enum class Kind { InverseGamma, Jeffreys, Fixed };

  Kind kind = Kind::Jeffreys;
  double shape = 0.0;
  double rate = 0.0;
  double value = 1.0;

  static NoisePrior inverse_gamma(double shape, double rate) {
    if (shape <= 0.0 || rate <= 0.0) {
      throw InvalidConfig("inverse-gamma noise prior requires shape,rate > 0");
    }
    NoisePrior n;
    n.kind = Kind::InverseGamma;
    n.shape = shape;
    n.rate = rate;
    return n;
  }
  static NoisePrior jeffreys() { return NoisePrior{}; }
  static NoisePrior fixed(double value) {
    if (value <= 0.0) throw InvalidConfig("fixed noise variance must be > 0");
    NoisePrior n;
    n.kind = Kind::Fixed;
    n.value = value;
    return n;
  }
};

namespace detail {

// Prior pieces resolved against a concrete design block.
struct ResolvedPrior {
  VectorXd mean;       // m
  MatrixXd precision;  // M^{-1} (zero for flat)
  double log_det_M = std::numeric_limits<double>::quiet_NaN();
  bool proper = false;
};

inline ResolvedPrior resolve_prior(const GaussianPrior& prior,
                                   const MatrixXd& X, const MatrixXd& XtX) {
  const Index p = X.cols();
  ResolvedPrior r;
  r.mean = prior.mean.size() == 0 ? VectorXd::Zero(p) : prior.mean;
  if (r.mean.size() != p) {
    throw InvalidDimension("prior mean length does not match design");
  }
  switch (prior.kind) {
    case GaussianPrior::Kind::Flat:
      r.precision = MatrixXd::Zero(p, p);
      r.proper = false;
      break;
    case GaussianPrior::Kind::UnitInformation: {
      const double n = static_cast<double>(X.rows());
      r.precision = XtX / n;
      const auto llt = llt_with_jitter(XtX);
      // M = n (X'X)^{-1}  =>  log|M| = p log n - log|X'X|
      r.log_det_M =
          static_cast<double>(p) * std::log(n) - log_det_from_llt(llt);
      r.proper = true;
      break;
    }
    case GaussianPrior::Kind::Proper: {
      if (prior.scale.rows() != p || prior.scale.cols() != p) {
        throw InvalidDimension("prior scale dimension does not match design");
      }
      const auto llt = llt_with_jitter(prior.scale);
      r.precision = llt.solve(MatrixXd::Identity(p, p));
      r.log_det_M = log_det_from_llt(llt);
      r.proper = true;
      break;
    }
  }
  return r;
}

}  // namespace detail

// Conditional posterior emitted by one Gaussian linear module:
// theta | sigma^2 ~ N(mean, sigma^2 * cov_factor), and the inverse-gamma
// law for sigma^2 unless the noise variance is fixed.
struct GaussianModulePosterior {
  VectorXd mean;        // mu
  MatrixXd cov_factor;  // Sigma
  MatrixXd cov_sqrt;    // B with B B' = Sigma
  double noise_shape = 0.0;
  double noise_rate = 0.0;
  bool noise_fixed = false;
  double noise_value = 1.0;
  double quad_form = 0.0;  // S = e'e + m'M^{-1}m - mu'Sigma^{-1}mu
  double log_det_sigma = 0.0;
  double log_det_M = std::numeric_limits<double>::quiet_NaN();

  double draw_sigma2(Rng& rng) const {
    return noise_fixed ? noise_value : rng.inv_gamma(noise_shape, noise_rate);
  }
  VectorXd draw_theta(double sigma2, Rng& rng) const {
    return mean + std::sqrt(sigma2) * (cov_sqrt * rng.normal_vector(mean.size()));
  }
};

// Closed-form conditional posterior for the module
//   residual = X theta + eps,  eps ~ N(0, sigma^2 I),
//   theta ~ N(m, sigma^2 M),   sigma^2 ~ noise prior.
// Sigma = (M^{-1} + X'X)^{-1}, mu = Sigma (M^{-1} m + X' residual),
// sigma^2 | residual ~ InvGamma(a + n/2, b + S/2) with
// S = e'e + m'M^{-1}m - mu'Sigma^{-1}mu (Jeffreys: a = b = 0).
inline GaussianModulePosterior module_posterior(const MatrixXd& X,
                                                const VectorXd& residual,
                                                const GaussianPrior& prior,
                                                const NoisePrior& noise) {
  if (X.rows() != residual.size()) {
    throw InvalidDimension("module_posterior: residual length mismatch");
  }
  const Index n = X.rows();
  const Index p = X.cols();
  const MatrixXd XtX = X.transpose() * X;
  const auto rp = detail::resolve_prior(prior, X, XtX);

  const MatrixXd A = rp.precision + XtX;
  const auto llt = llt_with_jitter(A);

  GaussianModulePosterior post;
  post.mean = llt.solve(rp.precision * rp.mean + X.transpose() * residual);
  if (!post.mean.allFinite()) {
    throw NumericalSingularity("module posterior mean is not finite");
  }
  MatrixXd sigma = llt.solve(MatrixXd::Identity(p, p));
  post.cov_factor = 0.5 * (sigma + sigma.transpose());
  // A = L L'  =>  Sigma = L'^{-1} L^{-1}, so L'^{-1} is a valid square root.
  post.cov_sqrt = llt.matrixU().solve(MatrixXd::Identity(p, p));
  post.log_det_sigma = -log_det_from_llt(llt);
  post.log_det_M = rp.log_det_M;

  const VectorXd dm = rp.mean;
  post.quad_form = residual.squaredNorm() + dm.dot(rp.precision * dm) -
                   post.mean.dot(A * post.mean);

  switch (noise.kind) {
    case NoisePrior::Kind::InverseGamma:
      post.noise_shape = noise.shape + 0.5 * static_cast<double>(n);
      post.noise_rate = noise.rate + 0.5 * post.quad_form;
      break;
    case NoisePrior::Kind::Jeffreys:
      post.noise_shape = 0.5 * static_cast<double>(n);
      post.noise_rate = 0.5 * post.quad_form;
      break;
    case NoisePrior::Kind::Fixed:
      post.noise_fixed = true;
      post.noise_value = noise.value;
      break;
  }
  return post;
}

// log integral of N(residual; X b, sigma^2 (I + X M X')) against the noise
// prior, i.e. the module's marginal likelihood with the coefficient (and,
// unless fixed, the noise variance) integrated out. Requires a proper
// coefficient prior; the Jeffreys case is normalized up to the usual
// improper constant, which cancels in likelihood ratios.
inline double log_marginal_likelihood(const MatrixXd& X,
                                      const VectorXd& residual,
                                      const GaussianPrior& prior,
                                      const NoisePrior& noise) {
  if (prior.kind == GaussianPrior::Kind::Flat) {
    throw InvalidConfig("log_marginal_likelihood requires a proper prior");
  }
  const auto post = module_posterior(X, residual, prior, noise);
  const double n = static_cast<double>(X.rows());
  const double half_logdet = 0.5 * (post.log_det_sigma - post.log_det_M);
  const double S = post.quad_form;
  switch (noise.kind) {
    case NoisePrior::Kind::Fixed: {
      const double s2 = noise.value;
      return -0.5 * n * std::log(2.0 * M_PI * s2) + half_logdet -
             0.5 * S / s2;
    }
    case NoisePrior::Kind::InverseGamma:
      return -0.5 * n * std::log(2.0 * M_PI) + half_logdet +
             std::lgamma(noise.shape + 0.5 * n) - std::lgamma(noise.shape) +
             noise.shape * std::log(noise.rate) -
             (noise.shape + 0.5 * n) * std::log(noise.rate + 0.5 * S);
    case NoisePrior::Kind::Jeffreys:
      return -0.5 * n * std::log(2.0 * M_PI) + half_logdet +
             std::lgamma(0.5 * n) - 0.5 * n * std::log(0.5 * S);
  }
  throw InvalidConfig("log_marginal_likelihood: unknown noise prior");
}

// Joint modular posterior of (theta_1, theta_2) given known noise variances.
// Block structure:
//   mean  = [mu_b1, mu_b2 - Q1 mu_b1]
//   cov   = [ s1 Sigma1,          -s1 Sigma1 Q1'            ]
//           [-s1 Q1 Sigma1,  s2 Sigma2 + s1 Q1 Sigma1 Q1'   ]
// with Q1 = Sigma2 X2'X1 and mu_bj the single-scale posterior means.
struct TwoScaleJoint {
  Index p1 = 0;
  Index p2 = 0;
  VectorXd mean;
  MatrixXd cov;
  MatrixXd cross;  // Q1
};

inline TwoScaleJoint two_scale_joint(const MatrixXd& X1, const MatrixXd& X2,
                                     const VectorXd& y,
                                     const GaussianPrior& prior1,
                                     const GaussianPrior& prior2,
                                     double sigma2_1, double sigma2_2) {
  if (X1.rows() != X2.rows() || X1.rows() != y.size()) {
    throw InvalidDimension("two_scale_joint: row mismatch");
  }
  if (sigma2_1 <= 0.0 || sigma2_2 <= 0.0) {
    throw InvalidInput("two_scale_joint: noise variances must be positive");
  }
  const auto post1 = module_posterior(X1, y, prior1, NoisePrior::fixed(1.0));
  const auto post2 = module_posterior(X2, y, prior2, NoisePrior::fixed(1.0));
  const Index p1 = X1.cols();
  const Index p2 = X2.cols();

  TwoScaleJoint joint;
  joint.p1 = p1;
  joint.p2 = p2;
  joint.cross = post2.cov_factor * (X2.transpose() * X1);

  joint.mean.resize(p1 + p2);
  joint.mean.head(p1) = post1.mean;
  joint.mean.tail(p2) = post2.mean - joint.cross * post1.mean;

  joint.cov.resize(p1 + p2, p1 + p2);
  const MatrixXd block11 = sigma2_1 * post1.cov_factor;
  const MatrixXd block21 = -sigma2_1 * (joint.cross * post1.cov_factor);
  joint.cov.topLeftCorner(p1, p1) = block11;
  joint.cov.bottomLeftCorner(p2, p1) = block21;
  joint.cov.topRightCorner(p1, p2) = block21.transpose();
  joint.cov.bottomRightCorner(p2, p2) =
      sigma2_2 * post2.cov_factor +
      sigma2_1 * joint.cross * post1.cov_factor * joint.cross.transpose();
  return joint;
}

// A scalar two-scale instance with known variances and proper scalar priors,
// small enough that every density in the modular-posterior factorization can
// be evaluated directly on a grid.
struct ScalarTwoScaleProblem {
  VectorXd x1;
  VectorXd x2;
  VectorXd y;
  double sigma2_1 = 1.0;
  double sigma2_2 = 1.0;
  double m1 = 0.0;
  double M1 = 1.0;
  double m2 = 0.0;
  double M2 = 1.0;
};

namespace detail {

inline double normal_logpdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * M_PI * var) - 0.5 * d * d / var;
}

inline double mvn_logpdf(const VectorXd& x, const VectorXd& mean,
                         const MatrixXd& cov) {
  const auto llt = llt_with_jitter(cov);
  const VectorXd d = x - mean;
  const VectorXd w = llt.matrixL().solve(d);
  return -0.5 * static_cast<double>(x.size()) * std::log(2.0 * M_PI) -
         0.5 * log_det_from_llt(llt) - 0.5 * w.squaredNorm();
}

}  // namespace detail

// Numerical check that the modular posterior equals the data-dependent-prior
// factorization
//   p_M(theta | y) = pi(theta1) pi(theta2)
//                    * p1(theta1|y,X1) / p2(theta1|y,X12)
//                    * p2(y|theta,X12) / p2(y|X12)
// over a grid of scalar (theta1, theta2) values; returns the maximum
// relative discrepancy between the two sides. Evaluated in log space.
inline double prop1_density_identity_check(const ScalarTwoScaleProblem& prob,
                                           const VectorXd& theta1_grid,
                                           const VectorXd& theta2_grid) {
  const Index n = prob.y.size();
  if (prob.x1.size() != n || prob.x2.size() != n) {
    throw InvalidDimension("prop1 check: predictor length mismatch");
  }
  const double s1 = prob.sigma2_1;
  const double s2 = prob.sigma2_2;

  // Module 1 posterior, scalar conjugate update.
  const double Sig1 = 1.0 / (1.0 / prob.M1 + prob.x1.squaredNorm());
  const double mu1 = Sig1 * (prob.m1 / prob.M1 + prob.x1.dot(prob.y));
  // Module 2 conditional pieces.
  const double Sig2 = 1.0 / (1.0 / prob.M2 + prob.x2.squaredNorm());

  // Full-model joint posterior of (theta1, theta2) under likelihood p2 and
  // the product prior, for the marginal p2(theta1 | y).
  MatrixXd W(n, 2);
  W.col(0) = prob.x1;
  W.col(1) = prob.x2;
  MatrixXd Vprior = MatrixXd::Zero(2, 2);
  Vprior(0, 0) = s1 * prob.M1;
  Vprior(1, 1) = s2 * prob.M2;
  VectorXd mprior(2);
  mprior << prob.m1, prob.m2;
  const MatrixXd Vinv = Vprior.inverse();
  const MatrixXd Ag = Vinv + W.transpose() * W / s2;
  const auto lltg = llt_with_jitter(Ag);
  const MatrixXd Sg = lltg.solve(MatrixXd::Identity(2, 2));
  const VectorXd mug = lltg.solve(Vinv * mprior + W.transpose() * prob.y / s2);

  // Full-model marginal likelihood p2(y | X12).
  const MatrixXd cov_y =
      s2 * MatrixXd::Identity(n, n) + W * Vprior * W.transpose();
  const double log_p2_y = detail::mvn_logpdf(prob.y, W * mprior, cov_y);

  double worst = 0.0;
  for (Index i = 0; i < theta1_grid.size(); ++i) {
    const double t1 = theta1_grid(i);
    const double mu2 =
        Sig2 * (prob.m2 / prob.M2 + prob.x2.dot(prob.y - t1 * prob.x1));
    for (Index j = 0; j < theta2_grid.size(); ++j) {
      const double t2 = theta2_grid(j);

      const double log_lhs = detail::normal_logpdf(t1, mu1, s1 * Sig1) +
                             detail::normal_logpdf(t2, mu2, s2 * Sig2);

      const VectorXd resid = prob.y - t1 * prob.x1 - t2 * prob.x2;
      const double log_lik = -0.5 * static_cast<double>(n) *
                                 std::log(2.0 * M_PI * s2) -
                             0.5 * resid.squaredNorm() / s2;
      const double log_rhs =
          detail::normal_logpdf(t1, prob.m1, s1 * prob.M1) +
          detail::normal_logpdf(t2, prob.m2, s2 * prob.M2) +
          detail::normal_logpdf(t1, mu1, s1 * Sig1) -
          detail::normal_logpdf(t1, mug(0), Sg(0, 0)) + log_lik - log_p2_y;

      worst = std::max(worst, std::abs(std::expm1(log_rhs - log_lhs)));
    }
  }
  return worst;
}

}  // namespace bmms
