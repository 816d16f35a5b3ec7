#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hdp/model.hpp"

namespace hdp::model {

namespace {

void check_training_data(const Matrix& x, const std::vector<bool>& y) {
  if (x.rows() != y.size()) throw ModelError("fit: row count does not match label count");
  if (x.rows() < 2) throw ModelError("fit: need at least two rows");
  const auto n_buggy = std::count(y.begin(), y.end(), true);
  if (n_buggy == 0 || static_cast<std::size_t>(n_buggy) == y.size())
    throw ModelError("fit: training labels must contain both classes");
}

double log_likelihood(const Eigen::VectorXd& eta, const Eigen::VectorXd& target) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // log(1 + e^eta) computed without overflow
    const double e = eta[i];
    const double softplus = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    ll += target[i] * e - softplus;
  }
  return ll;
}

}  // namespace

LogisticModel::LogisticModel(std::vector<double> means, std::vector<double> scales, double intercept,
                             std::vector<double> coefficients)
    : means_(std::move(means)),
      scales_(std::move(scales)),
      intercept_(intercept),
      coefficients_(std::move(coefficients)) {
  if (means_.size() != scales_.size() || means_.size() != coefficients_.size())
    throw ModelError("LogisticModel: inconsistent parameter sizes");
}

LogisticModel LogisticModel::fit(const Matrix& x, const std::vector<bool>& y, const LogisticParams& params) {
  check_training_data(x, y);
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto p = static_cast<Eigen::Index>(x.cols());

  LogisticModel model;
  model.means_.assign(x.cols(), 0.0);
  model.scales_.assign(x.cols(), 0.0);
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) mean += x(r, c);
    mean /= static_cast<double>(x.rows());
    double ss = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) ss += (x(r, c) - mean) * (x(r, c) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(x.rows()));
    model.means_[c] = mean;
    model.scales_[c] = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 0.0;
  }

  Eigen::MatrixXd design(n, p + 1);
  Eigen::VectorXd target(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    design(r, 0) = 1.0;
    for (Eigen::Index c = 0; c < p; ++c) {
      const auto cu = static_cast<std::size_t>(c);
      const double s = model.scales_[cu];
      design(r, c + 1) = s > 0.0 ? (x(static_cast<std::size_t>(r), cu) - model.means_[cu]) / s : 0.0;
    }
    target[r] = y[static_cast<std::size_t>(r)] ? 1.0 : 0.0;
  }

  const auto linear = [&](const Eigen::VectorXd& beta) {
    Eigen::VectorXd eta = design * beta;
    return eta.cwiseMax(-params.score_cap).cwiseMin(params.score_cap).eval();
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
  Eigen::VectorXd eta = linear(beta);
  double ll = log_likelihood(eta, target);
  bool converged = false;
  int iter = 0;
  while (iter < params.max_iterations) {
    ++iter;
    Eigen::VectorXd mu = (1.0 + (-eta.array()).exp()).inverse().matrix();
    Eigen::VectorXd w = (mu.array() * (1.0 - mu.array())).max(1e-12).matrix();
    Eigen::MatrixXd hessian = design.transpose() * w.asDiagonal() * design;
    hessian.diagonal().array() += params.ridge;
    const Eigen::VectorXd gradient = design.transpose() * (target - mu);
    const Eigen::VectorXd step = hessian.ldlt().solve(gradient);
    if (!step.allFinite()) break;

    // Step halving keeps the likelihood from decreasing.
    double scale = 1.0;
    Eigen::VectorXd candidate = beta + step;
    Eigen::VectorXd candidate_eta = linear(candidate);
    double candidate_ll = log_likelihood(candidate_eta, target);
    for (int h = 0; h < 20 && candidate_ll < ll - 1e-12 * std::abs(ll); ++h) {
      scale *= 0.5;
      candidate = beta + scale * step;
      candidate_eta = linear(candidate);
      candidate_ll = log_likelihood(candidate_eta, target);
    }
    const double change = (scale * step).cwiseAbs().maxCoeff();
    if (candidate_ll >= ll - 1e-12 * std::abs(ll)) {
      beta = std::move(candidate);
      eta = std::move(candidate_eta);
      ll = candidate_ll;
    }
    if (change < params.tolerance) {
      converged = true;
      break;
    }
  }

  model.intercept_ = beta[0];
  model.coefficients_.assign(beta.data() + 1, beta.data() + beta.size());
  model.converged_ = converged;
  model.iterations_ = iter;
  return model;
}

double LogisticModel::predict_proba(std::span<const double> row) const {
  if (row.size() != means_.size()) throw ModelError("predict_proba: feature count mismatch");
  double eta = intercept_;
  for (std::size_t c = 0; c < row.size(); ++c)
    if (scales_[c] > 0.0) eta += coefficients_[c] * (row[c] - means_[c]) / scales_[c];
  return 1.0 / (1.0 + std::exp(-eta));
}

std::vector<double> LogisticModel::predict_proba(const Matrix& x) const {
  if (x.cols() != means_.size()) throw ModelError("predict_proba: feature count mismatch");
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_proba(x.row(r));
  return out;
}

std::vector<double> LogisticModel::raw_coefficients() const {
  std::vector<double> raw(coefficients_.size() + 1, 0.0);
  raw[0] = intercept_;
  for (std::size_t c = 0; c < coefficients_.size(); ++c) {
    if (scales_[c] == 0.0) continue;
    raw[c + 1] = coefficients_[c] / scales_[c];
    raw[0] -= coefficients_[c] * means_[c] / scales_[c];
  }
  return raw;
}

}  // namespace hdp::model
