#include "sembase/coding.hpp"

#include <algorithm>
#include <cmath>

namespace sembase {

namespace {

// Relative to ||x||: correlations or residuals below this are treated as zero.
constexpr double kStopTolerance = 1e-12;

void check_dims(const Signal& x, const BaseSet& K) {
  if (x.dim() != K.dim()) {
    throw DimensionError("signal dimension " + std::to_string(x.dim()) +
                         " does not match base dimension " + std::to_string(K.dim()));
  }
}

}  // namespace

std::size_t CodingConfig::effective_sparsity(std::size_t n_bases) const {
  return std::min(sparsity, n_bases);
}

void CodingConfig::validate() const {
  if (sparsity < 1) throw ConfigError("coding.sparsity must be >= 1");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw ConfigError("coding.ridge must be >= 0");
}

Coefficients sparse_code(const Eigen::VectorXd& x, const Eigen::MatrixXd& dictionary,
                         std::size_t sparsity, double ridge) {
  if (x.size() != dictionary.rows()) throw DimensionError("signal and dictionary rows differ");
  const auto n = static_cast<std::size_t>(dictionary.cols());
  Coefficients out(n);
  const double xnorm = x.norm();
  if (xnorm == 0.0 || n == 0) return out;
  const std::size_t s = std::min(sparsity, n);

  std::vector<Eigen::Index> support;
  std::vector<char> used(n, 0);
  Eigen::VectorXd residual = x;
  Eigen::VectorXd coef;
  const double floor = kStopTolerance * xnorm;

  while (support.size() < s && residual.norm() > floor) {
    const Eigen::VectorXd corr = dictionary.transpose() * residual;
    Eigen::Index best = -1;
    double best_abs = floor;
    for (Eigen::Index j = 0; j < corr.size(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double a = std::abs(corr[j]);
      if (a > best_abs) {
        best_abs = a;
        best = j;
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = 1;
    support.push_back(best);

    Eigen::MatrixXd sub(dictionary.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = dictionary.col(support[k]);
    if (ridge > 0.0) {
      Eigen::MatrixXd gram = sub.transpose() * sub;
      gram.diagonal().array() += ridge;
      coef = gram.ldlt().solve(sub.transpose() * x);
    } else {
      coef = sub.colPivHouseholderQr().solve(x);
    }
    residual = x - sub * coef;
  }

  for (std::size_t k = 0; k < support.size(); ++k) {
    out.set(static_cast<std::size_t>(support[k]), coef[static_cast<Eigen::Index>(k)]);
  }
  out.set_residual_norm(residual.norm());
  return out;
}

Signal reconstruct(const Coefficients& coeffs, const BaseSet& K, const Grid& grid,
                   const std::string& modality) {
  if (coeffs.length() != K.size()) {
    throw DimensionError("coefficient length " + std::to_string(coeffs.length()) +
                         " does not match base count " + std::to_string(K.size()));
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K.dim()));
  for (const auto& [i, c] : coeffs.entries()) v += c * K.matrix().col(static_cast<Eigen::Index>(i));
  return make_signal(v, grid, modality);
}

Signal reconstruct(const Coefficients& coeffs, const BaseSet& K) {
  return reconstruct(coeffs, K, Grid{{K.dim()}});
}

Coefficients encode(const Signal& x, const BaseSet& K, const CodingConfig& cfg) {
  check_dims(x, K);
  return sparse_code(x.values(), K.matrix(), cfg.effective_sparsity(K.size()), cfg.ridge);
}

double mean_squared_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw DimensionError("mse operands differ in length");
  if (a.size() == 0) return 0.0;
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double cognitive_error(const Signal& x, const BaseSet& K, const CodingConfig& cfg) {
  const auto c = encode(x, K, cfg);
  const auto y = reconstruct(c, K, x.grid(), x.modality());
  return mean_squared_error(x.values(), y.values());
}

double avg_cognitive_error(const SampleSet& D, const BaseSet& K, const CodingConfig& cfg) {
  double sum = 0.0;
  for (const auto& x : D.samples()) sum += cognitive_error(x, K, cfg);
  return sum / static_cast<double>(D.size());
}

bool is_lossless(const Signal& x, const Coefficients& c) {
  return c.residual_norm() <= 1e-9 * x.values().norm();
}

}  // namespace sembase
