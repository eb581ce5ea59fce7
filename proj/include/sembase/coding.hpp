#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "sembase/signal.hpp"

namespace sembase {

struct CodingConfig {
  // Max nonzero coefficients. Clamped to N_K at solve time, so the default
  // behaves as min(8, N_K).
  std::size_t sparsity = 8;
  // Tikhonov term added to the support Gram matrix; 0 means exact least squares.
  double ridge = 0.0;

  std::size_t effective_sparsity(std::size_t n_bases) const;
  void validate() const;
};

// Greedy residual-projection selection over the columns of `dictionary`
// (assumed unit norm) followed by least squares on the selected support.
// Ties in selection go to the lowest column index. Stops early once the
// residual is numerically orthogonal to every column.
Coefficients sparse_code(const Eigen::VectorXd& x, const Eigen::MatrixXd& dictionary,
                         std::size_t sparsity, double ridge = 0.0);

// Sum of c_n k_n; the residual is not part of the reconstruction.
Signal reconstruct(const Coefficients& coeffs, const BaseSet& K, const Grid& grid,
                   const std::string& modality = "");
Signal reconstruct(const Coefficients& coeffs, const BaseSet& K);

Coefficients encode(const Signal& x, const BaseSet& K, const CodingConfig& cfg);

// Mean squared error between x and its sparse reconstruction over K.
double cognitive_error(const Signal& x, const BaseSet& K, const CodingConfig& cfg);

double avg_cognitive_error(const SampleSet& D, const BaseSet& K, const CodingConfig& cfg);

// f_e: (1/d) * ||a - b||^2.
double mean_squared_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// residual_norm <= 1e-9 * ||x||
bool is_lossless(const Signal& x, const Coefficients& c);

}  // namespace sembase
