#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "sembase/coding.hpp"
#include "sembase/signal.hpp"

namespace sembase {

using ActivationMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct ActivationProfile {
  ActivationMatrix activations;  // N x N_K
  Eigen::MatrixXd coact;         // N_K x N_K co-activation probabilities
  double tau = 0.1;

  std::size_t n_bases() const { return static_cast<std::size_t>(coact.rows()); }
};

// Base j is active in a code iff |c_j| > tau * max |c|.
std::vector<char> active_bases(const Coefficients& c, double tau);

// Co-activation probabilities recomputed from a boolean activation matrix.
ActivationProfile profile_from_activations(const ActivationMatrix& activations, double tau);

ActivationProfile activation_profile(const SampleSet& D, const BaseSet& K, const CodingConfig& cfg,
                                     double tau = 0.1);

// Total variation between the normalized co-activation rows of bases i and j
// (1-Wasserstein under the discrete ground metric). All-zero rows normalize
// to uniform.
double structural_distance(const ActivationProfile& profile, std::size_t i, std::size_t j);

// Sum over unordered pairs of structural distances divided by N_K (N_K - 1).
double diversity(const ActivationProfile& profile);

// CSV: header "base,b0,b1,...", one row per base, then the tau used.
void write_profile_csv(std::ostream& os, const ActivationProfile& profile);

}  // namespace sembase
