#include "sembase/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace sembase {

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidArgument("tau must lie in (0, 1]");
}

// summing in sorted order keeps results bit-identical under relabelling of bases
double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

Eigen::VectorXd normalized_row(const Eigen::MatrixXd& coact, std::size_t i) {
  Eigen::VectorXd row = coact.row(static_cast<Eigen::Index>(i)).transpose();
  const double s = sorted_sum(std::vector<double>(row.data(), row.data() + row.size()));
  if (s <= 0.0) return Eigen::VectorXd::Constant(row.size(), 1.0 / static_cast<double>(row.size()));
  return row / s;
}

}  // namespace

std::vector<char> active_bases(const Coefficients& c, double tau) {
  std::vector<char> out(c.length(), 0);
  double peak = 0.0;
  for (const auto& [i, v] : c.entries()) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return out;
  for (const auto& [i, v] : c.entries()) {
    if (std::abs(v) > tau * peak) out[i] = 1;
  }
  return out;
}

ActivationProfile profile_from_activations(const ActivationMatrix& activations, double tau) {
  check_tau(tau);
  const auto n = activations.rows();
  if (n == 0) throw InvalidArgument("activation profile needs at least one sample");
  ActivationProfile p;
  p.activations = activations;
  p.tau = tau;
  const Eigen::MatrixXd a = activations.cast<double>();
  p.coact = (a.transpose() * a) / static_cast<double>(n);
  return p;
}

ActivationProfile activation_profile(const SampleSet& D, const BaseSet& K, const CodingConfig& cfg,
                                     double tau) {
  check_tau(tau);
  ActivationMatrix act = ActivationMatrix::Zero(static_cast<Eigen::Index>(D.size()),
                                                static_cast<Eigen::Index>(K.size()));
  for (std::size_t i = 0; i < D.size(); ++i) {
    const auto flags = active_bases(encode(D[i], K, cfg), tau);
    for (std::size_t j = 0; j < flags.size(); ++j) {
      act(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = flags[j] != 0;
    }
  }
  return profile_from_activations(act, tau);
}

double structural_distance(const ActivationProfile& profile, std::size_t i, std::size_t j) {
  const auto nk = profile.n_bases();
  if (i >= nk || j >= nk) throw InvalidArgument("base index out of range");
  if (i == j) throw InvalidArgument("structural distance needs two distinct bases");
  const auto qi = normalized_row(profile.coact, i);
  const auto qj = normalized_row(profile.coact, j);
  const Eigen::VectorXd diff = (qi - qj).cwiseAbs();
  return 0.5 * sorted_sum(std::vector<double>(diff.data(), diff.data() + diff.size()));
}

double diversity(const ActivationProfile& profile) {
  const auto nk = profile.n_bases();
  if (nk < 2) throw InvalidArgument("diversity needs at least two bases");
  std::vector<double> d;
  for (std::size_t i = 0; i < nk; ++i) {
    for (std::size_t j = i + 1; j < nk; ++j) d.push_back(structural_distance(profile, i, j));
  }
  return sorted_sum(std::move(d)) / (static_cast<double>(nk) * static_cast<double>(nk - 1));
}

void write_profile_csv(std::ostream& os, const ActivationProfile& profile) {
  const auto nk = profile.n_bases();
  os << "base";
  for (std::size_t j = 0; j < nk; ++j) os << ",b" << j;
  os << '\n';
  os.precision(17);
  for (std::size_t i = 0; i < nk; ++i) {
    os << 'b' << i;
    for (std::size_t j = 0; j < nk; ++j) os << ',' << profile.coact(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    os << '\n';
  }
  os << "# tau=" << profile.tau << '\n';
}

}  // namespace sembase
