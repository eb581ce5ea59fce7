#include <doctest.h>

#include <sstream>

#include "sembase/errors.hpp"
#include "sembase/statistics.hpp"
#include "support.hpp"

using namespace sembase;
using testing::vec;

namespace {

ActivationMatrix random_activations(std::size_t n, std::size_t k, Rng& rng, double p = 0.4) {
  ActivationMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.uniform() < p;
  return a;
}

// Direct recount: fraction of samples where both i and j fire.
Eigen::MatrixXd recount(const ActivationMatrix& a) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(a.cols(), a.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      int both = 0;
      for (Eigen::Index s = 0; s < a.rows(); ++s) both += a(s, i) && a(s, j);
      p(i, j) = static_cast<double>(both) / static_cast<double>(a.rows());
    }
  return p;
}

// Normalized rows, TV distance, pair sum over N_K (N_K - 1); written out
// from the definitions without touching the library.
double tv(const Eigen::MatrixXd& coact, Eigen::Index i, Eigen::Index j) {
  const auto n = coact.cols();
  auto row = [&](Eigen::Index r) {
    Eigen::VectorXd q = coact.row(r).transpose();
    const double s = q.sum();
    if (s == 0.0) return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)).eval();
    return (q / s).eval();
  };
  double acc = 0.0;
  const Eigen::VectorXd a = row(i), b = row(j);
  for (Eigen::Index m = 0; m < n; ++m) acc += std::abs(a[m] - b[m]);
  return 0.5 * acc;
}

double triple_loop_diversity(const Eigen::MatrixXd& coact) {
  const auto n = coact.rows();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) sum += tv(coact, i, j);
  return sum / static_cast<double>(n * (n - 1));
}

ActivationProfile profile_with_coact(const Eigen::MatrixXd& coact) {
  ActivationProfile p;
  p.coact = coact;
  p.activations = ActivationMatrix::Zero(1, coact.cols());
  return p;
}

}  // namespace

TEST_CASE("active bases") {
  Coefficients c(4);
  c.set(0, 1.0);
  c.set(1, -0.2);
  c.set(2, 0.05);
  const auto act = active_bases(c, 0.1);
  CHECK(act == std::vector<char>{1, 1, 0, 0});
  CHECK(active_bases(Coefficients(3), 0.1) == std::vector<char>{0, 0, 0});
}

TEST_CASE("activation profile examples") {
  // every sample activates only base 0
  auto K = testing::bases({vec({1, 0}), vec({0, 1})});
  auto D = testing::samples({vec({2, 0}), vec({-1, 0}), vec({0.5, 0})});
  const auto p = activation_profile(D, K, CodingConfig{}, 0.1);
  CHECK(p.coact(0, 0) == 1.0);
  CHECK(p.coact(0, 1) == 0.0);
  CHECK(p.coact(1, 1) == 0.0);

  // A activates {0,1}, B activates {1}
  auto D2 = testing::samples({vec({1, 1}), vec({0, 1})});
  const auto q = activation_profile(D2, K, CodingConfig{}, 0.1);
  CHECK(q.coact(0, 1) == 0.5);
  CHECK(q.coact(1, 1) == 1.0);
  CHECK(q.coact(0, 0) == 0.5);

  CHECK_THROWS(activation_profile(D, K, CodingConfig{}, 0.0));
  CHECK_THROWS(activation_profile(D, K, CodingConfig{}, 1.5));
}

TEST_CASE("co-activation matches a direct recount") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_activations(1 + rng.below(12), 1 + rng.below(5), rng);
    const auto p = profile_from_activations(a, 0.1);
    CHECK(p.coact == recount(a));
    // symmetric and bounded by the marginals
    for (Eigen::Index i = 0; i < p.coact.rows(); ++i)
      for (Eigen::Index j = 0; j < p.coact.cols(); ++j) {
        CHECK(p.coact(i, j) == p.coact(j, i));
        CHECK(p.coact(i, j) <= std::min(p.coact(i, i), p.coact(j, j)));
      }
  }
}

TEST_CASE("activation profile matches recount over real codes") {
  Rng rng(13);
  std::vector<Eigen::VectorXd> vs, xs;
  for (int j = 0; j < 4; ++j) vs.push_back(testing::gaussian(5, rng));
  for (int i = 0; i < 9; ++i) xs.push_back(testing::gaussian(5, rng));
  auto K = testing::bases(vs);
  auto D = testing::samples(xs);
  const CodingConfig cfg{2, 0.0};
  const auto p = activation_profile(D, K, cfg, 0.3);
  ActivationMatrix a(9, 4);
  for (Eigen::Index i = 0; i < 9; ++i) {
    const auto c = encode(D[static_cast<std::size_t>(i)], K, cfg);
    double mx = 0;
    for (const auto& [j, v] : c.entries()) mx = std::max(mx, std::abs(v));
    for (Eigen::Index j = 0; j < 4; ++j) a(i, j) = std::abs(c.get(static_cast<std::size_t>(j))) > 0.3 * mx;
  }
  CHECK(p.activations == a);
  CHECK(p.coact == recount(a));
}

TEST_CASE("structural distance examples") {
  Eigen::MatrixXd same(2, 2);
  same << 0.5, 0.5, 0.5, 0.5;
  CHECK(structural_distance(profile_with_coact(same), 0, 1) == 0.0);

  Eigen::MatrixXd disjoint(2, 2);
  disjoint << 1, 0, 0, 1;
  CHECK(structural_distance(profile_with_coact(disjoint), 0, 1) == 1.0);

  Eigen::MatrixXd half(3, 3);
  half << 0.5, 0.5, 0, 0, 0.5, 0.5, 0.2, 0.2, 0.2;
  CHECK(structural_distance(profile_with_coact(half), 0, 1) == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS(structural_distance(profile_with_coact(half), 1, 1));
  CHECK_THROWS(structural_distance(profile_with_coact(half), 0, 3));
}

TEST_CASE("zero rows normalize to uniform") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0, 0;
  // (1,0) vs (0.5,0.5)
  CHECK(structural_distance(profile_with_coact(m), 0, 1) == doctest::Approx(0.5));
}

TEST_CASE("diversity examples") {
  Eigen::MatrixXd same = Eigen::MatrixXd::Constant(3, 3, 0.25);
  CHECK(diversity(profile_with_coact(same)) == 0.0);

  // N_K = 2 and distance 1 gives 1 / (2 * 1)
  Eigen::MatrixXd two(2, 2);
  two << 1, 0, 0, 1;
  CHECK(diversity(profile_with_coact(two)) == 0.5);

  Eigen::MatrixXd hand(3, 3);
  hand << 0.6, 0.2, 0.0, 0.2, 0.5, 0.1, 0.0, 0.1, 0.3;
  CHECK(diversity(profile_with_coact(hand)) == doctest::Approx(triple_loop_diversity(hand)).epsilon(1e-14));

  CHECK_THROWS(diversity(profile_with_coact(Eigen::MatrixXd::Ones(1, 1))));
}

TEST_CASE("diversity matches the triple loop on random profiles") {
  Rng rng(19);
  for (int t = 0; t < 100; ++t) {
    const auto a = random_activations(2 + rng.below(20), 2 + rng.below(5), rng, rng.uniform(0.1, 0.9));
    const auto p = profile_from_activations(a, 0.1);
    CHECK(diversity(p) == doctest::Approx(triple_loop_diversity(recount(a))).epsilon(1e-13));
  }
}

TEST_CASE("profile csv") {
  Eigen::MatrixXd two(2, 2);
  two << 1, 0, 0, 1;
  std::ostringstream os;
  write_profile_csv(os, profile_with_coact(two));
  CHECK(os.str().rfind("base,b0,b1\n", 0) == 0);
}
