#include <doctest.h>

#include "sembase/complexity.hpp"
#include "support.hpp"

using namespace sembase;
using testing::vec;

namespace {

std::vector<Eigen::VectorXd> unit_axes(std::size_t n, std::size_t d) {
  std::vector<Eigen::VectorXd> out;
  for (std::size_t j = 0; j < n; ++j) out.push_back(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j)));
  return out;
}

}  // namespace

TEST_CASE("storage volume") {
  CHECK(storage_volume(testing::bases(unit_axes(2, 4)), ComplexityConfig{16, 16, 1.0}) == 128.0);
  CHECK(storage_volume(testing::bases(unit_axes(4, 4)), ComplexityConfig{16, 16, 1.0}) == 256.0);
  CHECK(storage_volume(testing::bases(unit_axes(3, 1024)), ComplexityConfig{8, 16, 1.0}) == 24576.0);
}

TEST_CASE("storage is permutation invariant") {
  auto a = testing::bases({vec({1, 0, 0}), vec({0, 1, 1}), vec({1, 1, 1})});
  auto b = testing::bases({vec({1, 1, 1}), vec({1, 0, 0}), vec({0, 1, 1})});
  CHECK(storage_volume(a, {}) == storage_volume(b, {}));
}

TEST_CASE("index bits") {
  CHECK(index_bits(1) == 0);
  CHECK(index_bits(2) == 1);
  CHECK(index_bits(3) == 2);
  CHECK(index_bits(8) == 3);
  CHECK(index_bits(9) == 4);
}

TEST_CASE("representation complexity") {
  auto K8 = testing::bases(unit_axes(8, 8));
  const ComplexityConfig cfg{16, 16, 1.0};
  CHECK(representation_complexity(testing::sig(Eigen::VectorXd::Zero(8)), K8, CodingConfig{}, cfg) == 0.0);
  CHECK(representation_complexity(testing::sig(3.0 * Eigen::VectorXd::Unit(8, 5)), K8, CodingConfig{}, cfg) == 19.0);

  Rng rng(2);
  std::vector<Eigen::VectorXd> vs;
  for (int j = 0; j < 16; ++j) vs.push_back(testing::gaussian(10, rng));
  auto K16 = testing::bases(vs);
  for (int t = 0; t < 20; ++t) {
    CHECK(representation_complexity(testing::sig(testing::gaussian(10, rng)), K16, CodingConfig{4, 0.0}, cfg) <= 80.0);
  }
}

TEST_CASE("objective") {
  Rng rng(8);
  std::vector<Eigen::VectorXd> vs, xs;
  for (int j = 0; j < 3; ++j) vs.push_back(testing::gaussian(4, rng));
  for (int i = 0; i < 7; ++i) xs.push_back(testing::gaussian(4, rng));
  auto K = testing::bases(vs);
  auto D = testing::samples(xs);
  const CodingConfig coding{2, 0.0};

  const auto zero = objective(D, K, coding, ComplexityConfig{16, 16, 0.0});
  CHECK(zero.total == storage_volume(K, {}));

  const ComplexityConfig cfg{16, 12, 2.5};
  auto single = testing::samples({xs[0]});
  CHECK(objective(single, K, coding, cfg).total ==
        doctest::Approx(storage_volume(K, cfg) + 2.5 * representation_complexity(single[0], K, coding, cfg)));

  // independent summation: nnz per code times (index bits + value bits)
  double bits = 0.0;
  for (const auto& x : xs) {
    const auto c = encode(testing::sig(x), K, coding);
    bits += static_cast<double>(c.nnz()) * (2.0 + 12.0);
  }
  const auto o = objective(D, K, coding, cfg);
  CHECK(o.storage == 3.0 * 4.0 * 16.0);
  CHECK(o.avg_complexity == doctest::Approx(bits / 7.0).epsilon(1e-14));
  CHECK(o.total == doctest::Approx(o.storage + 2.5 * bits / 7.0).epsilon(1e-14));

  // nondecreasing in lambda
  double prev = -1.0;
  for (double lambda : {0.0, 0.5, 1.0, 4.0, 100.0}) {
    const double v = objective(D, K, coding, ComplexityConfig{16, 16, lambda}).total;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("complexity config validation") {
  CHECK_THROWS(ComplexityConfig{0, 16, 1.0}.validate());
  CHECK_THROWS(ComplexityConfig{16, 0, 1.0}.validate());
  CHECK_THROWS(ComplexityConfig{16, 16, -1.0}.validate());
}
