#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "sembase/compose.hpp"
#include "sembase/errors.hpp"
#include "sembase/hierarchy.hpp"
#include "sembase/synth.hpp"
#include "support.hpp"

using namespace sembase;
using testing::vec;

namespace {

struct Tiny {
  BaseSet K = testing::bases({vec({1, 0}), vec({0, 1})});
  SampleSet D = testing::samples({vec({1, 0}), vec({3, 0}), vec({0, 1}), vec({0, 2})});
};

Coefficients code(std::size_t n, std::initializer_list<std::pair<std::size_t, double>> e) {
  Coefficients c(n);
  for (auto [j, v] : e) c.set(j, v);
  return c;
}

std::filesystem::path temp_journal(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("sembase_" + name + ".jsonl");
  std::filesystem::remove(p);
  return p;
}

}  // namespace

TEST_CASE("compose round trip and zero") {
  Rng rng(1);
  std::vector<Eigen::VectorXd> vs, xs;
  for (int j = 0; j < 4; ++j) vs.push_back(testing::gaussian(6, rng));
  for (int i = 0; i < 10; ++i) xs.push_back(testing::gaussian(6, rng));
  auto K = testing::bases(vs);
  for (const auto& x : xs) {
    const auto c = encode(testing::sig(x), K, CodingConfig{2, 0.0});
    CHECK((compose(c, K).values() - x).norm() <= c.residual_norm() + 1e-12);
  }
  CHECK(compose(Coefficients(4), K).values().isZero(0.0));
  CHECK_THROWS_AS(compose(Coefficients(3), K), DimensionError);
}

TEST_CASE("scaling one coefficient changes exactly that component") {
  auto data = synth(json{{"generator", "hierarchy"}, {"parents", 2}, {"children", 2}, {"d", 32}, {"N", 128}}, 1);
  const auto& D = data.corpus.samples;
  PipelineConfig cfg;
  cfg.coding.sparsity = 2;
  cfg.complexity.lambda = 256;
  cfg.decompose.epsilon = 0.015;
  cfg.decompose.n_max = 2;
  cfg.decompose.seed = 1;
  const auto tree = build_hierarchy(D, cfg);
  REQUIRE(tree.depth() >= 2);
  const auto& K = tree.leaf_set();

  // a parent ("car") sample uses two leaves; scale one of them by 1.5
  std::size_t pick = D.size();
  for (std::size_t i = 0; i < D.size(); ++i)
    if (!data.truth["labels"][i].contains("child")) {
      pick = i;
      break;
    }
  REQUIRE(pick < D.size());
  const auto c = encode(D[pick], K, cfg.coding);
  REQUIRE(c.nnz() == 2);
  const std::size_t wheel = c.entries().begin()->first;
  Coefficients spec = c;
  spec.set(wheel, 1.5 * c.get(wheel));
  const Eigen::VectorXd diff = compose(spec, K).values() - compose(c, K).values();
  const Eigen::VectorXd k = K[wheel].vector;
  CHECK((diff - diff.dot(k) * k).norm() <= 1e-12);
  CHECK(diff.dot(k) == doctest::Approx(0.5 * c.get(wheel)).epsilon(1e-12));
  const Eigen::VectorXd made = compose(spec, K).values();
  for (const auto& x : D.samples()) CHECK((x.values() - made).norm() > 1e-6);
}

TEST_CASE("verify") {
  Tiny t;
  const auto v = build_validator(t.D, t.K, CodingConfig{}, ValidatorMode::CoefficientRange, 0.5);
  // exact training sample
  const auto c1 = encode(t.D[1], t.K, CodingConfig{});
  auto r = verify(compose(c1, t.K), c1, v, t.D);
  CHECK(r.verified);
  CHECK_FALSE(r.novel);

  // 10x beyond the observed range
  const auto big = code(2, {{0, 30.0}});
  CHECK_FALSE(verify(compose(big, t.K), big, v, t.D).verified);

  // midpoint of the codes of (1,0) and (3,0): (2,0), nearest training
  // distance is |2-1| = |2-3| = 1 > 0.5
  const auto mid = code(2, {{0, 2.0}});
  const Eigen::VectorXd m = compose(mid, t.K).values();
  double nearest = 1e9;
  for (const auto& x : t.D.samples()) nearest = std::min(nearest, (x.values() - m).norm());
  CHECK(nearest == doctest::Approx(1.0));
  r = verify(compose(mid, t.K), mid, v, t.D);
  CHECK(r.verified);
  CHECK(r.novel);
}

TEST_CASE("verify modes and mismatches") {
  Tiny t;
  auto bounds = build_validator(t.D, t.K, CodingConfig{}, ValidatorMode::SignalBounds, 0.1);
  const auto inside = code(2, {{0, 2.0}});
  const auto outside = code(2, {{1, -1.0}});
  CHECK(verify(compose(inside, t.K), inside, bounds, t.D).verified);
  CHECK_FALSE(verify(compose(outside, t.K), outside, bounds, t.D).verified);

  auto ext = build_validator(t.D, t.K, CodingConfig{}, ValidatorMode::External, 0.1);
  CHECK_THROWS(verify(compose(inside, t.K), inside, ext, t.D));
  ext.external = [](const Signal& s, const Coefficients&) { return s.values()[0] > 1.5; };
  CHECK(verify(compose(inside, t.K), inside, ext, t.D).verified);

  auto other = testing::samples({vec({5, 5})});
  CHECK_THROWS(verify(compose(inside, t.K), inside, bounds, other));
}

TEST_CASE("default novelty threshold is the median nearest-neighbour distance") {
  Tiny t;
  // nearest neighbour distances: sqrt2, 2, 1, 1 -> median (1 + sqrt2) / 2
  const double want = 0.5 * (1.0 + std::sqrt(2.0));
  CHECK(median_nn_distance(t.D) == doctest::Approx(want));
  CHECK(build_validator(t.D, t.K, CodingConfig{}).theta == doctest::Approx(want));
}

TEST_CASE("discover") {
  Tiny t;
  const auto v = build_validator(t.D, t.K, CodingConfig{}, ValidatorMode::CoefficientRange, 0.5);
  KnowledgeLog log;
  CHECK_FALSE(discover(encode(t.D[0], t.K, CodingConfig{}), t.K, v, t.D, log).has_value());
  CHECK_FALSE(discover(code(2, {{0, 30.0}}), t.K, v, t.D, log).has_value());
  const auto mid = code(2, {{0, 2.0}});
  const auto rec = discover(mid, t.K, v, t.D, log);
  REQUIRE(rec.has_value());
  CHECK(rec->verified);
  CHECK(rec->novel);
  CHECK(log.size() == 1);
  CHECK_FALSE(discover(mid, t.K, v, t.D, log).has_value());
  // equal after quantization of the key
  CHECK_FALSE(discover(code(2, {{0, 2.0 + 1e-12}}), t.K, v, t.D, log).has_value());
  CHECK(log.size() == 1);
  for (const auto& r : log.records()) CHECK((r.verified && r.novel));
}

TEST_CASE("knowledge log rejects unverified records") {
  KnowledgeLog log;
  KnowledgeRecord r{Coefficients(1), testing::sig(vec({1})), true, false, "", "", "", "k"};
  CHECK_THROWS(log.append(r));
}

TEST_CASE("knowledge journal persists and reloads") {
  Tiny t;
  const auto path = temp_journal("reload");
  // (0, 1.5) is 0.5 from its nearest training sample
  const auto v = build_validator(t.D, t.K, CodingConfig{}, ValidatorMode::CoefficientRange, 0.4);
  {
    KnowledgeLog log(path.string());
    CHECK(discover(code(2, {{0, 2.0}}), t.K, v, t.D, log).has_value());
    CHECK(discover(code(2, {{1, 1.5}}), t.K, v, t.D, log).has_value());
  }
  KnowledgeLog again(path.string());
  CHECK(again.size() == 2);
  CHECK_FALSE(discover(code(2, {{0, 2.0}}), t.K, v, t.D, again).has_value());
  CHECK(again.size() == 2);
  std::filesystem::remove(path);
}

TEST_CASE("validator mode names") {
  for (auto m : {ValidatorMode::CoefficientRange, ValidatorMode::SignalBounds, ValidatorMode::External})
    CHECK(validator_mode_from_string(to_string(m)) == m);
  CHECK_THROWS(validator_mode_from_string("vibes"));
}
