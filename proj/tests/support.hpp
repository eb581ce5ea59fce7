#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sembase/rng.hpp"
#include "sembase/signal.hpp"

namespace testing {

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline sembase::Signal sig(const Eigen::VectorXd& v, const std::string& id = "x") {
  return sembase::Signal(v, sembase::Grid{{static_cast<std::size_t>(v.size())}}, "test", id);
}

inline sembase::SampleSet samples(const std::vector<Eigen::VectorXd>& rows, std::uint64_t seed = 0) {
  std::vector<sembase::Signal> s;
  for (std::size_t i = 0; i < rows.size(); ++i) s.push_back(sig(rows[i], "s" + std::to_string(i)));
  return sembase::SampleSet(std::move(s), seed);
}

inline sembase::BaseSet bases(const std::vector<Eigen::VectorXd>& vs, int bits = 16) {
  std::vector<sembase::SemanticBase> b;
  for (const auto& v : vs) b.push_back(sembase::normalize_base(v));
  return sembase::BaseSet(std::move(b), bits);
}

inline Eigen::VectorXd gaussian(std::size_t d, sembase::Rng& rng) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  return v;
}

}  // namespace testing
