#include "sembase/synth.hpp"

#include <numeric>
#include <set>

#include "sembase/rng.hpp"

namespace sembase {

namespace {

class Params {
 public:
  explicit Params(const json& spec) : spec_(spec) {
    if (!spec_.is_object()) throw ConfigError("generator spec must be a JSON object");
    seen_.insert("generator");
  }

  std::size_t count(const char* key, std::optional<std::size_t> fallback = std::nullopt) {
    seen_.insert(key);
    if (!spec_.contains(key)) {
      if (fallback) return *fallback;
      throw ConfigError(std::string("generator parameter '") + key + "' is required");
    }
    const auto& v = spec_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(std::string("'") + key + "' must be a nonnegative integer");
    return v.get<std::size_t>();
  }

  double real(const char* key, double fallback) {
    seen_.insert(key);
    if (!spec_.contains(key)) return fallback;
    const auto& v = spec_.at(key);
    if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return v.get<double>();
  }

  Grid grid(std::size_t d) {
    seen_.insert("grid");
    if (!spec_.contains("grid")) return Grid{{d}};
    Grid g;
    try {
      g.axes = spec_.at("grid").get<std::vector<std::size_t>>();
    } catch (const json::exception&) {
      throw ConfigError("'grid' must be an array of axis lengths");
    }
    if (g.size() != d) throw ConfigError("grid axis product does not equal d");
    return g;
  }

  std::string modality() {
    seen_.insert("modality");
    return spec_.value("modality", std::string("synthetic"));
  }

  void finish() const {
    for (const auto& [k, v] : spec_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown generator parameter '" + k + "'");
    }
  }

 private:
  const json& spec_;
  std::set<std::string> seen_;
};

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd gaussian(std::size_t d, Rng& rng) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  return v;
}

// Modified Gram-Schmidt on Gaussian draws.
std::vector<Eigen::VectorXd> orthonormal_atoms(std::size_t count, std::size_t d, Rng& rng) {
  if (count > d) throw ConfigError("cannot plant more orthogonal atoms than the dimension");
  std::vector<Eigen::VectorXd> atoms;
  while (atoms.size() < count) {
    Eigen::VectorXd v = gaussian(d, rng);
    for (const auto& a : atoms) v -= a.dot(v) * a;
    const double n = v.norm();
    if (n < 1e-6) continue;
    atoms.push_back(v / n);
  }
  return atoms;
}

double amplitude(Rng& rng) {
  const double a = rng.uniform(0.5, 1.5);
  return rng.below(2) ? -a : a;
}

void add_noise(Eigen::VectorXd& v, double sigma, Rng& rng) {
  if (sigma == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += sigma * rng.normal();
}

SampleSet to_samples(std::vector<Eigen::VectorXd> rows, const Grid& grid, const std::string& modality,
                     std::uint64_t seed) {
  std::vector<Signal> samples;
  samples.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    samples.emplace_back(std::move(rows[i]), grid, modality, "s" + std::to_string(i));
  }
  return SampleSet(std::move(samples), seed);
}

SynthOutput atoms_generator(const json& spec, std::uint64_t seed) {
  Params p(spec);
  const auto G = p.count("G");
  const auto d = p.count("d");
  const auto N = p.count("N");
  const double noise = p.real("noise", 0.0);
  const auto max_active = p.count("max_active", std::size_t{1});
  const auto grid = p.grid(d);
  const auto modality = p.modality();
  p.finish();
  if (G < 1 || d < 1 || N < 1) throw ConfigError("atoms: G, d and N must be >= 1");
  if (max_active < 1 || max_active > G) throw ConfigError("atoms: max_active must lie in [1, G]");
  if (!(noise >= 0.0)) throw ConfigError("atoms: noise must be >= 0");

  Rng rng(seed);
  const auto atoms = orthonormal_atoms(G, d, rng);
  std::vector<Eigen::VectorXd> rows;
  json supports = json::array();
  for (std::size_t n = 0; n < N; ++n) {
    const auto k = 1 + static_cast<std::size_t>(rng.below(max_active));
    std::vector<std::size_t> order(G);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < k; ++i) std::swap(order[i], order[i + rng.below(G - i)]);
    std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(chosen.begin(), chosen.end());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (auto a : chosen) x += amplitude(rng) * atoms[a];
    add_noise(x, noise, rng);
    rows.push_back(std::move(x));
    supports.push_back(chosen);
  }
  json truth = {{"generator", "atoms"}, {"supports", supports}};
  truth["atoms"] = json::array();
  for (const auto& a : atoms) truth["atoms"].push_back(vec_json(a));
  return {make_corpus(to_samples(std::move(rows), grid, modality, seed), spec), std::move(truth)};
}

SynthOutput hierarchy_generator(const json& spec, std::uint64_t seed) {
  Params p(spec);
  const auto P = p.count("parents");
  const auto C = p.count("children");
  const auto d = p.count("d");
  const auto N = p.count("N");
  const double noise = p.real("noise", 0.0);
  const double overlap = p.real("overlap", 0.05);
  const double parent_fraction = p.real("parent_fraction", 0.2);
  const auto grid = p.grid(d);
  const auto modality = p.modality();
  p.finish();
  if (P < 1 || C < 2 || N < 1) throw ConfigError("hierarchy: need parents >= 1, children >= 2, N >= 1");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw ConfigError("hierarchy: overlap must lie in [0, 1)");
  if (!(parent_fraction >= 0.0 && parent_fraction <= 1.0)) {
    throw ConfigError("hierarchy: parent_fraction must lie in [0, 1]");
  }
  if (!(noise >= 0.0)) throw ConfigError("hierarchy: noise must be >= 0");

  Rng rng(seed);
  const auto basis = orthonormal_atoms(P * C, d, rng);
  std::vector<std::vector<Eigen::VectorXd>> children(P);
  std::vector<Eigen::VectorXd> parents;
  for (std::size_t a = 0; a < P; ++a) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t c = 0; c < C; ++c) {
      Eigen::VectorXd tilt = gaussian(d, rng);
      tilt /= tilt.norm();
      Eigen::VectorXd child = basis[a * C + c] + overlap * tilt;
      child /= child.norm();
      sum += child;
      children[a].push_back(std::move(child));
    }
    parents.push_back(sum / sum.norm());
  }

  std::vector<Eigen::VectorXd> rows;
  json labels = json::array();
  for (std::size_t n = 0; n < N; ++n) {
    const bool is_parent = rng.uniform() < parent_fraction;
    const auto a = static_cast<std::size_t>(rng.below(P));
    Eigen::VectorXd x;
    if (is_parent) {
      x = amplitude(rng) * parents[a];
      labels.push_back({{"parent", a}});
    } else {
      const auto c = static_cast<std::size_t>(rng.below(C));
      x = amplitude(rng) * children[a][c];
      labels.push_back({{"parent", a}, {"child", c}});
    }
    add_noise(x, noise, rng);
    rows.push_back(std::move(x));
  }

  json truth = {{"generator", "hierarchy"}, {"labels", labels}};
  truth["parents"] = json::array();
  truth["children"] = json::array();
  for (std::size_t a = 0; a < P; ++a) {
    truth["parents"].push_back(vec_json(parents[a]));
    json kids = json::array();
    for (const auto& c : children[a]) kids.push_back(vec_json(c));
    truth["children"].push_back(std::move(kids));
  }
  return {make_corpus(to_samples(std::move(rows), grid, modality, seed), spec), std::move(truth)};
}

SynthOutput pure_generator(const json& spec, std::uint64_t seed) {
  Params p(spec);
  const auto d = p.count("d");
  const auto N = p.count("N");
  const double noise = p.real("noise", 0.0);
  const auto grid = p.grid(d);
  const auto modality = p.modality();
  p.finish();
  if (d < 1 || N < 1) throw ConfigError("pure: d and N must be >= 1");
  Rng rng(seed);
  const auto atom = orthonormal_atoms(1, d, rng).front();
  std::vector<Eigen::VectorXd> rows;
  for (std::size_t n = 0; n < N; ++n) {
    Eigen::VectorXd x = amplitude(rng) * atom;
    add_noise(x, noise, rng);
    rows.push_back(std::move(x));
  }
  json truth = {{"generator", "pure"}, {"atoms", json::array({vec_json(atom)})}};
  return {make_corpus(to_samples(std::move(rows), grid, modality, seed), spec), std::move(truth)};
}

}  // namespace

SynthOutput synth(const json& spec, std::uint64_t seed) {
  if (!spec.is_object() || !spec.contains("generator") || !spec.at("generator").is_string()) {
    throw ConfigError("generator spec needs a string 'generator' field");
  }
  const auto name = spec.at("generator").get<std::string>();
  if (name == "atoms") return atoms_generator(spec, seed);
  if (name == "hierarchy") return hierarchy_generator(spec, seed);
  if (name == "pure") return pure_generator(spec, seed);
  throw ConfigError("unknown generator '" + name + "'");
}

}  // namespace sembase
