#include "sembase/decompose.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "sembase/rng.hpp"

namespace sembase {

void DecomposeConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("decompose.epsilon must be > 0");
  if (n_min < 2) throw ConfigError("decompose.n_range lower bound must be >= 2");
  if (n_max < n_min) throw ConfigError("decompose.n_range is empty");
  if (restarts < 1) throw ConfigError("decompose.restarts must be >= 1");
  if (!(delta_d >= 0.0 && delta_d < 1.0)) throw ConfigError("decompose.delta_d must lie in [0, 1)");
  if (max_iters < 1) throw ConfigError("decompose.max_iters must be >= 1");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("decompose.tau must lie in (0, 1]");
}

CandidateRecord evaluate_candidate(const SampleSet& D, const BaseSet& K, const CodingConfig& coding,
                                   const ComplexityConfig& comp, const DecomposeConfig& cfg) {
  if (D.dim() != K.dim()) throw DimensionError("sample and base dimensions differ");
  const auto n = D.size();
  ActivationMatrix act = ActivationMatrix::Zero(static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(K.size()));
  double err_sum = 0.0;
  double bits_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = encode(D[i], K, coding);
    const auto y = reconstruct(c, K, D[i].grid(), D[i].modality());
    err_sum += mean_squared_error(D[i].values(), y.values());
    bits_sum += code_complexity(c, comp);
    const auto flags = active_bases(c, cfg.tau);
    for (std::size_t j = 0; j < flags.size(); ++j) {
      act(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = flags[j] != 0;
    }
  }
  CandidateRecord rec;
  rec.n_bases = K.size();
  rec.avg_error = err_sum / static_cast<double>(n);
  rec.diversity = K.size() >= 2 ? diversity(profile_from_activations(act, cfg.tau)) : 0.0;
  rec.objective.storage = storage_volume(K, comp);
  rec.objective.avg_complexity = bits_sum / static_cast<double>(n);
  rec.objective.lambda = comp.lambda;
  rec.objective.total = rec.objective.storage + comp.lambda * rec.objective.avg_complexity;
  rec.feasible = rec.avg_error <= cfg.epsilon;
  rec.bases = K;
  return rec;
}

std::vector<SemanticBase> canonicalize(std::vector<SemanticBase> bases, int quant_bits) {
  for (auto& b : bases) {
    for (Eigen::Index i = 0; i < b.vector.size(); ++i) {
      if (std::abs(b.vector[i]) > 1e-9) {
        if (b.vector[i] < 0.0) b.vector = -b.vector;
        break;
      }
    }
  }
  std::vector<std::pair<std::vector<std::uint32_t>, std::size_t>> keyed;
  keyed.reserve(bases.size());
  for (std::size_t i = 0; i < bases.size(); ++i) keyed.emplace_back(quantize(bases[i].vector, quant_bits), i);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<SemanticBase> out;
  out.reserve(bases.size());
  for (const auto& [key, i] : keyed) out.push_back(std::move(bases[i]));
  return out;
}

namespace {

// Sign-invariant squared distance between unit vectors: 1 - <a, b>^2.
double axis_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double c = a.dot(b);
  return std::max(0.0, 1.0 - c * c);
}

constexpr double kDistinctDirection = 1e-12;

Eigen::MatrixXd kmeanspp_seed(const SampleSet& D, std::size_t n_bases, Rng& rng) {
  std::vector<Eigen::VectorXd> points;
  points.reserve(D.size());
  for (const auto& s : D.samples()) {
    const double n = s.values().norm();
    if (n > 0.0) points.push_back(s.values() / n);
  }
  if (points.empty()) throw DegenerateCandidate("corpus contains only zero signals");

  Eigen::MatrixXd centers(static_cast<Eigen::Index>(D.dim()), static_cast<Eigen::Index>(n_bases));
  std::vector<double> dist(points.size(), 0.0);
  std::size_t first = static_cast<std::size_t>(rng.below(points.size()));
  centers.col(0) = points[first];
  for (std::size_t p = 0; p < points.size(); ++p) dist[p] = axis_distance(points[p], points[first]);

  for (std::size_t k = 1; k < n_bases; ++k) {
    double total = 0.0;
    for (auto& w : dist) {
      if (w < kDistinctDirection) w = 0.0;
      total += w;
    }
    if (total <= 0.0) {
      throw DegenerateCandidate("only " + std::to_string(k) + " distinct sample directions for " +
                                std::to_string(n_bases) + " bases");
    }
    double target = rng.uniform() * total;
    std::size_t pick = points.size() - 1;
    for (std::size_t p = 0; p < points.size(); ++p) {
      if (dist[p] <= 0.0) continue;
      if (target < dist[p]) {
        pick = p;
        break;
      }
      target -= dist[p];
    }
    while (dist[pick] <= 0.0) --pick;  // guards rounding at the tail
    centers.col(static_cast<Eigen::Index>(k)) = points[pick];
    for (std::size_t p = 0; p < points.size(); ++p) {
      dist[p] = std::min(dist[p], axis_distance(points[p], points[pick]));
    }
  }
  return centers;
}

}  // namespace

BaseSet fit_candidate(const SampleSet& D, std::size_t n_bases, const DecomposeConfig& cfg,
                      const CodingConfig& coding, int quant_bits, std::size_t restart) {
  if (n_bases < 1) throw InvalidArgument("need at least one base");
  if (n_bases > D.size()) {
    throw InvalidArgument("cannot fit " + std::to_string(n_bases) + " bases to " +
                          std::to_string(D.size()) + " samples");
  }
  Rng rng(mix_seed(mix_seed(cfg.seed, n_bases), restart));
  Eigen::MatrixXd K = kmeanspp_seed(D, n_bases, rng);
  const Eigen::MatrixXd X = D.matrix();
  const auto n = static_cast<Eigen::Index>(D.size());
  const auto nk = static_cast<Eigen::Index>(n_bases);
  const std::size_t s = coding.effective_sparsity(n_bases);

  std::vector<std::vector<std::size_t>> prev_support;
  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(nk, n);
    std::vector<std::vector<std::size_t>> support(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto code = sparse_code(X.col(i), K, s, coding.ridge);
      for (const auto& [j, c] : code.entries()) {
        C(static_cast<Eigen::Index>(j), i) = c;
        support[static_cast<std::size_t>(i)].push_back(j);
      }
    }

    // Gauss-Seidel sweep: each base is refit against the residual of its own
    // samples with the other bases held fixed, then its coefficients follow.
    double max_move = 0.0;
    for (Eigen::Index j = 0; j < nk; ++j) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(X.rows());
      std::vector<Eigen::Index> users;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (C(j, i) == 0.0) continue;
        users.push_back(i);
        const Eigen::VectorXd r = X.col(i) - K * C.col(i) + C(j, i) * K.col(j);
        acc += C(j, i) * r;
      }
      const double norm = acc.norm();
      if (users.empty() || !(norm > 0.0)) continue;
      const Eigen::VectorXd updated = acc / norm;
      max_move = std::max(max_move, std::min((updated - K.col(j)).squaredNorm(),
                                             (updated + K.col(j)).squaredNorm()));
      K.col(j) = updated;
      for (auto i : users) {
        const Eigen::VectorXd r = X.col(i) - K * C.col(i) + C(j, i) * K.col(j);
        C(j, i) = r.dot(K.col(j));
      }
    }

    const bool stable = support == prev_support;
    prev_support = std::move(support);
    if (stable && max_move < 1e-24) break;
  }

  std::vector<SemanticBase> bases;
  bases.reserve(n_bases);
  for (Eigen::Index j = 0; j < nk; ++j) bases.push_back(normalize_base(Eigen::VectorXd(K.col(j))));
  return BaseSet(canonicalize(std::move(bases), quant_bits), quant_bits);
}

namespace {

// Strict weak "better than" for the final objective stage.
bool objective_before(const CandidateRecord& a, const CandidateRecord& b) {
  if (a.objective.total != b.objective.total) return a.objective.total < b.objective.total;
  if (a.n_bases != b.n_bases) return a.n_bases < b.n_bases;
  return a.bases->quantized_key() < b.bases->quantized_key();
}

bool error_before(const CandidateRecord& a, const CandidateRecord& b) {
  if (a.avg_error != b.avg_error) return a.avg_error < b.avg_error;
  if (a.n_bases != b.n_bases) return a.n_bases < b.n_bases;
  return a.bases->quantized_key() < b.bases->quantized_key();
}

constexpr double kDiversitySlack = 1e-12;

}  // namespace

std::optional<std::size_t> select_candidate(const std::vector<CandidateRecord>& trace,
                                            const DecomposeConfig& cfg) {
  double best_div = -1.0;
  bool any_feasible = false;
  for (const auto& c : trace) {
    if (c.failed || !c.feasible) continue;
    any_feasible = true;
    best_div = std::max(best_div, c.diversity);
  }
  std::optional<std::size_t> pick;
  if (any_feasible) {
    const double floor = (1.0 - cfg.delta_d) * best_div - kDiversitySlack;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const auto& c = trace[i];
      if (c.failed || !c.feasible || c.diversity < floor) continue;
      if (!pick || objective_before(c, trace[*pick])) pick = i;
    }
    return pick;
  }
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].failed) continue;
    if (!pick || error_before(trace[i], trace[*pick])) pick = i;
  }
  return pick;
}

namespace {

DecomposeResult finish(std::vector<CandidateRecord> trace, const DecomposeConfig& cfg) {
  const auto pick = select_candidate(trace, cfg);
  if (!pick) throw DegenerateCandidate("no candidate base set could be fitted");
  const auto& c = trace[*pick];
  DecomposeResult r{*c.bases, c.diversity, c.avg_error, c.objective, c.feasible, *pick, {}};
  r.trace = std::move(trace);
  return r;
}

}  // namespace

DecomposeResult solve(const SampleSet& D, const DecomposeConfig& cfg, const CodingConfig& coding,
                      const ComplexityConfig& comp, const ExecOptions& exec) {
  cfg.validate();
  coding.validate();
  comp.validate();

  struct Task {
    std::size_t n_bases;
    std::size_t restart;
  };
  std::vector<Task> tasks;
  for (std::size_t nk = cfg.n_min; nk <= cfg.n_max; ++nk) {
    for (std::size_t r = 0; r < cfg.restarts; ++r) tasks.push_back({nk, r});
  }

  std::vector<CandidateRecord> trace(tasks.size());
  auto run = [&](std::size_t t) {
    const auto [nk, r] = tasks[t];
    try {
      const auto K = fit_candidate(D, nk, cfg, coding, comp.quant_bits, r);
      trace[t] = evaluate_candidate(D, K, coding, comp, cfg);
    } catch (const Error& e) {
      // Covers N_K > N as well as degenerate fits.
      trace[t] = CandidateRecord{};
      trace[t].failed = true;
      trace[t].failure = e.what();
    }
    trace[t].n_bases = nk;
    trace[t].restart = r;
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(exec.threads, tasks.size()));
  if (workers == 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) run(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) run(t);
      });
    }
    for (auto& th : pool) th.join();
  }
  return finish(std::move(trace), cfg);
}

std::vector<SemanticBase> grid_directions(std::size_t dim, const std::vector<double>& levels,
                                          int quant_bits) {
  std::vector<SemanticBase> out;
  std::set<std::vector<std::uint32_t>> seen;
  std::vector<std::size_t> idx(dim, 0);
  const std::size_t L = levels.size();
  while (true) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) v[static_cast<Eigen::Index>(i)] = levels[idx[i]];
    if (v.norm() > 0.0) {
      auto b = canonicalize({normalize_base(v)}, quant_bits).front();
      if (seen.insert(quantize(b.vector, quant_bits)).second) out.push_back(std::move(b));
    }
    std::size_t pos = 0;
    while (pos < dim && ++idx[pos] == L) idx[pos++] = 0;
    if (pos == dim) break;
  }
  return canonicalize(std::move(out), quant_bits);
}

DecomposeResult oracle_decompose(const SampleSet& D, const DecomposeConfig& cfg,
                                 const CodingConfig& coding, const ComplexityConfig& comp,
                                 const std::vector<double>& levels) {
  cfg.validate();
  coding.validate();
  comp.validate();
  if (D.dim() > 4 || cfg.n_max > 3 || levels.size() > 5 || levels.empty()) {
    throw ComplexityGuardError("oracle guard: requires d <= 4, N_K <= 3 and at most 5 levels");
  }
  const auto dirs = grid_directions(D.dim(), levels, comp.quant_bits);

  std::vector<CandidateRecord> trace;
  for (std::size_t nk = cfg.n_min; nk <= cfg.n_max; ++nk) {
    if (nk > dirs.size()) break;
    std::vector<std::size_t> pick(nk);
    for (std::size_t i = 0; i < nk; ++i) pick[i] = i;
    while (true) {
      std::vector<SemanticBase> bases;
      for (auto i : pick) bases.push_back(dirs[i]);
      auto rec = evaluate_candidate(D, BaseSet(std::move(bases), comp.quant_bits), coding, comp, cfg);
      rec.restart = 0;
      trace.push_back(std::move(rec));
      // next combination in lexicographic order
      std::size_t k = nk;
      while (k > 0 && pick[k - 1] == dirs.size() - nk + (k - 1)) --k;
      if (k == 0) break;
      ++pick[k - 1];
      for (std::size_t j = k; j < nk; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return finish(std::move(trace), cfg);
}

}  // namespace sembase
