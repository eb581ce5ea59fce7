#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sembase/coding.hpp"
#include "sembase/complexity.hpp"
#include "sembase/signal.hpp"
#include "sembase/statistics.hpp"

namespace sembase {

struct DecomposeConfig {
  double epsilon = 1e-6;  // max tolerable average cognitive error
  std::size_t n_min = 2;
  std::size_t n_max = 5;
  std::size_t restarts = 4;
  double delta_d = 0.01;  // relative width of the max-diversity band
  std::size_t max_iters = 200;
  std::uint64_t seed = 0;
  double tau = 0.1;       // activation threshold for diversity statistics

  void validate() const;
};

// One evaluated base set. `bases` is empty for candidates whose fit failed.
struct CandidateRecord {
  std::size_t n_bases = 0;
  std::size_t restart = 0;
  double avg_error = 0.0;
  double diversity = 0.0;
  ObjectiveValue objective;
  bool feasible = false;
  bool failed = false;
  std::string failure;
  std::optional<BaseSet> bases;
};

struct DecomposeResult {
  BaseSet base_set;
  double diversity = 0.0;
  double avg_error = 0.0;
  ObjectiveValue objective;
  bool feasible = false;
  std::size_t selected = 0;  // index into trace
  std::vector<CandidateRecord> trace;
};

// Runtime knobs that never change results.
struct ExecOptions {
  std::size_t threads = 1;
};

// Scores a base set on D: average cognitive error, diversity (N_K >= 2), and
// the storage/complexity objective.
CandidateRecord evaluate_candidate(const SampleSet& D, const BaseSet& K, const CodingConfig& coding,
                                   const ComplexityConfig& comp, const DecomposeConfig& cfg);

// Flips each base so its first significant entry is positive and sorts the
// bases by quantized entries. Scale and sign live in the coefficients, so
// this does not change what a set can represent.
std::vector<SemanticBase> canonicalize(std::vector<SemanticBase> bases, int quant_bits);

// Dictionary fit for a fixed base count: k-means++ seeding over normalized
// samples, then alternating sparse coding and per-base least-squares updates
// until supports and bases stop moving or max_iters is reached.
BaseSet fit_candidate(const SampleSet& D, std::size_t n_bases, const DecomposeConfig& cfg,
                      const CodingConfig& coding, int quant_bits = 16, std::size_t restart = 0);

// Applies the selection rule to an evaluated trace: feasible candidates,
// then the (1 - delta_d) max-diversity band, then minimum objective, then
// smaller N_K, then lexicographic quantized entries. Without feasible
// candidates, the lowest-error candidate is returned. nullopt if every
// candidate failed.
std::optional<std::size_t> select_candidate(const std::vector<CandidateRecord>& trace,
                                            const DecomposeConfig& cfg);

DecomposeResult solve(const SampleSet& D, const DecomposeConfig& cfg, const CodingConfig& coding,
                      const ComplexityConfig& comp, const ExecOptions& exec = {});

// Exhaustive search over base sets whose entries lie on `levels`
// (normalized, sign-canonical, deduplicated). Guarded: d <= 4, N_K <= 3,
// at most 5 levels.
DecomposeResult oracle_decompose(const SampleSet& D, const DecomposeConfig& cfg,
                                 const CodingConfig& coding, const ComplexityConfig& comp,
                                 const std::vector<double>& levels);

// Distinct unit directions with entries on `levels`, in canonical order.
std::vector<SemanticBase> grid_directions(std::size_t dim, const std::vector<double>& levels,
                                          int quant_bits);

}  // namespace sembase
