#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sembase/coding.hpp"
#include "sembase/complexity.hpp"
#include "sembase/decompose.hpp"
#include "sembase/signal.hpp"

namespace sembase {

struct HierarchyConfig {
  double rho = 0.5;               // sole-activation threshold for subsampling
  std::size_t min_subsample = 8;
  std::size_t depth_cap = 4;
  std::size_t child_n_min = 2;    // base-count range when splitting one node
  std::size_t child_n_max = 2;

  void validate() const;
};

// Everything build_hierarchy needs.
struct PipelineConfig {
  CodingConfig coding;
  ComplexityConfig complexity;
  DecomposeConfig decompose;
  HierarchyConfig hierarchy;
};

inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

struct HierarchyNode {
  SemanticBase base;
  std::vector<std::size_t> children;  // node indices
  std::vector<std::string> subsample_ids;
  bool accepted = false;
  std::size_t parent = kNoParent;
};

struct DecisionRecord {
  std::vector<std::size_t> path;
  std::size_t node = 0;
  bool attempted = false;  // false when skipped before solving
  bool accepted = false;
  std::string reason;
  std::size_t subsample_size = 0;
  std::size_t n_children = 0;
  ObjectiveValue before;
  std::optional<ObjectiveValue> after;
};

class HierarchyTree {
 public:
  HierarchyTree(const BaseSet& roots, std::size_t depth_cap);

  const std::vector<HierarchyNode>& nodes() const { return nodes_; }
  const std::vector<std::size_t>& roots() const { return roots_; }
  const BaseSet& leaf_set() const { return leaf_set_; }
  std::size_t depth_cap() const { return depth_cap_; }
  const std::vector<DecisionRecord>& log() const { return log_; }

  // Leaf node indices in depth-first order (roots left to right).
  std::vector<std::size_t> leaves() const;
  std::size_t depth() const;
  std::size_t node_at(const std::vector<std::size_t>& path) const;
  std::vector<std::size_t> path_of(std::size_t node) const;

  // True iff leaf_set holds exactly the leaf bases in leaf order.
  bool audit() const;

  // Objective of the root set followed by the after-objective of every
  // accepted decomposition.
  std::vector<double> objective_sequence() const;

  double root_objective() const { return root_objective_; }
  void set_root_objective(double v) { root_objective_ = v; }
  bool root_feasible() const { return root_feasible_; }
  void set_root_feasible(bool v) { root_feasible_ = v; }

 private:
  friend DecisionRecord try_decompose_node(HierarchyTree&, const std::vector<std::size_t>&,
                                           const SampleSet&, const PipelineConfig&);
  std::vector<HierarchyNode> nodes_;
  std::vector<std::size_t> roots_;
  BaseSet leaf_set_;
  std::size_t depth_cap_;
  std::vector<DecisionRecord> log_;
  double root_objective_ = 0.0;
  bool root_feasible_ = true;
};

// Samples whose code activates base i and no other, with activation
// threshold rho. nullopt when no sample qualifies.
std::optional<SampleSet> subsample_for_base(const SampleSet& D, const BaseSet& K, std::size_t i,
                             const CodingConfig& coding, double rho);
std::vector<std::size_t> subsample_indices(const SampleSet& D, const BaseSet& K, std::size_t i,
                                           const CodingConfig& coding, double rho);

// Attempts to replace the leaf at `path` with bases decomposed from its
// subsample. Accepted iff the leaf-set objective on D strictly decreases.
// The decision is appended to the tree log either way.
DecisionRecord try_decompose_node(HierarchyTree& tree, const std::vector<std::size_t>& path,
                                  const SampleSet& D, const PipelineConfig& cfg);

HierarchyTree build_hierarchy(const SampleSet& D, const PipelineConfig& cfg,
                              const ExecOptions& exec = {});

Coefficients hierarchy_encode(const Signal& x, const HierarchyTree& tree, const CodingConfig& coding);

}  // namespace sembase
