#include "sembase/hierarchy.hpp"

#include <algorithm>
#include <functional>

#include "sembase/rng.hpp"
#include "sembase/statistics.hpp"

namespace sembase {

void HierarchyConfig::validate() const {
  if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("hierarchy.rho must lie in (0, 1]");
  if (min_subsample < 1) throw ConfigError("hierarchy.min_subsample must be >= 1");
  if (depth_cap < 1) throw ConfigError("hierarchy.depth_cap must be >= 1");
  if (child_n_min < 2 || child_n_max < child_n_min) {
    throw ConfigError("hierarchy.child_n_range must satisfy 2 <= min <= max");
  }
}

HierarchyTree::HierarchyTree(const BaseSet& roots, std::size_t depth_cap)
    : leaf_set_(roots), depth_cap_(depth_cap) {
  for (const auto& b : roots.bases()) {
    HierarchyNode n;
    n.base = b;
    n.base.order = 1;
    roots_.push_back(nodes_.size());
    nodes_.push_back(std::move(n));
  }
}

std::vector<std::size_t> HierarchyTree::leaves() const {
  std::vector<std::size_t> out;
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (nodes_[i].children.empty()) {
      out.push_back(i);
      return;
    }
    for (auto c : nodes_[i].children) walk(c);
  };
  for (auto r : roots_) walk(r);
  return out;
}

std::size_t HierarchyTree::depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes_) d = std::max(d, static_cast<std::size_t>(n.base.order));
  return d;
}

std::size_t HierarchyTree::node_at(const std::vector<std::size_t>& path) const {
  if (path.empty() || path[0] >= roots_.size()) throw InvalidArgument("invalid node path");
  std::size_t cur = roots_[path[0]];
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (path[k] >= nodes_[cur].children.size()) throw InvalidArgument("invalid node path");
    cur = nodes_[cur].children[path[k]];
  }
  return cur;
}

std::vector<std::size_t> HierarchyTree::path_of(std::size_t node) const {
  std::vector<std::size_t> rev;
  std::size_t cur = node;
  while (nodes_[cur].parent != kNoParent) {
    const auto& siblings = nodes_[nodes_[cur].parent].children;
    rev.push_back(static_cast<std::size_t>(
        std::find(siblings.begin(), siblings.end(), cur) - siblings.begin()));
    cur = nodes_[cur].parent;
  }
  rev.push_back(static_cast<std::size_t>(std::find(roots_.begin(), roots_.end(), cur) - roots_.begin()));
  return {rev.rbegin(), rev.rend()};
}

bool HierarchyTree::audit() const {
  const auto lv = leaves();
  if (lv.size() != leaf_set_.size()) return false;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    if (nodes_[lv[i]].base.vector != leaf_set_[i].vector) return false;
  }
  for (const auto& n : nodes_) {
    if (!n.children.empty() && !n.accepted) return false;
    for (auto c : n.children) {
      if (nodes_[c].base.order != n.base.order + 1) return false;
    }
  }
  return depth() <= depth_cap_;
}

std::vector<double> HierarchyTree::objective_sequence() const {
  std::vector<double> seq{root_objective_};
  for (const auto& rec : log_) {
    if (rec.accepted) seq.push_back(rec.after->total);
  }
  return seq;
}

std::vector<std::size_t> subsample_indices(const SampleSet& D, const BaseSet& K, std::size_t i,
                                           const CodingConfig& coding, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw InvalidArgument("rho must lie in (0, 1]");
  if (i >= K.size()) throw InvalidArgument("base index out of range");
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < D.size(); ++n) {
    const auto flags = active_bases(encode(D[n], K, coding), rho);
    bool sole = flags[i] != 0;
    for (std::size_t j = 0; sole && j < flags.size(); ++j) {
      if (j != i && flags[j]) sole = false;
    }
    if (sole) out.push_back(n);
  }
  return out;
}

std::optional<SampleSet> subsample_for_base(const SampleSet& D, const BaseSet& K, std::size_t i,
                                            const CodingConfig& coding, double rho) {
  const auto idx = subsample_indices(D, K, i, coding, rho);
  if (idx.empty()) return std::nullopt;
  std::vector<Signal> picked;
  picked.reserve(idx.size());
  for (auto n : idx) picked.push_back(D[n]);
  return SampleSet(std::move(picked), D.seed());
}

DecisionRecord try_decompose_node(HierarchyTree& tree, const std::vector<std::size_t>& path,
                                  const SampleSet& D, const PipelineConfig& cfg) {
  cfg.hierarchy.validate();
  const std::size_t id = tree.node_at(path);
  auto& node = tree.nodes_[id];
  if (!node.children.empty()) throw InvalidArgument("node is not a leaf");

  DecisionRecord rec;
  rec.path = path;
  rec.node = id;
  rec.before = objective(D, tree.leaf_set_, cfg.coding, cfg.complexity);

  const auto leaves = tree.leaves();
  const std::size_t leaf_pos =
      static_cast<std::size_t>(std::find(leaves.begin(), leaves.end(), id) - leaves.begin());

  auto finish = [&](std::string reason) {
    rec.reason = std::move(reason);
    tree.log_.push_back(rec);
    return rec;
  };

  if (static_cast<std::size_t>(node.base.order) >= tree.depth_cap_) return finish("depth cap reached");

  const auto idx = subsample_indices(D, tree.leaf_set_, leaf_pos, cfg.coding, cfg.hierarchy.rho);
  node.subsample_ids.clear();
  for (auto n : idx) node.subsample_ids.push_back(D[n].id());
  rec.subsample_size = idx.size();
  if (idx.empty() || idx.size() < cfg.hierarchy.min_subsample) {
    return finish("subsample too small (" + std::to_string(idx.size()) + " < " +
                  std::to_string(cfg.hierarchy.min_subsample) + ")");
  }
  std::vector<Signal> picked;
  for (auto n : idx) picked.push_back(D[n]);
  const SampleSet sub(std::move(picked), D.seed());

  DecomposeConfig child_cfg = cfg.decompose;
  child_cfg.n_min = cfg.hierarchy.child_n_min;
  child_cfg.n_max = cfg.hierarchy.child_n_max;
  child_cfg.seed = mix_seed(cfg.decompose.seed, id + 1);
  rec.attempted = true;

  std::optional<DecomposeResult> children;
  try {
    children = solve(sub, child_cfg, cfg.coding, cfg.complexity);
  } catch (const DegenerateCandidate& e) {
    return finish(std::string("no child set could be fitted: ") + e.what());
  }
  rec.n_children = children->base_set.size();
  if (!children->feasible) return finish("child decomposition infeasible on subsample");

  std::vector<SemanticBase> replaced;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    if (k == leaf_pos) {
      for (auto b : children->base_set.bases()) {
        b.order = node.base.order + 1;
        replaced.push_back(std::move(b));
      }
    } else {
      replaced.push_back(tree.leaf_set_[k]);
    }
  }
  std::optional<BaseSet> next;
  try {
    next.emplace(std::move(replaced), tree.leaf_set_.quant_bits());
  } catch (const DegenerateCandidate&) {
    return finish("children duplicate an existing leaf");
  }
  rec.after = objective(D, *next, cfg.coding, cfg.complexity);
  if (!(rec.after->total < rec.before.total)) return finish("objective did not decrease");

  rec.accepted = true;
  const int child_order = node.base.order + 1;
  std::vector<std::size_t> child_ids;
  for (const auto& b : children->base_set.bases()) {
    HierarchyNode c;
    c.base = b;
    c.base.order = child_order;
    c.parent = id;
    child_ids.push_back(tree.nodes_.size());
    tree.nodes_.push_back(std::move(c));
  }
  tree.nodes_[id].children = std::move(child_ids);
  tree.nodes_[id].accepted = true;
  tree.leaf_set_ = std::move(*next);
  return finish("objective decreased");
}

HierarchyTree build_hierarchy(const SampleSet& D, const PipelineConfig& cfg, const ExecOptions& exec) {
  cfg.hierarchy.validate();
  const auto roots = solve(D, cfg.decompose, cfg.coding, cfg.complexity, exec);
  HierarchyTree tree(roots.base_set, cfg.hierarchy.depth_cap);
  tree.set_root_objective(roots.objective.total);
  tree.set_root_feasible(roots.feasible);

  std::vector<std::size_t> frontier = tree.roots();
  for (std::size_t level = 1; level < cfg.hierarchy.depth_cap && !frontier.empty(); ++level) {
    std::vector<std::size_t> next;
    for (auto id : frontier) {
      if (!tree.nodes()[id].children.empty()) continue;
      const auto rec = try_decompose_node(tree, tree.path_of(id), D, cfg);
      if (rec.accepted) {
        const auto& kids = tree.nodes()[id].children;
        next.insert(next.end(), kids.begin(), kids.end());
      }
    }
    frontier = std::move(next);
  }
  return tree;
}

Coefficients hierarchy_encode(const Signal& x, const HierarchyTree& tree, const CodingConfig& coding) {
  return encode(x, tree.leaf_set(), coding);
}

}  // namespace sembase
