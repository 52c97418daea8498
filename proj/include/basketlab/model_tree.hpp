#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace basketlab {

struct LinearModel {
    double intercept = 0.0;
    std::vector<std::pair<std::uint32_t, double>> terms; // (feature index, coefficient)

    double value(std::span<const double> features) const {
        double v = intercept;
        for (const auto& [idx, coef] : terms) v += coef * features[idx];
        return v;
    }

    int parameter_count() const { return 1 + static_cast<int>(terms.size()); }
};

struct InstanceTable {
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> features; // row major, uniform width
    std::vector<double> targets;

    std::size_t size() const { return targets.size(); }
    std::size_t dimension() const { return feature_names.size(); }
};

struct TreeParams {
    double smoothing_k = 15.0;
    int min_leaf = 4;
    double sd_stop_fraction = 0.05;
};

// Binary model-tree node. Internal nodes route by feature <= threshold (left)
// vs > threshold (right) and additionally carry a node-local linear model,
// which pruning and smoothing both consult.
struct TreeNode {
    std::uint32_t split_feature = 0;
    double threshold = 0.0;
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;
    LinearModel model;
    std::uint64_t n = 0; // training instances reaching this node

    bool is_leaf() const { return left == nullptr; }
};

// Standard-deviation-reduction split chosen by grow():
// SDR = sd(T) - sum_i |T_i|/|T| * sd(T_i) over midpoints between consecutive
// distinct sorted feature values. sd is the population standard deviation.
struct SplitChoice {
    bool found = false;
    std::uint32_t feature = 0;
    double threshold = 0.0;
    double sdr = 0.0;
};

// Exposed for the exhaustive-scan oracle tests.
SplitChoice best_split(const InstanceTable& table,
                       const std::vector<std::uint32_t>& instance_indices);

class ModelTree {
public:
    // Recursive SDR splitting. A node becomes a leaf when it has fewer than
    // max(4, min_leaf) instances, its sd falls below sd_stop_fraction of the
    // root sd, or no split has positive SDR. Every node gets a least-squares
    // model over the split features of its subtree (leaves: intercept-only
    // mean), shrunk by greedy term elimination under the adjusted error.
    static ModelTree grow(const InstanceTable& table, const TreeParams& params = {});

    // Bottom-up: replaces a subtree by a leaf carrying the node-local model
    // whenever that model's adjusted error does not exceed the subtree's.
    // Adjusted error = mean |residual| * (n+v)/(n-v), v = fitted parameters;
    // n <= v escalates the factor to 1e6.
    void prune(const InstanceTable& table);

    // Routes to a leaf; with smoothing, blends leaf output with each ancestor
    // model on the way back up: p' = (n*p + k*q)/(n + k).
    double predict(std::span<const double> features, bool smoothing = true) const;

    const TreeNode& root() const { return *root_; }
    const TreeParams& params() const { return params_; }
    std::size_t feature_count() const { return feature_count_; }
    std::size_t node_count() const;
    std::size_t leaf_count() const;

    // Recursive instance-weighted adjusted error of the current structure.
    double adjusted_subtree_error(const InstanceTable& table) const;

    // Assembles a tree from parts (deserialization).
    ModelTree(std::unique_ptr<TreeNode> root, TreeParams params,
              std::size_t feature_count);

private:
    std::unique_ptr<TreeNode> root_;
    TreeParams params_;
    std::size_t feature_count_ = 0;
};

} // namespace basketlab
