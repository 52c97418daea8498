#include "basketlab/model_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "basketlab/error.hpp"

namespace basketlab {

namespace {

constexpr double kOverfitPenalty = 1e6;

using Indices = std::vector<std::uint32_t>;

double population_sd(const InstanceTable& table, const Indices& idx) {
    if (idx.empty()) return 0.0;
    double sum = 0.0, sumsq = 0.0;
    for (auto i : idx) {
        const double y = table.targets[i];
        sum += y;
        sumsq += y * y;
    }
    const double n = static_cast<double>(idx.size());
    const double mean = sum / n;
    return std::sqrt(std::max(0.0, sumsq / n - mean * mean));
}

double adjusted_error_factor(std::uint64_t n, int v) {
    if (n <= static_cast<std::uint64_t>(v)) return kOverfitPenalty;
    const double nd = static_cast<double>(n);
    return (nd + v) / (nd - v);
}

double mean_abs_residual(const InstanceTable& table, const Indices& idx,
                         const LinearModel& model) {
    if (idx.empty()) return 0.0;
    double sum = 0.0;
    for (auto i : idx)
        sum += std::abs(table.targets[i] - model.value(table.features[i]));
    return sum / static_cast<double>(idx.size());
}

double adjusted_error(const InstanceTable& table, const Indices& idx,
                      const LinearModel& model) {
    return mean_abs_residual(table, idx, model) *
           adjusted_error_factor(idx.size(), model.parameter_count());
}

LinearModel fit_least_squares(const InstanceTable& table, const Indices& idx,
                              const std::vector<std::uint32_t>& features) {
    LinearModel model;
    if (idx.empty()) return model;
    if (features.empty()) {
        double sum = 0.0;
        for (auto i : idx) sum += table.targets[i];
        model.intercept = sum / static_cast<double>(idx.size());
        return model;
    }
    const auto rows = static_cast<Eigen::Index>(idx.size());
    const auto cols = static_cast<Eigen::Index>(features.size() + 1);
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = table.features[idx[static_cast<std::size_t>(r)]];
        a(r, 0) = 1.0;
        for (std::size_t c = 0; c < features.size(); ++c)
            a(r, static_cast<Eigen::Index>(c + 1)) = row[features[c]];
        y(r) = table.targets[idx[static_cast<std::size_t>(r)]];
    }
    const Eigen::VectorXd x = a.colPivHouseholderQr().solve(y);
    model.intercept = x(0);
    for (std::size_t c = 0; c < features.size(); ++c)
        model.terms.emplace_back(features[c], x(static_cast<Eigen::Index>(c + 1)));
    return model;
}

// Full fit followed by greedy term drops while the adjusted error does not
// increase.
LinearModel fit_with_elimination(const InstanceTable& table, const Indices& idx,
                                 std::vector<std::uint32_t> features) {
    std::sort(features.begin(), features.end());
    features.erase(std::unique(features.begin(), features.end()), features.end());
    LinearModel current = fit_least_squares(table, idx, features);
    double current_err = adjusted_error(table, idx, current);
    while (!features.empty()) {
        bool improved = false;
        LinearModel best_model;
        double best_err = 0.0;
        std::size_t best_drop = 0;
        for (std::size_t d = 0; d < features.size(); ++d) {
            std::vector<std::uint32_t> reduced;
            reduced.reserve(features.size() - 1);
            for (std::size_t i = 0; i < features.size(); ++i)
                if (i != d) reduced.push_back(features[i]);
            LinearModel candidate = fit_least_squares(table, idx, reduced);
            const double err = adjusted_error(table, idx, candidate);
            if (err <= current_err && (!improved || err < best_err)) {
                improved = true;
                best_model = std::move(candidate);
                best_err = err;
                best_drop = d;
            }
        }
        if (!improved) break;
        features.erase(features.begin() + static_cast<std::ptrdiff_t>(best_drop));
        current = std::move(best_model);
        current_err = best_err;
    }
    return current;
}

struct Grower {
    const InstanceTable& table;
    const TreeParams& params;
    double root_sd = 0.0;
    std::uint64_t min_node = 4;

    std::unique_ptr<TreeNode> build(const Indices& idx,
                                    std::vector<std::uint32_t>& subtree_features) {
        auto node = std::make_unique<TreeNode>();
        node->n = idx.size();

        const bool too_small = idx.size() < min_node;
        const bool flat = population_sd(table, idx) <
                          params.sd_stop_fraction * root_sd;
        SplitChoice split;
        if (!too_small && !flat) split = best_split(table, idx);

        if (!split.found) {
            node->model = fit_least_squares(table, idx, {});
            return node;
        }

        node->split_feature = split.feature;
        node->threshold = split.threshold;
        Indices left_idx, right_idx;
        for (auto i : idx) {
            (table.features[i][split.feature] <= split.threshold ? left_idx
                                                                 : right_idx)
                .push_back(i);
        }
        std::vector<std::uint32_t> left_feats, right_feats;
        node->left = build(left_idx, left_feats);
        node->right = build(right_idx, right_feats);

        subtree_features.push_back(split.feature);
        subtree_features.insert(subtree_features.end(), left_feats.begin(),
                                left_feats.end());
        subtree_features.insert(subtree_features.end(), right_feats.begin(),
                                right_feats.end());
        node->model = fit_with_elimination(table, idx, subtree_features);
        return node;
    }
};

double prune_node(TreeNode& node, const InstanceTable& table, const Indices& idx) {
    if (idx.empty()) return 0.0;
    if (node.is_leaf()) return adjusted_error(table, idx, node.model);

    Indices left_idx, right_idx;
    for (auto i : idx) {
        (table.features[i][node.split_feature] <= node.threshold ? left_idx
                                                                 : right_idx)
            .push_back(i);
    }
    const double left_err = prune_node(*node.left, table, left_idx);
    const double right_err = prune_node(*node.right, table, right_idx);
    const double subtree_err =
        (static_cast<double>(left_idx.size()) * left_err +
         static_cast<double>(right_idx.size()) * right_err) /
        static_cast<double>(idx.size());
    const double node_err = adjusted_error(table, idx, node.model);
    if (node_err <= subtree_err) {
        node.left.reset();
        node.right.reset();
        return node_err;
    }
    return subtree_err;
}

double subtree_error(const TreeNode& node, const InstanceTable& table,
                     const Indices& idx) {
    if (idx.empty()) return 0.0;
    if (node.is_leaf()) return adjusted_error(table, idx, node.model);
    Indices left_idx, right_idx;
    for (auto i : idx) {
        (table.features[i][node.split_feature] <= node.threshold ? left_idx
                                                                 : right_idx)
            .push_back(i);
    }
    const double left_err = subtree_error(*node.left, table, left_idx);
    const double right_err = subtree_error(*node.right, table, right_idx);
    return (static_cast<double>(left_idx.size()) * left_err +
            static_cast<double>(right_idx.size()) * right_err) /
           static_cast<double>(idx.size());
}

void check_table(const InstanceTable& table) {
    if (table.targets.empty()) throw Error::data("instance table is empty");
    if (table.features.size() != table.targets.size())
        throw Error::data("instance table feature/target row mismatch");
    for (const auto& row : table.features)
        if (row.size() != table.dimension())
            throw Error::data("instance table has ragged feature rows");
}

std::size_t count_nodes(const TreeNode& node) {
    if (node.is_leaf()) return 1;
    return 1 + count_nodes(*node.left) + count_nodes(*node.right);
}

std::size_t count_leaves(const TreeNode& node) {
    if (node.is_leaf()) return 1;
    return count_leaves(*node.left) + count_leaves(*node.right);
}

} // namespace

SplitChoice best_split(const InstanceTable& table, const Indices& idx) {
    SplitChoice best;
    if (idx.size() < 2) return best;

    const double sd_all = population_sd(table, idx);
    const auto n = idx.size();

    std::vector<std::uint32_t> order(idx);
    for (std::uint32_t f = 0; f < table.dimension(); ++f) {
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return table.features[a][f] < table.features[b][f];
        });
        // prefix sums over the sorted order
        double sum = 0.0, sumsq = 0.0;
        double total = 0.0, totalsq = 0.0;
        for (auto i : order) {
            total += table.targets[i];
            totalsq += table.targets[i] * table.targets[i];
        }
        for (std::size_t p = 1; p < n; ++p) {
            const double y = table.targets[order[p - 1]];
            sum += y;
            sumsq += y * y;
            const double lo = table.features[order[p - 1]][f];
            const double hi = table.features[order[p]][f];
            if (lo == hi) continue;
            const double nl = static_cast<double>(p);
            const double nr = static_cast<double>(n - p);
            const double mean_l = sum / nl;
            const double mean_r = (total - sum) / nr;
            const double sd_l =
                std::sqrt(std::max(0.0, sumsq / nl - mean_l * mean_l));
            const double sd_r = std::sqrt(
                std::max(0.0, (totalsq - sumsq) / nr - mean_r * mean_r));
            const double sdr =
                sd_all - (nl / static_cast<double>(n)) * sd_l -
                (nr / static_cast<double>(n)) * sd_r;
            if (sdr > best.sdr) {
                best.found = true;
                best.feature = f;
                best.threshold = (lo + hi) / 2.0;
                best.sdr = sdr;
            }
        }
    }
    return best;
}

ModelTree ModelTree::grow(const InstanceTable& table, const TreeParams& params) {
    check_table(table);
    if (params.sd_stop_fraction <= 0.0 || params.sd_stop_fraction >= 1.0)
        throw Error::data("sd_stop_fraction must be in (0,1)");
    if (params.smoothing_k < 0.0)
        throw Error::data("smoothing_k must be non-negative");

    Indices all(table.size());
    std::iota(all.begin(), all.end(), 0u);

    Grower grower{table, params,
                  population_sd(table, all),
                  std::max<std::uint64_t>(4, static_cast<std::uint64_t>(
                                                 std::max(params.min_leaf, 0)))};
    std::vector<std::uint32_t> features_used;
    auto root = grower.build(all, features_used);
    return ModelTree(std::move(root), params, table.dimension());
}

ModelTree::ModelTree(std::unique_ptr<TreeNode> root, TreeParams params,
                     std::size_t feature_count)
    : root_(std::move(root)), params_(params), feature_count_(feature_count) {
    if (!root_) throw Error::internal("model tree requires a root node");
}

void ModelTree::prune(const InstanceTable& table) {
    check_table(table);
    Indices all(table.size());
    std::iota(all.begin(), all.end(), 0u);
    prune_node(*root_, table, all);
}

double ModelTree::predict(std::span<const double> features, bool smoothing) const {
    if (features.size() != feature_count_)
        throw Error::data("feature vector length " + std::to_string(features.size()) +
                          " does not match training dimension " +
                          std::to_string(feature_count_));
    for (double v : features)
        if (!std::isfinite(v)) throw Error::data("non-finite feature value");

    std::vector<const TreeNode*> path;
    const TreeNode* node = root_.get();
    path.push_back(node);
    while (!node->is_leaf()) {
        node = features[node->split_feature] <= node->threshold ? node->left.get()
                                                                : node->right.get();
        path.push_back(node);
    }

    double p = node->model.value(features);
    if (!smoothing || params_.smoothing_k == 0.0) return p;
    for (std::size_t i = path.size() - 1; i > 0; --i) {
        const TreeNode* child = path[i];
        const TreeNode* ancestor = path[i - 1];
        const double n = static_cast<double>(child->n);
        p = (n * p + params_.smoothing_k * ancestor->model.value(features)) /
            (n + params_.smoothing_k);
    }
    return p;
}

std::size_t ModelTree::node_count() const { return count_nodes(*root_); }
std::size_t ModelTree::leaf_count() const { return count_leaves(*root_); }

double ModelTree::adjusted_subtree_error(const InstanceTable& table) const {
    check_table(table);
    Indices all(table.size());
    std::iota(all.begin(), all.end(), 0u);
    return subtree_error(*root_, table, all);
}

} // namespace basketlab
