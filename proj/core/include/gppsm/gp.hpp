#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gppsm/features.hpp"
#include "gppsm/rng.hpp"

namespace gppsm {

enum class OpKind : std::uint8_t { Add, Sub, Mul, Div, Feature, Constant };

/// One node of an expression tree in prefix order. Arithmetic nodes have
/// arity 2; Feature and Constant nodes are leaves.
struct GeneNode {
    OpKind kind = OpKind::Constant;
    std::uint8_t feature = 0;  // 0-based feature index, Feature nodes only
    double value = 0.0;        // Constant nodes only

    bool operator==(const GeneNode&) const noexcept = default;
};

/// An arithmetic expression over the 11 features and real constants,
/// stored as a prefix-order node vector. The subtree rooted at position i
/// occupies the contiguous range [i, i + subtree_size(i)).
class ExpressionTree {
public:
    ExpressionTree() = default;
    explicit ExpressionTree(std::vector<GeneNode> nodes) : nodes_(std::move(nodes)) {}

    static ExpressionTree feature(std::size_t index);
    static ExpressionTree constant(double v);

    const std::vector<GeneNode>& nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }

    /// Height of the tree: a single leaf has depth 0.
    std::size_t depth() const;

    /// Number of nodes in the subtree rooted at `pos`.
    std::size_t subtree_size(std::size_t pos) const;

    /// Replaces the subtree at `pos` with `replacement`, returning the result.
    ExpressionTree with_subtree(std::size_t pos, const ExpressionTree& replacement) const;

    ExpressionTree subtree(std::size_t pos) const;

    /// S-expression form, e.g. `(add (mul 2 f2) f1)`. Constants are printed
    /// with enough digits that parsing them back is exact.
    std::string to_sexpr() const;
    static ExpressionTree from_sexpr(const std::string& text);

    bool operator==(const ExpressionTree&) const noexcept = default;

private:
    std::vector<GeneNode> nodes_;
};

/// Evolution parameters. The defaults are the reference configuration:
/// population 300, 100 generations, crossover 0.9 / mutation 0.1,
/// tournament size 5, one elite, ramped half-and-half init over depths
/// [2, 6], maximum tree depth 17, constants uniform in [-1, 1].
struct GPConfig {
    std::size_t population_size = 300;
    std::size_t generations = 100;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;
    std::size_t tournament_size = 5;
    std::size_t elitism = 1;
    std::size_t min_init_depth = 2;
    std::size_t max_init_depth = 6;
    std::size_t max_depth = 17;
    double constant_min = -1.0;
    double constant_max = 1.0;
    std::uint64_t seed = 0;
    std::optional<double> target_rss;  // stop early once best train RSS drops below
    unsigned threads = 1;              // fitness evaluation workers

    void validate() const;  // throws ValidationError on out-of-range values
};

/// A trained scoring function plus its provenance.
struct ScoringModel {
    ExpressionTree tree;
    double train_rss = 0.0;
    std::optional<double> test_rss;
    GPConfig config;
    std::vector<std::string> feature_schema;  // f1..f11

    static std::vector<std::string> default_schema();
};

/// Per-generation progress, in evaluation order.
struct GenerationStats {
    std::size_t generation = 0;
    double best_rss = 0.0;
    double mean_rss = 0.0;
    std::size_t best_size = 0;
};

using GenerationCallback = std::function<void(const GenerationStats&)>;

/// Total division: a / b when |b| > 1e-12, otherwise 1.
double protected_div(double a, double b) noexcept;

/// Evaluates a tree on one feature vector. Total: non-finite intermediate
/// results are clamped to 0, so the output is always finite.
double eval_tree(const ExpressionTree& t, const FeatureVector& fv);

/// As above; additionally reports whether any clamping occurred, which
/// marks the individual's fitness as worst during evolution.
double eval_tree(const ExpressionTree& t, const FeatureVector& fv, bool& overflowed);

/// Relative sum of squared error: sum((pred-y)^2) / sum((mean(y)-y)^2).
/// Throws ValidationError on length mismatch, empty input, or all-identical
/// targets (the denominator would be zero and fitness undefined).
double rss(const std::vector<double>& predictions, const std::vector<double>& targets);

/// Train RSS of `tree` over `rows` (rows without a target are skipped).
double model_rss(const ExpressionTree& tree, const std::vector<FeatureRow>& rows);

/// Ramped half-and-half initial population: depths cycle over
/// [min_init_depth, max_init_depth], alternating full and grown trees.
std::vector<ExpressionTree> init_population(const GPConfig& cfg, Rng& rng);

/// Index of the lowest-RSS individual among k uniform draws (with
/// replacement) from the population.
std::size_t tournament_select(const std::vector<double>& fitness, std::size_t k, Rng& rng);

/// Swaps uniformly chosen subtrees between copies of a and b. A child
/// deeper than max_depth is rejected in favour of its parent.
std::pair<ExpressionTree, ExpressionTree> crossover(const ExpressionTree& a,
                                                    const ExpressionTree& b,
                                                    const GPConfig& cfg, Rng& rng);

/// Replaces a uniformly chosen subtree with a freshly grown one. A child
/// deeper than max_depth is rejected in favour of its parent.
ExpressionTree mutate(const ExpressionTree& a, const GPConfig& cfg, Rng& rng);

/// Runs the evolutionary loop and returns the best-ever individual by
/// train RSS. Deterministic for a fixed (train, cfg) pair: cfg.seed drives
/// every random draw. Throws ValidationError when no row carries a target
/// or all targets are identical.
ScoringModel evolve(const std::vector<FeatureRow>& train, const GPConfig& cfg,
                    const GenerationCallback& on_generation = nullptr);

// --- model file I/O ----------------------------------------------------------

/// Model file: `# key: value` header block (config, seed, schema, train and
/// test RSS) followed by the s-expression on its own line.
void save_model(const ScoringModel& model, std::ostream& out);
void save_model_file(const ScoringModel& model, const std::string& path);
ScoringModel load_model(std::istream& in);
ScoringModel load_model_file(const std::string& path);

} // namespace gppsm
