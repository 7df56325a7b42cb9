#include "gppsm/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "gppsm/errors.hpp"
#include "text_util.hpp"

namespace gppsm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Probability of placing a leaf at an eligible level while growing a tree.
constexpr double kGrowLeafProbability = 0.3;

// Grown mutation subtrees are at most this deep.
constexpr std::size_t kMutationDepth = 2;

std::size_t arity(const GeneNode& n) noexcept {
    return (n.kind == OpKind::Feature || n.kind == OpKind::Constant) ? 0 : 2;
}

const char* op_name(OpKind k) {
    switch (k) {
        case OpKind::Add: return "add";
        case OpKind::Sub: return "sub";
        case OpKind::Mul: return "mul";
        case OpKind::Div: return "div";
        default: return "";
    }
}

double apply_op(OpKind k, double a, double b) noexcept {
    switch (k) {
        case OpKind::Add: return a + b;
        case OpKind::Sub: return a - b;
        case OpKind::Mul: return a * b;
        default: return protected_div(a, b);
    }
}

std::size_t depth_at(const std::vector<GeneNode>& nodes, std::size_t& pos) {
    const GeneNode& n = nodes[pos++];
    if (arity(n) == 0) return 0;
    const std::size_t left = depth_at(nodes, pos);
    const std::size_t right = depth_at(nodes, pos);
    return 1 + std::max(left, right);
}

double eval_at(const std::vector<GeneNode>& nodes, std::size_t& pos,
               const FeatureVector& fv, bool& overflowed) {
    const GeneNode& n = nodes[pos++];
    if (n.kind == OpKind::Feature) return fv.value(n.feature);
    if (n.kind == OpKind::Constant) return n.value;
    const double a = eval_at(nodes, pos, fv, overflowed);
    const double b = eval_at(nodes, pos, fv, overflowed);
    const double r = apply_op(n.kind, a, b);
    if (!std::isfinite(r)) {
        overflowed = true;
        return 0.0;
    }
    return r;
}

GeneNode random_leaf(const GPConfig& cfg, Rng& rng) {
    // The constant generator occupies one slot next to the 11 features.
    const std::uint64_t pick = rng.below(FeatureVector::kCount + 1);
    GeneNode n;
    if (pick < FeatureVector::kCount) {
        n.kind = OpKind::Feature;
        n.feature = static_cast<std::uint8_t>(pick);
    } else {
        n.kind = OpKind::Constant;
        n.value = rng.uniform(cfg.constant_min, cfg.constant_max);
    }
    return n;
}

GeneNode random_op(Rng& rng) {
    static constexpr OpKind kOps[] = {OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Div};
    GeneNode n;
    n.kind = kOps[rng.below(4)];
    return n;
}

// Builds one subtree in prefix order. Full trees put leaves exactly at
// `max_d`; grown trees place internal nodes until `min_d`, then leaves with
// fixed probability, so the result's depth always lands in [min_d, max_d].
void build_tree(std::vector<GeneNode>& out, const GPConfig& cfg, Rng& rng,
                std::size_t depth, std::size_t min_d, std::size_t max_d, bool full) {
    bool leaf;
    if (depth >= max_d) {
        leaf = true;
    } else if (full) {
        leaf = false;
    } else if (depth < min_d) {
        leaf = false;
    } else {
        leaf = rng.coin(kGrowLeafProbability);
    }
    if (leaf) {
        out.push_back(random_leaf(cfg, rng));
        return;
    }
    out.push_back(random_op(rng));
    build_tree(out, cfg, rng, depth + 1, min_d, max_d, full);
    build_tree(out, cfg, rng, depth + 1, min_d, max_d, full);
}

ExpressionTree random_tree(const GPConfig& cfg, Rng& rng, std::size_t min_d,
                           std::size_t max_d, bool full) {
    std::vector<GeneNode> nodes;
    build_tree(nodes, cfg, rng, 0, min_d, max_d, full);
    return ExpressionTree(std::move(nodes));
}

} // namespace

// --- ExpressionTree ----------------------------------------------------------

ExpressionTree ExpressionTree::feature(std::size_t index) {
    if (index >= FeatureVector::kCount)
        throw ValidationError("feature index out of range: " + std::to_string(index));
    GeneNode n;
    n.kind = OpKind::Feature;
    n.feature = static_cast<std::uint8_t>(index);
    return ExpressionTree({n});
}

ExpressionTree ExpressionTree::constant(double v) {
    GeneNode n;
    n.kind = OpKind::Constant;
    n.value = v;
    return ExpressionTree({n});
}

std::size_t ExpressionTree::depth() const {
    if (nodes_.empty()) return 0;
    std::size_t pos = 0;
    return depth_at(nodes_, pos);
}

std::size_t ExpressionTree::subtree_size(std::size_t pos) const {
    if (pos >= nodes_.size())
        throw ValidationError("subtree position out of range");
    std::size_t end = pos;
    std::size_t missing = 1;
    while (missing > 0) {
        missing += arity(nodes_[end]);
        --missing;
        ++end;
    }
    return end - pos;
}

ExpressionTree ExpressionTree::subtree(std::size_t pos) const {
    const std::size_t len = subtree_size(pos);
    return ExpressionTree(std::vector<GeneNode>(nodes_.begin() + static_cast<std::ptrdiff_t>(pos),
                                                nodes_.begin() + static_cast<std::ptrdiff_t>(pos + len)));
}

ExpressionTree ExpressionTree::with_subtree(std::size_t pos, const ExpressionTree& replacement) const {
    const std::size_t len = subtree_size(pos);
    std::vector<GeneNode> out;
    out.reserve(nodes_.size() - len + replacement.size());
    out.insert(out.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(pos));
    out.insert(out.end(), replacement.nodes_.begin(), replacement.nodes_.end());
    out.insert(out.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(pos + len), nodes_.end());
    return ExpressionTree(std::move(out));
}

namespace {

void print_node(const std::vector<GeneNode>& nodes, std::size_t& pos, std::string& out) {
    const GeneNode& n = nodes[pos++];
    switch (n.kind) {
        case OpKind::Feature:
            out += FeatureVector::name(n.feature);
            return;
        case OpKind::Constant:
            out += detail::format_shortest(n.value);
            return;
        default:
            out += '(';
            out += op_name(n.kind);
            out += ' ';
            print_node(nodes, pos, out);
            out += ' ';
            print_node(nodes, pos, out);
            out += ')';
    }
}

std::vector<std::string> tokenize_sexpr(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        if (c == '(' || c == ')') {
            if (!cur.empty()) { tokens.push_back(cur); cur.clear(); }
            tokens.emplace_back(1, c);
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            if (!cur.empty()) { tokens.push_back(cur); cur.clear(); }
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

bool parse_feature_token(const std::string& tok, std::uint8_t& out) {
    if (tok.size() < 2 || tok[0] != 'f') return false;
    long idx = 0;
    if (!detail::parse_long(std::string_view(tok).substr(1), idx)) return false;
    if (idx < 1 || static_cast<std::size_t>(idx) > FeatureVector::kCount)
        throw ParseError("feature index out of range: " + tok);
    out = static_cast<std::uint8_t>(idx - 1);
    return true;
}

void parse_sexpr_node(const std::vector<std::string>& tokens, std::size_t& pos,
                      std::vector<GeneNode>& out, std::size_t nesting) {
    if (nesting > 1000) throw ParseError("expression nested too deeply");
    if (pos >= tokens.size()) throw ParseError("unexpected end of expression");
    const std::string& tok = tokens[pos++];
    if (tok == ")") throw ParseError("unexpected ')'");
    if (tok == "(") {
        if (pos >= tokens.size()) throw ParseError("unexpected end of expression");
        const std::string& op = tokens[pos++];
        GeneNode n;
        if (op == "add") n.kind = OpKind::Add;
        else if (op == "sub") n.kind = OpKind::Sub;
        else if (op == "mul") n.kind = OpKind::Mul;
        else if (op == "div") n.kind = OpKind::Div;
        else throw ParseError("unknown operator: " + op);
        out.push_back(n);
        parse_sexpr_node(tokens, pos, out, nesting + 1);
        parse_sexpr_node(tokens, pos, out, nesting + 1);
        if (pos >= tokens.size() || tokens[pos] != ")")
            throw ParseError("expected ')' after operands of " + op);
        ++pos;
        return;
    }
    GeneNode n;
    std::uint8_t fidx = 0;
    if (parse_feature_token(tok, fidx)) {
        n.kind = OpKind::Feature;
        n.feature = fidx;
    } else {
        double v = 0.0;
        if (!detail::parse_double(tok, v))
            throw ParseError("unrecognised token: " + tok);
        n.kind = OpKind::Constant;
        n.value = v;
    }
    out.push_back(n);
}

} // namespace

std::string ExpressionTree::to_sexpr() const {
    if (nodes_.empty()) throw ValidationError("cannot serialise an empty tree");
    std::string out;
    std::size_t pos = 0;
    print_node(nodes_, pos, out);
    return out;
}

ExpressionTree ExpressionTree::from_sexpr(const std::string& text) {
    const auto tokens = tokenize_sexpr(text);
    if (tokens.empty()) throw ParseError("empty expression");
    std::vector<GeneNode> nodes;
    std::size_t pos = 0;
    parse_sexpr_node(tokens, pos, nodes, 0);
    if (pos != tokens.size())
        throw ParseError("trailing content after expression: " + tokens[pos]);
    return ExpressionTree(std::move(nodes));
}

// --- evaluation and fitness --------------------------------------------------

double protected_div(double a, double b) noexcept {
    if (std::fabs(b) <= 1e-12) return 1.0;
    return a / b;
}

double eval_tree(const ExpressionTree& t, const FeatureVector& fv) {
    bool overflowed = false;
    return eval_tree(t, fv, overflowed);
}

double eval_tree(const ExpressionTree& t, const FeatureVector& fv, bool& overflowed) {
    if (t.empty()) throw ValidationError("cannot evaluate an empty tree");
    std::size_t pos = 0;
    return eval_at(t.nodes(), pos, fv, overflowed);
}

double rss(const std::vector<double>& predictions, const std::vector<double>& targets) {
    if (predictions.size() != targets.size())
        throw ValidationError("prediction and target counts differ");
    if (targets.empty())
        throw ValidationError("cannot compute error on an empty set");
    double mean = 0.0;
    for (double y : targets) mean += y;
    mean /= static_cast<double>(targets.size());
    double denom = 0.0;
    for (double y : targets) denom += (mean - y) * (mean - y);
    if (denom == 0.0)
        throw ValidationError("all targets are identical; relative error is undefined");
    double num = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double d = predictions[i] - targets[i];
        num += d * d;
    }
    return num / denom;
}

double model_rss(const ExpressionTree& tree, const std::vector<FeatureRow>& rows) {
    std::vector<double> predictions;
    std::vector<double> targets;
    predictions.reserve(rows.size());
    targets.reserve(rows.size());
    for (const auto& row : rows) {
        if (!row.features.target) continue;
        predictions.push_back(eval_tree(tree, row.features));
        targets.push_back(*row.features.target);
    }
    if (targets.empty())
        throw ValidationError("no rows carry a regression target");
    return rss(predictions, targets);
}

// --- configuration -----------------------------------------------------------

void GPConfig::validate() const {
    if (population_size == 0) throw ValidationError("population_size must be positive");
    if (crossover_rate < 0.0 || crossover_rate > 1.0)
        throw ValidationError("crossover_rate must lie in [0, 1]");
    if (mutation_rate < 0.0 || mutation_rate > 1.0)
        throw ValidationError("mutation_rate must lie in [0, 1]");
    if (crossover_rate + mutation_rate > 1.0)
        throw ValidationError("crossover_rate + mutation_rate must not exceed 1");
    if (tournament_size == 0) throw ValidationError("tournament_size must be positive");
    if (elitism > population_size)
        throw ValidationError("elitism cannot exceed population_size");
    if (min_init_depth > max_init_depth)
        throw ValidationError("min_init_depth cannot exceed max_init_depth");
    if (max_depth < max_init_depth)
        throw ValidationError("max_depth cannot be smaller than max_init_depth");
    if (constant_min > constant_max)
        throw ValidationError("constant_min cannot exceed constant_max");
    if (target_rss && !(*target_rss > 0.0))
        throw ValidationError("target_rss must be positive");
    if (threads == 0) throw ValidationError("threads must be positive");
}

std::vector<std::string> ScoringModel::default_schema() {
    std::vector<std::string> names;
    names.reserve(FeatureVector::kCount);
    for (std::size_t i = 0; i < FeatureVector::kCount; ++i)
        names.emplace_back(FeatureVector::name(i));
    return names;
}

// --- variation operators -----------------------------------------------------

std::vector<ExpressionTree> init_population(const GPConfig& cfg, Rng& rng) {
    cfg.validate();
    std::vector<ExpressionTree> pop;
    pop.reserve(cfg.population_size);
    const std::size_t span = cfg.max_init_depth - cfg.min_init_depth + 1;
    for (std::size_t i = 0; i < cfg.population_size; ++i) {
        const std::size_t depth = cfg.min_init_depth + i % span;
        const bool full = ((i / span) % 2) == 0;
        pop.push_back(random_tree(cfg, rng, cfg.min_init_depth, depth, full));
    }
    return pop;
}

std::size_t tournament_select(const std::vector<double>& fitness, std::size_t k, Rng& rng) {
    if (fitness.empty()) throw ValidationError("cannot select from an empty population");
    if (k == 0) throw ValidationError("tournament_size must be positive");
    std::size_t best = static_cast<std::size_t>(rng.below(fitness.size()));
    for (std::size_t i = 1; i < k; ++i) {
        const std::size_t cand = static_cast<std::size_t>(rng.below(fitness.size()));
        if (fitness[cand] < fitness[best]) best = cand;
    }
    return best;
}

std::pair<ExpressionTree, ExpressionTree> crossover(const ExpressionTree& a,
                                                    const ExpressionTree& b,
                                                    const GPConfig& cfg, Rng& rng) {
    if (a.empty() || b.empty()) throw ValidationError("cannot cross empty trees");
    const std::size_t i = static_cast<std::size_t>(rng.below(a.size()));
    const std::size_t j = static_cast<std::size_t>(rng.below(b.size()));
    ExpressionTree c1 = a.with_subtree(i, b.subtree(j));
    ExpressionTree c2 = b.with_subtree(j, a.subtree(i));
    if (c1.depth() > cfg.max_depth) c1 = a;
    if (c2.depth() > cfg.max_depth) c2 = b;
    return {std::move(c1), std::move(c2)};
}

ExpressionTree mutate(const ExpressionTree& a, const GPConfig& cfg, Rng& rng) {
    if (a.empty()) throw ValidationError("cannot mutate an empty tree");
    const std::size_t i = static_cast<std::size_t>(rng.below(a.size()));
    const std::size_t depth = static_cast<std::size_t>(rng.range(0, kMutationDepth));
    ExpressionTree child = a.with_subtree(i, random_tree(cfg, rng, 0, depth, false));
    if (child.depth() > cfg.max_depth) return a;
    return child;
}

// --- evolution ---------------------------------------------------------------

namespace {

struct Individual {
    ExpressionTree tree;
    double fit = kInf;
    bool evaluated = false;
};

struct TrainingData {
    std::vector<FeatureVector> inputs;
    std::vector<double> targets;
    double target_mean = 0.0;
    double denom = 0.0;  // sum of squared deviations from the mean
};

TrainingData prepare_training(const std::vector<FeatureRow>& rows) {
    TrainingData data;
    for (const auto& row : rows) {
        if (!row.features.target) continue;
        data.inputs.push_back(row.features);
        data.targets.push_back(*row.features.target);
    }
    if (data.targets.empty())
        throw ValidationError("no training rows carry a regression target");
    for (double y : data.targets) data.target_mean += y;
    data.target_mean /= static_cast<double>(data.targets.size());
    for (double y : data.targets) {
        const double d = data.target_mean - y;
        data.denom += d * d;
    }
    if (data.denom == 0.0)
        throw ValidationError("all training targets are identical; fitness is undefined");
    return data;
}

// Relative squared error of one tree over the training rows. Any clamped
// overflow marks the individual as unusable.
double fitness_of(const ExpressionTree& tree, const TrainingData& data) {
    bool overflowed = false;
    double num = 0.0;
    for (std::size_t i = 0; i < data.inputs.size(); ++i) {
        const double pred = eval_tree(tree, data.inputs[i], overflowed);
        const double d = pred - data.targets[i];
        num += d * d;
    }
    if (overflowed || !std::isfinite(num)) return kInf;
    return num / data.denom;
}

void evaluate_population(std::vector<Individual>& pop, const TrainingData& data,
                         unsigned threads) {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (!pop[i].evaluated) pending.push_back(i);
    if (pending.empty()) return;

    const auto eval_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            Individual& ind = pop[pending[k]];
            ind.fit = fitness_of(ind.tree, data);
            ind.evaluated = true;
        }
    };

    const std::size_t workers =
        std::min<std::size_t>(threads, pending.size());
    if (workers <= 1) {
        eval_range(0, pending.size());
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    const std::size_t chunk = (pending.size() + workers - 1) / workers;
    for (std::size_t w = 1; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(pending.size(), lo + chunk);
        if (lo < hi) pool.emplace_back(eval_range, lo, hi);
    }
    eval_range(0, std::min(pending.size(), chunk));
    for (auto& t : pool) t.join();
}

GenerationStats stats_of(const std::vector<Individual>& pop, std::size_t generation) {
    GenerationStats s;
    s.generation = generation;
    s.best_rss = kInf;
    std::size_t best = 0;
    double sum = 0.0;
    std::size_t finite = 0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (pop[i].fit < s.best_rss) {
            s.best_rss = pop[i].fit;
            best = i;
        }
        if (std::isfinite(pop[i].fit)) {
            sum += pop[i].fit;
            ++finite;
        }
    }
    s.mean_rss = finite > 0 ? sum / static_cast<double>(finite) : kInf;
    s.best_size = pop[best].tree.size();
    return s;
}

} // namespace

ScoringModel evolve(const std::vector<FeatureRow>& train, const GPConfig& cfg,
                    const GenerationCallback& on_generation) {
    cfg.validate();
    const TrainingData data = prepare_training(train);
    Rng rng(cfg.seed);

    std::vector<Individual> pop;
    pop.reserve(cfg.population_size);
    for (auto& tree : init_population(cfg, rng))
        pop.push_back({std::move(tree), kInf, false});
    evaluate_population(pop, data, cfg.threads);

    ExpressionTree best_tree = pop.front().tree;
    double best_fit = pop.front().fit;
    const auto track_best = [&] {
        for (const auto& ind : pop) {
            if (ind.fit < best_fit) {
                best_fit = ind.fit;
                best_tree = ind.tree;
            }
        }
    };
    track_best();
    if (on_generation) on_generation(stats_of(pop, 0));

    std::vector<double> fitness(pop.size());
    std::vector<std::size_t> order(pop.size());
    for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
        if (cfg.target_rss && best_fit < *cfg.target_rss) break;

        for (std::size_t i = 0; i < pop.size(); ++i) fitness[i] = pop[i].fit;
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return fitness[a] < fitness[b];
        });

        std::vector<Individual> next;
        next.reserve(cfg.population_size);
        for (std::size_t e = 0; e < cfg.elitism; ++e)
            next.push_back(pop[order[e]]);

        while (next.size() < cfg.population_size) {
            const double r = rng.uniform();
            if (r < cfg.crossover_rate) {
                const std::size_t i = tournament_select(fitness, cfg.tournament_size, rng);
                const std::size_t j = tournament_select(fitness, cfg.tournament_size, rng);
                auto [c1, c2] = crossover(pop[i].tree, pop[j].tree, cfg, rng);
                next.push_back({std::move(c1), kInf, false});
                if (next.size() < cfg.population_size)
                    next.push_back({std::move(c2), kInf, false});
            } else if (r < cfg.crossover_rate + cfg.mutation_rate) {
                const std::size_t i = tournament_select(fitness, cfg.tournament_size, rng);
                next.push_back({mutate(pop[i].tree, cfg, rng), kInf, false});
            } else {
                const std::size_t i = tournament_select(fitness, cfg.tournament_size, rng);
                next.push_back(pop[i]);
            }
        }

        pop = std::move(next);
        evaluate_population(pop, data, cfg.threads);
        track_best();
        if (on_generation) on_generation(stats_of(pop, gen));
    }

    ScoringModel model;
    model.tree = std::move(best_tree);
    model.train_rss = best_fit;
    model.config = cfg;
    model.feature_schema = ScoringModel::default_schema();
    return model;
}

// --- model file I/O ----------------------------------------------------------

namespace {

constexpr const char* kModelMagic = "gppsm model v1";

std::string join_schema(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) out += ' ';
        out += names[i];
    }
    return out;
}

} // namespace

void save_model(const ScoringModel& model, std::ostream& out) {
    const GPConfig& c = model.config;
    out << "# " << kModelMagic << '\n';
    out << "# population_size: " << c.population_size << '\n';
    out << "# generations: " << c.generations << '\n';
    out << "# crossover_rate: " << detail::format_shortest(c.crossover_rate) << '\n';
    out << "# mutation_rate: " << detail::format_shortest(c.mutation_rate) << '\n';
    out << "# tournament_size: " << c.tournament_size << '\n';
    out << "# elitism: " << c.elitism << '\n';
    out << "# min_init_depth: " << c.min_init_depth << '\n';
    out << "# max_init_depth: " << c.max_init_depth << '\n';
    out << "# max_depth: " << c.max_depth << '\n';
    out << "# constant_min: " << detail::format_shortest(c.constant_min) << '\n';
    out << "# constant_max: " << detail::format_shortest(c.constant_max) << '\n';
    out << "# seed: " << c.seed << '\n';
    out << "# target_rss: "
        << (c.target_rss ? detail::format_shortest(*c.target_rss) : std::string("na")) << '\n';
    out << "# features: " << join_schema(model.feature_schema) << '\n';
    out << "# train_rss: " << detail::format_shortest(model.train_rss) << '\n';
    out << "# test_rss: "
        << (model.test_rss ? detail::format_shortest(*model.test_rss) : std::string("na")) << '\n';
    out << model.tree.to_sexpr() << '\n';
}

void save_model_file(const ScoringModel& model, const std::string& path) {
    auto out = detail::open_output(path);
    save_model(model, out);
}

namespace {

std::uint64_t parse_u64_field(const std::string& value, const std::string& key, std::size_t lineno) {
    long v = 0;
    if (!detail::parse_long(value, v) || v < 0)
        throw ParseError("invalid " + key + " value: " + value, lineno);
    return static_cast<std::uint64_t>(v);
}

double parse_double_field(const std::string& value, const std::string& key, std::size_t lineno) {
    double v = 0.0;
    if (!detail::parse_double(value, v))
        throw ParseError("invalid " + key + " value: " + value, lineno);
    return v;
}

} // namespace

ScoringModel load_model(std::istream& in) {
    ScoringModel model;
    model.feature_schema = ScoringModel::default_schema();
    bool have_expr = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        if (trimmed[0] != '#') {
            model.tree = ExpressionTree::from_sexpr(std::string(trimmed));
            have_expr = true;
            break;
        }
        auto body = detail::trim(trimmed.substr(1));
        const auto colon = body.find(':');
        if (colon == std::string_view::npos) continue;  // magic line or free comment
        const std::string key{detail::trim(body.substr(0, colon))};
        const std::string value{detail::trim(body.substr(colon + 1))};
        GPConfig& c = model.config;
        if (key == "population_size") c.population_size = parse_u64_field(value, key, lineno);
        else if (key == "generations") c.generations = parse_u64_field(value, key, lineno);
        else if (key == "crossover_rate") c.crossover_rate = parse_double_field(value, key, lineno);
        else if (key == "mutation_rate") c.mutation_rate = parse_double_field(value, key, lineno);
        else if (key == "tournament_size") c.tournament_size = parse_u64_field(value, key, lineno);
        else if (key == "elitism") c.elitism = parse_u64_field(value, key, lineno);
        else if (key == "min_init_depth") c.min_init_depth = parse_u64_field(value, key, lineno);
        else if (key == "max_init_depth") c.max_init_depth = parse_u64_field(value, key, lineno);
        else if (key == "max_depth") c.max_depth = parse_u64_field(value, key, lineno);
        else if (key == "constant_min") c.constant_min = parse_double_field(value, key, lineno);
        else if (key == "constant_max") c.constant_max = parse_double_field(value, key, lineno);
        else if (key == "seed") c.seed = parse_u64_field(value, key, lineno);
        else if (key == "target_rss")
            c.target_rss = value == "na" ? std::nullopt
                                         : std::optional<double>(parse_double_field(value, key, lineno));
        else if (key == "features") {
            model.feature_schema.clear();
            for (auto name : detail::split_ws(value))
                model.feature_schema.emplace_back(name);
        } else if (key == "train_rss")
            model.train_rss = parse_double_field(value, key, lineno);
        else if (key == "test_rss")
            model.test_rss = value == "na" ? std::nullopt
                                           : std::optional<double>(parse_double_field(value, key, lineno));
        // Unknown keys are ignored so newer writers stay readable.
    }
    if (!have_expr) throw ParseError("model file has no expression line");
    if (model.feature_schema.size() != FeatureVector::kCount)
        throw ParseError("model feature schema must list " +
                         std::to_string(FeatureVector::kCount) + " features");
    while (std::getline(in, line)) {
        ++lineno;
        if (!detail::trim(line).empty())
            throw ParseError("unexpected content after expression", lineno);
    }
    return model;
}

ScoringModel load_model_file(const std::string& path) {
    auto in = detail::open_input(path);
    return load_model(in);
}

} // namespace gppsm
