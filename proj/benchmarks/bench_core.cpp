// Microbenchmarks for the hot paths: fragment prediction, feature
// extraction, tree evaluation, and the evolutionary loop. Run manually via
// ./benchmarks/gppsm_bench; they are not part of the test suite.

#include <benchmark/benchmark.h>

#include "gppsm/features.hpp"
#include "gppsm/gp.hpp"
#include "gppsm/mgf.hpp"
#include "gppsm/rerank.hpp"
#include "gppsm/rng.hpp"
#include "gppsm/synth.hpp"
#include "gppsm/theoretical.hpp"

using namespace gppsm;

namespace {

const MassTable& masses() {
    static const MassTable t = MassTable::builtin();
    return t;
}

// One shared synthetic dataset so every benchmark sees realistic spectra.
const SynthDataset& dataset() {
    static const SynthDataset data = [] {
        SynthSpec spec;
        spec.n_spectra = 100;
        spec.seed = 7;
        return generate_dataset(spec, masses(), FeatureConfig{});
    }();
    return data;
}

std::string truth_of(const std::string& spectrum_id) {
    for (const auto& c : dataset().candidates)
        if (c.spectrum_id == spectrum_id && c.is_correct) return c.peptide;
    return {};
}

std::vector<FeatureRow> labelled_rows() {
    std::vector<FeatureRow> rows;
    for (std::size_t i = 0; i < dataset().spectra.size(); ++i) {
        const auto& s = dataset().spectra[i];
        FeatureRow row;
        row.spectrum_id = s.id;
        row.rank = 1;
        row.peptide = truth_of(s.id);
        row.features = extract_features(s, Peptide(row.peptide), masses(), FeatureConfig{});
        row.features.target = dataset().targets[i].target;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

static void BM_GenerateTheoretical(benchmark::State& state) {
    const Peptide p("LGEYGFQNALLVK");
    for (auto _ : state) benchmark::DoNotOptimize(generate_theoretical(p, masses()));
}
BENCHMARK(BM_GenerateTheoretical);

static void BM_ExtractFeatures(benchmark::State& state) {
    const auto& s = dataset().spectra[0];
    const Peptide p(truth_of(s.id));
    for (auto _ : state)
        benchmark::DoNotOptimize(extract_features(s, p, masses(), FeatureConfig{}));
}
BENCHMARK(BM_ExtractFeatures);

static void BM_ParseMgf(benchmark::State& state) {
    const auto text = serialize_mgf(dataset().spectra, masses());
    for (auto _ : state) benchmark::DoNotOptimize(parse_mgf(text, masses()));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseMgf);

static void BM_SerializeMgf(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(serialize_mgf(dataset().spectra, masses()));
}
BENCHMARK(BM_SerializeMgf);

static void BM_EvalTree(benchmark::State& state) {
    // A representative mid-sized evolved expression.
    const auto tree = ExpressionTree::from_sexpr(
        "(add (mul (sub f1 (div f3 f2)) (add f7 (mul 0.5 f10))) "
        "(sub (add f1 (mul 2 f2)) (div f3 (add f8 0.125))))");
    FeatureVector f;
    Rng rng(3);
    for (std::size_t i = 0; i < FeatureVector::kCount; ++i) f.value(i) = rng.uniform(-5.0, 5.0);
    for (auto _ : state) benchmark::DoNotOptimize(eval_tree(tree, f));
}
BENCHMARK(BM_EvalTree);

static void BM_ModelRss(benchmark::State& state) {
    const auto rows = labelled_rows();
    const auto tree = ExpressionTree::from_sexpr("(sub (add f1 (mul 2 f2)) f3)");
    for (auto _ : state) benchmark::DoNotOptimize(model_rss(tree, rows));
}
BENCHMARK(BM_ModelRss);

static void BM_Rescore(benchmark::State& state) {
    ScoringModel model;
    model.tree = ExpressionTree::from_sexpr("(sub (add f1 (mul 2 f2)) f3)");
    model.feature_schema = ScoringModel::default_schema();

    std::vector<FeatureRow> rows;
    std::unordered_map<std::string, const Spectrum*> by_id;
    for (const auto& s : dataset().spectra) by_id.emplace(s.id, &s);
    for (const auto& c : dataset().candidates) {
        FeatureRow row;
        row.spectrum_id = c.spectrum_id;
        row.rank = c.rank;
        row.peptide = c.peptide;
        row.is_correct = c.is_correct;
        row.features =
            extract_features(*by_id.at(c.spectrum_id), Peptide(c.peptide), masses(),
                             FeatureConfig{});
        rows.push_back(std::move(row));
    }
    const auto sets = group_candidates(rows);

    for (auto _ : state) {
        auto copy = sets;
        rescore(model, copy);
        benchmark::DoNotOptimize(compute_fpr(copy, RankingKind::Rescored));
    }
}
BENCHMARK(BM_Rescore);

static void BM_EvolveSmall(benchmark::State& state) {
    const auto rows = labelled_rows();
    for (auto _ : state) {
        GPConfig cfg;
        cfg.population_size = 50;
        cfg.generations = 5;
        cfg.seed = 11;
        benchmark::DoNotOptimize(evolve(rows, cfg));
    }
}
BENCHMARK(BM_EvolveSmall)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
