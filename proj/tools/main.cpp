// gppsm: learn a peptide-spectrum-match scoring function by genetic
// programming and re-rank de novo sequencing candidates with it.
//
// Subcommands cover the full pipeline:
//   synth     generate a synthetic benchmark dataset
//   features  extract the 11 similarity features per candidate PSM
//   train     evolve a scoring expression on a labelled feature table
//   rescore   apply a trained model to a feature table
//   evaluate  compare baseline and rescored rankings by FPR
//
// Default paths chain the subcommands, so running them in order in one
// directory completes end to end without any flags.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "CLI11.hpp"

#include "gppsm/errors.hpp"
#include "gppsm/features.hpp"
#include "gppsm/gp.hpp"
#include "gppsm/mass.hpp"
#include "gppsm/mgf.hpp"
#include "gppsm/rerank.hpp"
#include "gppsm/rng.hpp"
#include "gppsm/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;       // unexpected failure
constexpr int kExitMissingFile = 2; // an input file does not exist
constexpr int kExitParse = 3;       // malformed input file
constexpr int kExitValidation = 4;  // invalid configuration or data
constexpr int kExitUsage = 64;      // command line could not be parsed

struct MissingFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const std::string& path) {
    if (!fs::is_regular_file(path))
        throw MissingFileError("no such file: " + path);
}

gppsm::MassTable load_masses(const std::string& path) {
    if (path.empty()) return gppsm::MassTable::builtin();
    require_file(path);
    return gppsm::MassTable::load(path);
}

// The strict dataset profile: doubly charged spectra up to 1150 Da with
// candidate peptides of 7 to 12 residues.
struct StrictProfile {
    int charge = 2;
    double max_precursor = 1150.0;
    std::size_t min_length = 7;
    std::size_t max_length = 12;
};

struct FeaturesArgs {
    std::string mgf_path = "spectra.mgf";
    std::string candidates_path = "candidates.tsv";
    std::string targets_path = "targets.tsv";
    bool targets_explicit = false;
    std::string out_path = "features.tsv";
    std::string mass_table_path;
    bool strict = false;
    gppsm::FeatureConfig config;
};

void cmd_features(const FeaturesArgs& args, bool verbose) {
    require_file(args.mgf_path);
    require_file(args.candidates_path);
    const auto masses = load_masses(args.mass_table_path);

    auto spectra = gppsm::parse_mgf_file(args.mgf_path, masses);
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < spectra.size(); ++i)
        if (!by_id.emplace(spectra[i].id, i).second)
            throw gppsm::ValidationError("duplicate spectrum id: " + spectra[i].id);

    auto candidates = gppsm::read_candidate_table_file(args.candidates_path);

    std::unordered_map<std::string, double> targets;
    const bool have_targets =
        args.targets_explicit ? (require_file(args.targets_path), true)
                              : fs::is_regular_file(args.targets_path);
    if (have_targets)
        for (const auto& row : gppsm::read_target_table_file(args.targets_path))
            targets[row.spectrum_id] = row.target;

    std::unordered_set<std::string> excluded;
    if (args.strict) {
        const StrictProfile profile;
        for (const auto& s : spectra)
            if (s.charge != profile.charge || s.precursor_mass > profile.max_precursor)
                excluded.insert(s.id);
        for (const auto& c : candidates)
            if (c.peptide.size() < profile.min_length || c.peptide.size() > profile.max_length)
                excluded.insert(c.spectrum_id);
    }

    std::vector<gppsm::FeatureRow> rows;
    rows.reserve(candidates.size());
    for (const auto& c : candidates) {
        if (excluded.count(c.spectrum_id)) continue;
        const auto it = by_id.find(c.spectrum_id);
        if (it == by_id.end())
            throw gppsm::ValidationError("candidate references unknown spectrum: " +
                                         c.spectrum_id);
        gppsm::FeatureRow row;
        row.spectrum_id = c.spectrum_id;
        row.rank = c.rank;
        row.peptide = c.peptide;
        row.is_correct = c.is_correct;
        row.features = gppsm::extract_features(spectra[it->second], gppsm::Peptide(c.peptide),
                                               masses, args.config);
        if (c.is_correct) {
            const auto t = targets.find(c.spectrum_id);
            if (t != targets.end()) row.features.target = t->second;
        }
        rows.push_back(std::move(row));
    }
    gppsm::write_feature_table_file(rows, args.out_path);

    if (verbose)
        std::cerr << "features: " << rows.size() << " rows from " << spectra.size()
                  << " spectra (" << excluded.size() << " spectra excluded)\n";
}

struct TrainArgs {
    std::string features_path = "features.tsv";
    std::string out_path = "model.txt";
    gppsm::GPConfig config;
    double split = 0.7;
};

void cmd_train(const TrainArgs& args, bool verbose) {
    require_file(args.features_path);
    if (!(args.split > 0.0 && args.split <= 1.0))
        throw gppsm::ValidationError("split fraction must lie in (0, 1]");

    auto rows = gppsm::read_feature_table_file(args.features_path);
    std::vector<gppsm::FeatureRow> labelled;
    for (auto& row : rows)
        if (row.features.target) labelled.push_back(std::move(row));
    if (labelled.empty())
        throw gppsm::ValidationError("no feature rows carry a regression target");

    gppsm::Rng rng(args.config.seed);
    rng.shuffle(labelled);
    auto n_train = static_cast<std::size_t>(
        args.split * static_cast<double>(labelled.size()) + 0.5);
    n_train = std::min(std::max<std::size_t>(n_train, 1), labelled.size());
    const std::vector<gppsm::FeatureRow> train(labelled.begin(),
                                               labelled.begin() + static_cast<std::ptrdiff_t>(n_train));
    const std::vector<gppsm::FeatureRow> test(labelled.begin() + static_cast<std::ptrdiff_t>(n_train),
                                              labelled.end());

    gppsm::GenerationCallback callback;
    if (verbose)
        callback = [](const gppsm::GenerationStats& s) {
            std::fprintf(stderr, "gen %zu  best %.6g  mean %.6g  size %zu\n", s.generation,
                         s.best_rss, s.mean_rss, s.best_size);
        };

    auto model = gppsm::evolve(train, args.config, callback);

    if (!test.empty()) {
        try {
            model.test_rss = gppsm::model_rss(model.tree, test);
        } catch (const gppsm::ValidationError& e) {
            std::cerr << "warning: test RSS unavailable: " << e.what() << "\n";
        }
    }
    gppsm::save_model_file(model, args.out_path);

    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", model.train_rss);
    std::cout << "train_rss\t" << buf << "\n";
    if (model.test_rss) {
        std::snprintf(buf, sizeof buf, "%.17g", *model.test_rss);
        std::cout << "test_rss\t" << buf << "\n";
    } else {
        std::cout << "test_rss\tna\n";
    }
    std::cout << "train_rows\t" << train.size() << "\n";
    std::cout << "test_rows\t" << test.size() << "\n";
    std::cout << "tree_size\t" << model.tree.size() << "\n";
    std::cout << "tree_depth\t" << model.tree.depth() << "\n";
}

struct RescoreArgs {
    std::string model_path = "model.txt";
    std::string features_path = "features.tsv";
    std::string out_path = "ranked.tsv";
};

void cmd_rescore(const RescoreArgs& args, bool verbose) {
    require_file(args.model_path);
    require_file(args.features_path);
    const auto model = gppsm::load_model_file(args.model_path);
    const auto rows = gppsm::read_feature_table_file(args.features_path);
    auto sets = gppsm::group_candidates(rows);
    if (sets.empty()) throw gppsm::ValidationError("feature table holds no candidates");
    gppsm::rescore(model, sets);
    gppsm::write_ranked_table_file(sets, args.out_path);
    if (verbose) std::cerr << "rescore: " << sets.size() << " candidate sets\n";
}

struct EvaluateArgs {
    std::string ranked_path = "ranked.tsv";
    std::string report_path;
};

void cmd_evaluate(const EvaluateArgs& args) {
    require_file(args.ranked_path);
    const auto sets = gppsm::read_ranked_table_file(args.ranked_path);
    const auto before = gppsm::compute_fpr(sets, gppsm::RankingKind::Baseline);
    const auto after = gppsm::compute_fpr(sets, gppsm::RankingKind::Rescored);
    const auto delta = gppsm::compare_reports(before, after);
    gppsm::print_report(before, after, delta, std::cout);
    if (!args.report_path.empty()) {
        std::ofstream out(args.report_path);
        if (!out)
            throw gppsm::ValidationError("cannot open output file: " + args.report_path);
        gppsm::write_report(before, after, delta, out);
    }
}

struct SynthArgs {
    std::string out_dir = ".";
    std::string mass_table_path;
    gppsm::SynthSpec spec;
    gppsm::FeatureConfig config;
};

void cmd_synth(const SynthArgs& args, bool verbose) {
    const auto masses = load_masses(args.mass_table_path);
    const auto dataset = gppsm::generate_dataset(args.spec, masses, args.config);
    fs::create_directories(args.out_dir);
    const auto dir = fs::path(args.out_dir);
    gppsm::write_mgf_file(dataset.spectra, (dir / "spectra.mgf").string(), masses);
    gppsm::write_candidate_table_file(dataset.candidates, (dir / "candidates.tsv").string());
    gppsm::write_target_table_file(dataset.targets, (dir / "targets.tsv").string());
    if (verbose)
        std::cerr << "synth: " << dataset.spectra.size() << " spectra, "
                  << dataset.candidates.size() << " candidates -> " << args.out_dir << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GP-evolved scoring for peptide-spectrum match re-ranking"};
    app.set_version_flag("--version", "gppsm 0.1.0");
    app.set_config("--config", "", "Key-value file overriding option defaults");
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Progress details on stderr");

    FeaturesArgs features_args;
    auto* features = app.add_subcommand("features", "Extract PSM features from spectra and candidates");
    features->add_option("--mgf", features_args.mgf_path, "Input MGF spectra")->capture_default_str();
    features->add_option("--candidates", features_args.candidates_path,
                         "Input candidate table (TSV)")->capture_default_str();
    auto* targets_opt = features->add_option("--targets", features_args.targets_path,
                                             "Target table joined onto correct PSMs")->capture_default_str();
    features->add_option("--out", features_args.out_path, "Output feature table")->capture_default_str();
    features->add_option("--mass-table", features_args.mass_table_path,
                         "Residue mass table replacing the built-in values");
    features->add_option("--tolerance", features_args.config.tolerance,
                         "Fragment match tolerance (Da)")->capture_default_str();
    features->add_option("--bins", features_args.config.fixed_bins,
                         "Fixed binned-vector length")->capture_default_str();
    features->add_option("--bin-width", features_args.config.bin_width, "Bin width (Da)")->capture_default_str();
    features->add_flag("--strict-input", features_args.strict,
                       "Keep only charge-2 spectra up to 1150 Da with length 7-12 candidates");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Evolve a scoring expression on a feature table");
    train->add_option("--features", train_args.features_path, "Input feature table")->capture_default_str();
    train->add_option("--out", train_args.out_path, "Output model file")->capture_default_str();
    train->add_option("--pop-size", train_args.config.population_size, "Population size")->capture_default_str();
    train->add_option("--generations", train_args.config.generations, "Generation count")->capture_default_str();
    train->add_option("--cxpb", train_args.config.crossover_rate, "Crossover probability")->capture_default_str();
    train->add_option("--mutpb", train_args.config.mutation_rate, "Mutation probability")->capture_default_str();
    train->add_option("--tournament", train_args.config.tournament_size, "Tournament size")->capture_default_str();
    train->add_option("--elitism", train_args.config.elitism, "Elites copied per generation")->capture_default_str();
    train->add_option("--min-init-depth", train_args.config.min_init_depth,
                      "Minimum initial tree depth")->capture_default_str();
    train->add_option("--max-init-depth", train_args.config.max_init_depth,
                      "Maximum initial tree depth")->capture_default_str();
    train->add_option("--max-depth", train_args.config.max_depth, "Hard tree depth limit")->capture_default_str();
    train->add_option("--constant-min", train_args.config.constant_min,
                      "Ephemeral constant lower bound")->capture_default_str();
    train->add_option("--constant-max", train_args.config.constant_max,
                      "Ephemeral constant upper bound")->capture_default_str();
    std::optional<double> target_rss;
    train->add_option("--target-rss", target_rss, "Stop once best train RSS drops below");
    train->add_option("--split", train_args.split, "Training fraction of labelled rows")->capture_default_str();
    train->add_option("--seed", train_args.config.seed, "Random seed")->capture_default_str();
    train->add_option("--threads", train_args.config.threads, "Fitness evaluation workers")->capture_default_str()
        ->envname("GPPSM_THREADS");

    RescoreArgs rescore_args;
    auto* rescore = app.add_subcommand("rescore", "Apply a trained model to a feature table");
    rescore->add_option("--model", rescore_args.model_path, "Trained model file")->capture_default_str();
    rescore->add_option("--features", rescore_args.features_path, "Input feature table")->capture_default_str();
    rescore->add_option("--out", rescore_args.out_path, "Output ranked table")->capture_default_str();

    EvaluateArgs evaluate_args;
    auto* evaluate = app.add_subcommand("evaluate", "Report FPR before and after rescoring");
    evaluate->add_option("--ranked", evaluate_args.ranked_path, "Ranked table from rescore")->capture_default_str();
    evaluate->add_option("--out", evaluate_args.report_path, "Machine-readable report path");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic benchmark dataset");
    synth->add_option("--out-dir", synth_args.out_dir, "Output directory")->capture_default_str();
    synth->add_option("--n-spectra", synth_args.spec.n_spectra, "Number of spectra")->capture_default_str();
    synth->add_option("--candidates-per-spectrum", synth_args.spec.candidates_per_spectrum,
                      "Candidates per spectrum (true peptide plus decoys)")->capture_default_str();
    synth->add_option("--min-length", synth_args.spec.min_peptide_length,
                      "Minimum peptide length")->capture_default_str();
    synth->add_option("--max-length", synth_args.spec.max_peptide_length,
                      "Maximum peptide length")->capture_default_str();
    synth->add_option("--charge", synth_args.spec.charge, "Precursor charge")->capture_default_str();
    synth->add_option("--max-precursor", synth_args.spec.max_precursor,
                      "Neutral precursor mass cap (Da)")->capture_default_str();
    synth->add_option("--noise-peaks", synth_args.spec.noise_peaks,
                      "Random noise peaks per spectrum")->capture_default_str();
    synth->add_option("--dropout", synth_args.spec.peak_dropout,
                      "Chance a fragment peak is missing")->capture_default_str();
    synth->add_option("--jitter", synth_args.spec.mz_jitter_sd,
                      "Fragment m/z jitter SD (Da)")->capture_default_str();
    synth->add_option("--target-expr", synth_args.spec.target_expr,
                      "Planted scoring expression")->capture_default_str();
    synth->add_option("--target-noise", synth_args.spec.target_noise_sd,
                      "Gaussian noise SD on the planted target")->capture_default_str();
    synth->add_option("--seed", synth_args.spec.seed, "Random seed")->capture_default_str();
    synth->add_option("--mass-table", synth_args.mass_table_path,
                      "Residue mass table replacing the built-in values");
    synth->add_option("--tolerance", synth_args.config.tolerance,
                      "Fragment match tolerance for target features (Da)")->capture_default_str();
    synth->add_option("--bins", synth_args.config.fixed_bins,
                      "Fixed binned-vector length for target features")->capture_default_str();
    synth->add_option("--bin-width", synth_args.config.bin_width,
                      "Bin width for target features (Da)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }
    features_args.targets_explicit = targets_opt->count() > 0;
    train_args.config.target_rss = target_rss;

    try {
        if (app.got_subcommand(features)) cmd_features(features_args, verbose);
        else if (app.got_subcommand(train)) cmd_train(train_args, verbose);
        else if (app.got_subcommand(rescore)) cmd_rescore(rescore_args, verbose);
        else if (app.got_subcommand(evaluate)) cmd_evaluate(evaluate_args);
        else if (app.got_subcommand(synth)) cmd_synth(synth_args, verbose);
    } catch (const MissingFileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissingFile;
    } catch (const gppsm::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const gppsm::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitOk;
}
