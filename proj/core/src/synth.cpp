#include "gppsm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string_view>

#include "gppsm/errors.hpp"
#include "gppsm/mass.hpp"
#include "gppsm/rng.hpp"
#include "gppsm/theoretical.hpp"
#include "text_util.hpp"

namespace gppsm {

namespace {

// Generation alphabet. Isoleucine is left out: it weighs exactly as much as
// leucine, and an I/L swap would make a decoy indistinguishable from the
// true peptide, forcing a score tie.
constexpr std::string_view kAlphabet = "ACDEFGHKLMNPQRSTVWY";

constexpr std::size_t kSubstitutesPerPosition = 4;
constexpr double kPrecursorErrorSd = 0.01;  // Da, measurement error on the precursor
constexpr std::size_t kMaxPeptideDraws = 100000;

double lightest_residue(const MassTable& masses) {
    double best = masses.residue(kAlphabet[0]);
    for (char c : kAlphabet) best = std::min(best, masses.residue(c));
    return best;
}

std::string spectrum_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "synth-%06zu", index);
    return buf;
}

Peptide random_peptide(const SynthSpec& spec, const MassTable& masses, Rng& rng) {
    for (std::size_t attempt = 0; attempt < kMaxPeptideDraws; ++attempt) {
        const auto len = static_cast<std::size_t>(
            rng.range(static_cast<std::int64_t>(spec.min_peptide_length),
                      static_cast<std::int64_t>(spec.max_peptide_length)));
        std::string seq(len, 'G');
        for (auto& c : seq) c = kAlphabet[rng.below(kAlphabet.size())];
        Peptide p(std::move(seq));
        if (peptide_mass(p, masses) <= spec.max_precursor) return p;
    }
    throw ValidationError("could not draw a peptide under the precursor mass cap");
}

// The residues closest in mass to `original`, nearest first, mass ties
// broken alphabetically. Never returns `original` itself.
std::vector<char> nearest_substitutes(char original, const MassTable& masses) {
    std::vector<char> others;
    for (char c : kAlphabet)
        if (c != original) others.push_back(c);
    const double base = masses.residue(original);
    std::sort(others.begin(), others.end(), [&](char a, char b) {
        const double da = std::abs(masses.residue(a) - base);
        const double db = std::abs(masses.residue(b) - base);
        if (da != db) return da < db;
        return a < b;
    });
    others.resize(std::min(others.size(), kSubstitutesPerPosition));
    return others;
}

// All decoy sequences derived from `p`: adjacent transpositions of distinct
// letters plus single nearest-mass substitutions, deduplicated, in a fixed
// construction order.
std::vector<std::string> decoy_pool(const Peptide& p, const MassTable& masses) {
    std::vector<std::string> pool;
    const std::string& seq = p.sequence();
    const auto push_unique = [&](std::string s) {
        if (s == seq) return;
        if (std::find(pool.begin(), pool.end(), s) == pool.end())
            pool.push_back(std::move(s));
    };
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        if (seq[i] == seq[i + 1]) continue;
        std::string s = seq;
        std::swap(s[i], s[i + 1]);
        push_unique(std::move(s));
    }
    for (std::size_t i = 0; i < seq.size(); ++i) {
        for (char c : nearest_substitutes(seq[i], masses)) {
            std::string s = seq;
            s[i] = c;
            push_unique(std::move(s));
        }
    }
    return pool;
}

Spectrum build_spectrum(const Peptide& p, const SynthSpec& spec, const MassTable& masses,
                        Rng& rng, std::size_t index) {
    const double true_mass = peptide_mass(p, masses);
    Spectrum s;
    s.id = spectrum_name(index);
    s.charge = spec.charge;
    s.precursor_mass = true_mass + rng.normal(0.0, kPrecursorErrorSd);

    const auto theo = generate_theoretical(p, masses);
    for (const auto& ion : theo.merged_ions()) {
        if (rng.coin(spec.peak_dropout)) continue;
        Peak peak;
        peak.mz = std::max(0.01, ion.mz + rng.normal(0.0, spec.mz_jitter_sd));
        peak.intensity = rng.uniform(10.0, 100.0);
        s.peaks.push_back(peak);
    }
    if (s.peaks.empty() && spec.noise_peaks == 0) {
        // Dropout removed every fragment; keep one so the spectrum stays valid.
        Peak peak;
        peak.mz = std::max(0.01, theo.merged_ions().front().mz + rng.normal(0.0, spec.mz_jitter_sd));
        peak.intensity = rng.uniform(10.0, 100.0);
        s.peaks.push_back(peak);
    }
    const double noise_hi = std::max(s.precursor_mass, 101.0);
    for (std::size_t i = 0; i < spec.noise_peaks; ++i) {
        Peak peak;
        peak.mz = rng.uniform(100.0, noise_hi);
        peak.intensity = rng.uniform(1.0, 50.0);
        s.peaks.push_back(peak);
    }
    sort_peaks(s);
    validate(s);
    return s;
}

} // namespace

void SynthSpec::validate() const {
    if (n_spectra == 0) throw ValidationError("n_spectra must be positive");
    if (candidates_per_spectrum == 0)
        throw ValidationError("candidates_per_spectrum must be positive");
    if (min_peptide_length < 2)
        throw ValidationError("min_peptide_length must be at least 2");
    if (min_peptide_length > max_peptide_length)
        throw ValidationError("min_peptide_length cannot exceed max_peptide_length");
    if (charge < 1) throw ValidationError("charge must be at least 1");
    if (max_precursor <= 0.0) throw ValidationError("max_precursor must be positive");
    if (peak_dropout < 0.0 || peak_dropout >= 1.0)
        throw ValidationError("peak_dropout must lie in [0, 1)");
    if (mz_jitter_sd < 0.0) throw ValidationError("mz_jitter_sd cannot be negative");
    if (target_noise_sd < 0.0) throw ValidationError("target_noise_sd cannot be negative");
    const MassTable& masses = MassTable::builtin();
    const double floor_mass =
        masses.water() + static_cast<double>(min_peptide_length) * lightest_residue(masses);
    if (floor_mass > max_precursor)
        throw ValidationError("max_precursor is below the lightest peptide of min_peptide_length");
    try {
        ExpressionTree::from_sexpr(target_expr);
    } catch (const ParseError& e) {
        throw ValidationError(std::string("target_expr does not parse: ") + e.what());
    }
}

SynthDataset generate_dataset(const SynthSpec& spec, const MassTable& masses,
                              const FeatureConfig& features_cfg) {
    spec.validate();
    const ExpressionTree target_tree = ExpressionTree::from_sexpr(spec.target_expr);
    Rng rng(spec.seed);
    SynthDataset out;
    out.spectra.reserve(spec.n_spectra);
    out.candidates.reserve(spec.n_spectra * spec.candidates_per_spectrum);
    out.targets.reserve(spec.n_spectra);

    for (std::size_t i = 0; i < spec.n_spectra; ++i) {
        const Peptide truth = random_peptide(spec, masses, rng);
        const Spectrum s = build_spectrum(truth, spec, masses, rng, i + 1);

        std::vector<std::string> sequences{truth.sequence()};
        if (spec.candidates_per_spectrum > 1) {
            auto pool = decoy_pool(truth, masses);
            const std::size_t wanted = spec.candidates_per_spectrum - 1;
            if (pool.size() < wanted)
                throw ValidationError("peptide " + truth.sequence() +
                                      " yields too few decoys for candidates_per_spectrum");
            rng.shuffle(pool);
            sequences.insert(sequences.end(), pool.begin(),
                             pool.begin() + static_cast<std::ptrdiff_t>(wanted));
        }

        // A random de novo ordering: scores are uniform draws, ranks follow.
        std::vector<CandidateRow> rows(sequences.size());
        for (std::size_t k = 0; k < sequences.size(); ++k) {
            rows[k].spectrum_id = s.id;
            rows[k].peptide = sequences[k];
            rows[k].denovo_score = rng.uniform(0.0, 100.0);
            rows[k].is_correct = k == 0;
        }
        std::stable_sort(rows.begin(), rows.end(),
                         [](const CandidateRow& a, const CandidateRow& b) {
                             return a.denovo_score > b.denovo_score;
                         });
        for (std::size_t k = 0; k < rows.size(); ++k) rows[k].rank = static_cast<int>(k + 1);

        const FeatureVector fv = extract_features(s, truth, masses, features_cfg);
        double target = eval_tree(target_tree, fv);
        if (spec.target_noise_sd > 0.0) target += rng.normal(0.0, spec.target_noise_sd);

        out.spectra.push_back(s);
        out.candidates.insert(out.candidates.end(), rows.begin(), rows.end());
        out.targets.push_back({s.id, target});
    }
    return out;
}

// --- target table I/O ---------------------------------------------------------

namespace {

constexpr const char* kTargetHeader = "spectrum_id\ttarget";

} // namespace

void write_target_table(const std::vector<TargetRow>& rows, std::ostream& out) {
    out << kTargetHeader << "\n";
    for (const auto& row : rows)
        out << row.spectrum_id << '\t' << detail::format_shortest(row.target) << "\n";
}

void write_target_table_file(const std::vector<TargetRow>& rows, const std::string& path) {
    auto out = detail::open_output(path);
    write_target_table(rows, out);
}

std::vector<TargetRow> read_target_table(std::istream& in) {
    std::vector<TargetRow> rows;
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) return rows;
    ++lineno;
    if (detail::trim(line) != kTargetHeader)
        throw ParseError("unexpected target table header", lineno);

    while (std::getline(in, line)) {
        ++lineno;
        const auto s = detail::trim(line);
        if (s.empty()) continue;
        const auto fields = detail::split_tabs(s);
        if (fields.size() != 2)
            throw ParseError("wrong field count in target table row", lineno);
        TargetRow row;
        row.spectrum_id = std::string(fields[0]);
        if (!detail::parse_double(fields[1], row.target))
            throw ParseError("non-numeric target value", lineno);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<TargetRow> read_target_table_file(const std::string& path) {
    auto in = detail::open_input(path);
    return read_target_table(in);
}

} // namespace gppsm
