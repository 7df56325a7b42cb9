#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gppsm/features.hpp"
#include "gppsm/gp.hpp"
#include "gppsm/rerank.hpp"
#include "gppsm/spectrum.hpp"

namespace gppsm {

/// Parameters for the synthetic dataset generator. The defaults mirror the
/// benchmark dataset profile: doubly charged precursors up to 1150 Da,
/// peptide lengths 7 to 12.
struct SynthSpec {
    std::size_t n_spectra = 100;
    std::size_t candidates_per_spectrum = 5;  // true peptide plus decoys
    std::size_t min_peptide_length = 7;
    std::size_t max_peptide_length = 12;
    int charge = 2;
    double max_precursor = 1150.0;       // Da, neutral
    std::size_t noise_peaks = 10;        // extra random peaks per spectrum
    double peak_dropout = 0.15;          // chance a fragment peak is missing
    double mz_jitter_sd = 0.1;           // Da, Gaussian m/z perturbation
    std::string target_expr = "(sub (add f1 (mul 2 f2)) f3)";
    double target_noise_sd = 0.0;        // Gaussian noise on the target
    std::uint64_t seed = 0;

    void validate() const;  // throws ValidationError on infeasible settings
};

/// One target row: the planted score attached to a spectrum's correct PSM.
struct TargetRow {
    std::string spectrum_id;
    double target = 0.0;
};

struct SynthDataset {
    std::vector<Spectrum> spectra;
    std::vector<CandidateRow> candidates;
    std::vector<TargetRow> targets;
};

/// Generates spectra, candidate sets, and planted targets.
///
/// Each spectrum is built from a random peptide within the configured
/// constraints: its fragment ions survive dropout, get Gaussian m/z jitter
/// and random intensities, and noise peaks are mixed in. Candidate sets
/// hold the true peptide plus mass-similar decoys (adjacent transpositions
/// and near-mass substitutions) under a random de novo ordering. The target
/// is target_expr evaluated on the true PSM's extracted features, plus
/// optional Gaussian noise. Deterministic under spec.seed.
SynthDataset generate_dataset(const SynthSpec& spec, const MassTable& masses,
                              const FeatureConfig& features_cfg);

void write_target_table(const std::vector<TargetRow>& rows, std::ostream& out);
void write_target_table_file(const std::vector<TargetRow>& rows, const std::string& path);
std::vector<TargetRow> read_target_table(std::istream& in);
std::vector<TargetRow> read_target_table_file(const std::string& path);

} // namespace gppsm
