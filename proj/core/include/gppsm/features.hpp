#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gppsm/spectrum.hpp"
#include "gppsm/theoretical.hpp"

namespace gppsm {

/// Knobs for feature extraction. Defaults follow the 0.5 Da fragment
/// tolerance and the 4000-bin fixed-length vectorisation.
struct FeatureConfig {
    double tolerance = 0.5;           // fragment match tolerance, Da
    std::size_t fixed_bins = 4000;    // length of the fixed binned vectors
    double bin_width = 0.5;           // Da per bin, fixed and variable
    int window_count = 10;            // intensity normalisation windows
    double window_target = 50.0;      // per-window max after rescaling
    double noise_floor = 0.01;        // drop peaks below this fraction of global max
};

/// Outcome of matching one theoretical ion against the experimental peaks.
struct IonMatch {
    FragmentIon ion;
    bool matched = false;
    std::size_t peak_index = 0;  // valid only when matched
};

/// Per-ion match assignments at a given tolerance. Every theoretical ion
/// appears exactly once; a matched ion pairs with the nearest peak within
/// +-tolerance (ties broken toward the lower-m/z peak).
struct MatchResult {
    std::vector<IonMatch> ions;
    double tolerance = 0.0;

    std::size_t matched_count() const noexcept {
        std::size_t n = 0;
        for (const auto& m : ions) n += m.matched ? 1 : 0;
        return n;
    }
    std::size_t unmatched_count() const noexcept { return ions.size() - matched_count(); }
};

/// A spectrum vectorised onto fixed-width m/z bins. `dropped` counts peaks
/// at or beyond the covered range.
struct BinnedVector {
    std::vector<double> bins;
    double bin_width = 0.0;
    std::size_t dropped = 0;

    std::size_t length() const noexcept { return bins.size(); }
};

/// The 11 similarity features describing one peptide-spectrum match,
/// plus the optional regression target used during learning.
struct FeatureVector {
    double f1_intensity_matched = 0.0;  // summed intensity of matched peaks
    double f2_n_matched = 0.0;          // matched theoretical ions
    double f3_n_unmatched = 0.0;        // unmatched theoretical ions
    double f4_delta_mass = 0.0;         // |precursor mass - peptide mass|
    double f5_nterm = 0.0;              // consecutive matched b-ions from b1
    double f6_cterm = 0.0;              // consecutive matched y-ions from y1
    double f7_cosine = 0.0;             // binned cosine similarity, [0,1]
    double f8_euclidean = 0.0;          // L2-normalised Euclidean distance
    double f9_hamming = 0.0;            // occupied-bin symmetric difference
    double f10_seq_fixed = 0.0;         // fixed-length preprocessed dot product
    double f11_seq_variable = 0.0;      // variable-length preprocessed dot product
    std::optional<double> target;

    static constexpr std::size_t kCount = 11;

    double value(std::size_t index) const;  // 0-based: value(0) == f1
    double& value(std::size_t index);
    static const char* name(std::size_t index);  // "f1".."f11"
};

/// Matches each theoretical ion of `t` against the peaks of `s`.
/// Requires tolerance > 0.
MatchResult match_peaks(const Spectrum& s, const TheoreticalSpectrum& t, double tolerance);

/// Bins an experimental spectrum: each bin accumulates the intensities of
/// the peaks with floor(mz / bin_width) == bin index.
BinnedVector bin_spectrum(const Spectrum& s, std::size_t n_bins, double bin_width);

/// Bins a theoretical spectrum: occupied bins get the value one.
BinnedVector bin_spectrum(const TheoreticalSpectrum& t, std::size_t n_bins, double bin_width);

/// Cosine similarity dot(a,b) / (|a| |b|), zero when either norm is zero.
/// Throws ValidationError on length mismatch.
double cosine_feature(const BinnedVector& a, const BinnedVector& b);

/// Euclidean distance between the L2-normalised vectors, zero when either
/// norm is zero. Throws ValidationError on length mismatch.
double euclidean_feature(const BinnedVector& a, const BinnedVector& b);

/// Number of bins occupied in exactly one of the two vectors.
/// Throws ValidationError on length mismatch.
double hamming_feature(const BinnedVector& a, const BinnedVector& b);

/// Intensity cleanup applied before the f10/f11 dot products: square-root
/// all intensities, rescale each of `window_count` equal m/z windows so its
/// max is `window_target`, then drop peaks below `noise_floor` of the
/// global max.
Spectrum preprocess_spectrum(const Spectrum& s, const FeatureConfig& cfg);

/// The two preprocessed normalised dot products: f10 at fixed length,
/// f11 at ceil(precursor_mass / bin_width) bins.
std::pair<double, double> sequest_features(const Spectrum& s, const TheoreticalSpectrum& t,
                                           const FeatureConfig& cfg);

/// Computes the full 11-feature vector for a PSM.
FeatureVector extract_features(const Spectrum& s, const Peptide& p,
                               const MassTable& masses, const FeatureConfig& cfg);

// --- feature table I/O ------------------------------------------------------

/// One row of the feature table. `psm_id` is `<spectrum_id>:<rank>` with the
/// rank taken from the candidate ordering of the upstream tool.
struct FeatureRow {
    std::string spectrum_id;
    int rank = 0;
    std::string peptide;
    FeatureVector features;
    bool is_correct = false;

    std::string psm_id() const { return spectrum_id + ":" + std::to_string(rank); }
};

/// TSV with header `psm_id peptide f1..f11 target is_correct`; floats at
/// 6 significant digits, absent targets written as NA.
void write_feature_table(const std::vector<FeatureRow>& rows, std::ostream& out);
void write_feature_table_file(const std::vector<FeatureRow>& rows, const std::string& path);
std::vector<FeatureRow> read_feature_table(std::istream& in);
std::vector<FeatureRow> read_feature_table_file(const std::string& path);

} // namespace gppsm
