#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gppsm/features.hpp"
#include "gppsm/gp.hpp"

namespace gppsm {

/// One candidate peptide for a spectrum. `orig_rank` is the upstream
/// de novo tool's ordering (1 = its top pick); the de novo score itself is
/// never consulted once a model is applied.
struct CandidatePSM {
    std::string spectrum_id;
    int orig_rank = 0;
    std::string peptide;
    double denovo_score = 0.0;
    bool is_correct = false;
    FeatureVector features;
    std::optional<double> new_score;
};

/// All candidates of one spectrum. `tied` is set by rescore() when two
/// candidates receive bit-identical new scores; a tied set's identification
/// is rejected and counts as a false positive.
struct CandidateSet {
    std::string spectrum_id;
    std::vector<CandidatePSM> candidates;
    bool tied = false;
};

/// All-or-nothing evaluation summary: every spectrum is either a TP (accepted
/// top candidate is the correct match) or an FP.
struct EvaluationReport {
    std::size_t n_spectra = 0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    double fpr = 0.0;
    std::size_t no_correct_candidate = 0;        // correct peptide absent from the set
    std::size_t missed_targets_recovered = 0;    // baseline missed, ranking found
    std::size_t targets_lost = 0;                // baseline found, ranking missed
};

struct ReportDelta {
    double fpr_before = 0.0;
    double fpr_after = 0.0;
    double reduction_points = 0.0;  // (before - after) * 100
    std::size_t missed_targets_recovered = 0;
    std::size_t targets_lost = 0;
};

enum class RankingKind {
    Baseline,  // order by orig_rank
    Rescored,  // order by new_score descending
};

/// Published evaluation figures for the reference benchmark: 120 doubly
/// charged spectra of tryptic peptides, five candidates per spectrum from a
/// commercial de novo tool. Reproducing them requires that dataset and that
/// tool, neither of which is redistributable, so the figures live here as
/// documented constants; the test suite checks them for arithmetic
/// consistency only and never regenerates them.
struct ReferenceBenchmark {
    static constexpr std::size_t n_spectra = 120;
    // Baseline composition: correct peptide at rank 1, correct peptide
    // present but below rank 1, correct peptide absent from the set.
    static constexpr std::size_t baseline_rank1_correct = 67;
    static constexpr std::size_t correct_below_rank1 = 25;
    static constexpr std::size_t no_correct_candidate = 28;
    static constexpr std::size_t rescored_rank1_correct = 79;
    // FPRs as published, rounded to two decimals.
    static constexpr double baseline_fpr = 0.44;
    static constexpr double rescored_fpr = 0.34;
};

/// Groups feature rows into candidate sets, keyed by spectrum id, in first-
/// appearance order. Baseline order comes from the rank encoded in each row.
std::vector<CandidateSet> group_candidates(const std::vector<FeatureRow>& rows);

/// Applies the model: fills new_score for every candidate, sorts the set
/// descending by new_score (stable toward the baseline order), and flags
/// exact score ties. Throws ValidationError if any candidate lacks finite
/// features.
void rescore(const ScoringModel& model, CandidateSet& cs);
void rescore(const ScoringModel& model, std::vector<CandidateSet>& sets);

/// Computes the report for the chosen ranking. For Rescored rankings the
/// transition counters compare against the baseline ranking of the same
/// sets. Throws ValidationError on empty input, a set with more than one
/// correct candidate, or (for Rescored) a candidate without a new score.
EvaluationReport compute_fpr(const std::vector<CandidateSet>& sets, RankingKind kind);

/// Before/after comparison. Throws ValidationError when the two reports
/// cover different numbers of spectra.
ReportDelta compare_reports(const EvaluationReport& before, const EvaluationReport& after);

// --- candidate / ranked-table I/O ---------------------------------------------

/// One row of the candidate table emitted by the upstream tool (or synth):
/// TSV `spectrum_id rank peptide denovo_score is_correct`, grouped by
/// spectrum id.
struct CandidateRow {
    std::string spectrum_id;
    int rank = 0;
    std::string peptide;
    double denovo_score = 0.0;
    bool is_correct = false;
};

void write_candidate_table(const std::vector<CandidateRow>& rows, std::ostream& out);
void write_candidate_table_file(const std::vector<CandidateRow>& rows, const std::string& path);
std::vector<CandidateRow> read_candidate_table(std::istream& in);
std::vector<CandidateRow> read_candidate_table_file(const std::string& path);

/// Ranked table written by rescore: TSV
/// `spectrum_id rank peptide new_score orig_rank is_correct tied`.
void write_ranked_table(const std::vector<CandidateSet>& sets, std::ostream& out);
void write_ranked_table_file(const std::vector<CandidateSet>& sets, const std::string& path);
std::vector<CandidateSet> read_ranked_table(std::istream& in);
std::vector<CandidateSet> read_ranked_table_file(const std::string& path);

/// Machine-readable report: `key<TAB>value` lines covering both rankings
/// and the delta.
void write_report(const EvaluationReport& before, const EvaluationReport& after,
                  const ReportDelta& delta, std::ostream& out);

/// Human-readable summary table.
void print_report(const EvaluationReport& before, const EvaluationReport& after,
                  const ReportDelta& delta, std::ostream& out);

} // namespace gppsm
