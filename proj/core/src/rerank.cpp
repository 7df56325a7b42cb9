#include "gppsm/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <unordered_map>

#include "gppsm/errors.hpp"
#include "text_util.hpp"

namespace gppsm {

namespace {

// Position of the baseline identification: the candidate with the lowest
// original rank, first occurrence on duplicates.
std::size_t baseline_top(const CandidateSet& cs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < cs.candidates.size(); ++i)
        if (cs.candidates[i].orig_rank < cs.candidates[best].orig_rank) best = i;
    return best;
}

// Position of the model's identification: highest new score, first
// occurrence on ties (matches the stable rescored ordering).
std::size_t rescored_top(const CandidateSet& cs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < cs.candidates.size(); ++i)
        if (*cs.candidates[i].new_score > *cs.candidates[best].new_score) best = i;
    return best;
}

std::size_t correct_count(const CandidateSet& cs) {
    std::size_t n = 0;
    for (const auto& c : cs.candidates) n += c.is_correct ? 1 : 0;
    return n;
}

} // namespace

std::vector<CandidateSet> group_candidates(const std::vector<FeatureRow>& rows) {
    std::vector<CandidateSet> sets;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& row : rows) {
        auto [it, inserted] = index.try_emplace(row.spectrum_id, sets.size());
        if (inserted) {
            CandidateSet cs;
            cs.spectrum_id = row.spectrum_id;
            sets.push_back(std::move(cs));
        }
        CandidatePSM c;
        c.spectrum_id = row.spectrum_id;
        c.orig_rank = row.rank;
        c.peptide = row.peptide;
        c.is_correct = row.is_correct;
        c.features = row.features;
        sets[it->second].candidates.push_back(std::move(c));
    }
    for (auto& cs : sets)
        std::stable_sort(cs.candidates.begin(), cs.candidates.end(),
                         [](const CandidatePSM& a, const CandidatePSM& b) {
                             return a.orig_rank < b.orig_rank;
                         });
    return sets;
}

void rescore(const ScoringModel& model, CandidateSet& cs) {
    for (auto& c : cs.candidates) {
        for (std::size_t i = 0; i < FeatureVector::kCount; ++i)
            if (!std::isfinite(c.features.value(i)))
                throw ValidationError("candidate " + c.spectrum_id + ":" +
                                      std::to_string(c.orig_rank) +
                                      " has a non-finite feature");
        c.new_score = eval_tree(model.tree, c.features);
    }
    std::stable_sort(cs.candidates.begin(), cs.candidates.end(),
                     [](const CandidatePSM& a, const CandidatePSM& b) {
                         return *a.new_score > *b.new_score;
                     });
    cs.tied = false;
    for (std::size_t i = 1; i < cs.candidates.size(); ++i)
        if (*cs.candidates[i].new_score == *cs.candidates[i - 1].new_score) {
            cs.tied = true;
            break;
        }
}

void rescore(const ScoringModel& model, std::vector<CandidateSet>& sets) {
    for (auto& cs : sets) rescore(model, cs);
}

EvaluationReport compute_fpr(const std::vector<CandidateSet>& sets, RankingKind kind) {
    if (sets.empty()) throw ValidationError("no candidate sets to evaluate");
    EvaluationReport report;
    report.n_spectra = sets.size();
    for (const auto& cs : sets) {
        if (cs.candidates.empty())
            throw ValidationError("spectrum " + cs.spectrum_id + " has no candidates");
        if (correct_count(cs) > 1)
            throw ValidationError("spectrum " + cs.spectrum_id +
                                  " has more than one candidate marked correct");
        if (kind == RankingKind::Rescored)
            for (const auto& c : cs.candidates)
                if (!c.new_score)
                    throw ValidationError("spectrum " + cs.spectrum_id +
                                          " has candidates without a new score");

        if (correct_count(cs) == 0) ++report.no_correct_candidate;

        const bool base_hit = cs.candidates[baseline_top(cs)].is_correct;
        bool hit;
        if (kind == RankingKind::Baseline) {
            hit = base_hit;
        } else {
            // A tied set's identification is rejected outright.
            hit = !cs.tied && cs.candidates[rescored_top(cs)].is_correct;
            if (hit && !base_hit) ++report.missed_targets_recovered;
            if (!hit && base_hit) ++report.targets_lost;
        }
        if (hit) ++report.tp;
        else ++report.fp;
    }
    report.fpr = static_cast<double>(report.fp) / static_cast<double>(report.n_spectra);
    return report;
}

ReportDelta compare_reports(const EvaluationReport& before, const EvaluationReport& after) {
    if (before.n_spectra != after.n_spectra)
        throw ValidationError("reports cover different numbers of spectra");
    ReportDelta d;
    d.fpr_before = before.fpr;
    d.fpr_after = after.fpr;
    d.reduction_points = (before.fpr - after.fpr) * 100.0;
    d.missed_targets_recovered = after.missed_targets_recovered;
    d.targets_lost = after.targets_lost;
    return d;
}

// --- candidate table I/O ------------------------------------------------------

namespace {

constexpr const char* kCandidateHeader =
    "spectrum_id\trank\tpeptide\tdenovo_score\tis_correct";

constexpr const char* kRankedHeader =
    "spectrum_id\trank\tpeptide\tnew_score\torig_rank\tis_correct\ttied";

bool parse_flag(std::string_view s, bool& out) {
    if (s == "1") { out = true; return true; }
    if (s == "0") { out = false; return true; }
    return false;
}

} // namespace

void write_candidate_table(const std::vector<CandidateRow>& rows, std::ostream& out) {
    out << kCandidateHeader << "\n";
    for (const auto& row : rows)
        out << row.spectrum_id << '\t' << row.rank << '\t' << row.peptide << '\t'
            << detail::format_g6(row.denovo_score) << '\t' << (row.is_correct ? 1 : 0)
            << "\n";
}

void write_candidate_table_file(const std::vector<CandidateRow>& rows, const std::string& path) {
    auto out = detail::open_output(path);
    write_candidate_table(rows, out);
}

std::vector<CandidateRow> read_candidate_table(std::istream& in) {
    std::vector<CandidateRow> rows;
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) return rows;
    ++lineno;
    if (detail::trim(line) != kCandidateHeader)
        throw ParseError("unexpected candidate table header", lineno);

    while (std::getline(in, line)) {
        ++lineno;
        const auto s = detail::trim(line);
        if (s.empty()) continue;
        const auto fields = detail::split_tabs(s);
        if (fields.size() != 5)
            throw ParseError("wrong field count in candidate table row", lineno);

        CandidateRow row;
        row.spectrum_id = std::string(fields[0]);
        long rank = 0;
        if (!detail::parse_long(fields[1], rank))
            throw ParseError("non-numeric rank", lineno);
        row.rank = static_cast<int>(rank);
        row.peptide = std::string(fields[2]);
        if (!detail::parse_double(fields[3], row.denovo_score))
            throw ParseError("non-numeric de novo score", lineno);
        if (!parse_flag(fields[4], row.is_correct))
            throw ParseError("is_correct must be 0 or 1", lineno);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<CandidateRow> read_candidate_table_file(const std::string& path) {
    auto in = detail::open_input(path);
    return read_candidate_table(in);
}

void write_ranked_table(const std::vector<CandidateSet>& sets, std::ostream& out) {
    out << kRankedHeader << "\n";
    for (const auto& cs : sets) {
        for (std::size_t i = 0; i < cs.candidates.size(); ++i) {
            const auto& c = cs.candidates[i];
            if (!c.new_score)
                throw ValidationError("spectrum " + cs.spectrum_id +
                                      " has candidates without a new score");
            out << cs.spectrum_id << '\t' << (i + 1) << '\t' << c.peptide << '\t'
                << detail::format_shortest(*c.new_score) << '\t' << c.orig_rank << '\t'
                << (c.is_correct ? 1 : 0) << '\t' << (cs.tied ? 1 : 0) << "\n";
        }
    }
}

void write_ranked_table_file(const std::vector<CandidateSet>& sets, const std::string& path) {
    auto out = detail::open_output(path);
    write_ranked_table(sets, out);
}

std::vector<CandidateSet> read_ranked_table(std::istream& in) {
    std::vector<CandidateSet> sets;
    std::unordered_map<std::string, std::size_t> index;
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) return sets;
    ++lineno;
    if (detail::trim(line) != kRankedHeader)
        throw ParseError("unexpected ranked table header", lineno);

    while (std::getline(in, line)) {
        ++lineno;
        const auto s = detail::trim(line);
        if (s.empty()) continue;
        const auto fields = detail::split_tabs(s);
        if (fields.size() != 7)
            throw ParseError("wrong field count in ranked table row", lineno);

        const std::string spectrum_id{fields[0]};
        auto [it, inserted] = index.try_emplace(spectrum_id, sets.size());
        if (inserted) {
            CandidateSet cs;
            cs.spectrum_id = spectrum_id;
            sets.push_back(std::move(cs));
        }
        CandidateSet& cs = sets[it->second];

        long rank = 0;
        if (!detail::parse_long(fields[1], rank))
            throw ParseError("non-numeric rank", lineno);
        if (static_cast<std::size_t>(rank) != cs.candidates.size() + 1)
            throw ParseError("ranks of " + spectrum_id + " are not consecutive from 1", lineno);

        CandidatePSM c;
        c.spectrum_id = spectrum_id;
        c.peptide = std::string(fields[2]);
        double score = 0.0;
        if (!detail::parse_double(fields[3], score))
            throw ParseError("non-numeric new score", lineno);
        c.new_score = score;
        long orig_rank = 0;
        if (!detail::parse_long(fields[4], orig_rank))
            throw ParseError("non-numeric original rank", lineno);
        c.orig_rank = static_cast<int>(orig_rank);
        if (!parse_flag(fields[5], c.is_correct))
            throw ParseError("is_correct must be 0 or 1", lineno);
        bool tied = false;
        if (!parse_flag(fields[6], tied))
            throw ParseError("tied must be 0 or 1", lineno);
        if (!cs.candidates.empty() && tied != cs.tied)
            throw ParseError("inconsistent tie flag for " + spectrum_id, lineno);
        cs.tied = tied;
        cs.candidates.push_back(std::move(c));
    }
    return sets;
}

std::vector<CandidateSet> read_ranked_table_file(const std::string& path) {
    auto in = detail::open_input(path);
    return read_ranked_table(in);
}

// --- reports -------------------------------------------------------------------

void write_report(const EvaluationReport& before, const EvaluationReport& after,
                  const ReportDelta& delta, std::ostream& out) {
    out << "n_spectra\t" << before.n_spectra << "\n";
    out << "no_correct_candidate\t" << before.no_correct_candidate << "\n";
    out << "baseline_tp\t" << before.tp << "\n";
    out << "baseline_fp\t" << before.fp << "\n";
    out << "baseline_fpr\t" << detail::format_shortest(before.fpr) << "\n";
    out << "rescored_tp\t" << after.tp << "\n";
    out << "rescored_fp\t" << after.fp << "\n";
    out << "rescored_fpr\t" << detail::format_shortest(after.fpr) << "\n";
    out << "missed_targets_recovered\t" << delta.missed_targets_recovered << "\n";
    out << "targets_lost\t" << delta.targets_lost << "\n";
    out << "fpr_reduction_points\t" << detail::format_shortest(delta.reduction_points) << "\n";
}

void print_report(const EvaluationReport& before, const EvaluationReport& after,
                  const ReportDelta& delta, std::ostream& out) {
    char buf[128];
    const auto row = [&](const char* label, std::size_t b, std::size_t a) {
        std::snprintf(buf, sizeof buf, "%-24s %10zu %10zu\n", label, b, a);
        out << buf;
    };
    std::snprintf(buf, sizeof buf, "%-24s %10s %10s\n", "", "baseline", "rescored");
    out << buf;
    row("true positives", before.tp, after.tp);
    row("false positives", before.fp, after.fp);
    std::snprintf(buf, sizeof buf, "%-24s %10.4f %10.4f\n", "false positive rate",
                  before.fpr, after.fpr);
    out << buf;
    out << "\n";
    std::snprintf(buf, sizeof buf, "spectra evaluated:        %zu (%zu with no correct candidate)\n",
                  before.n_spectra, before.no_correct_candidate);
    out << buf;
    std::snprintf(buf, sizeof buf, "missed targets recovered: %zu\n",
                  delta.missed_targets_recovered);
    out << buf;
    std::snprintf(buf, sizeof buf, "targets lost:             %zu\n", delta.targets_lost);
    out << buf;
    std::snprintf(buf, sizeof buf, "FPR reduction:            %.1f points\n",
                  delta.reduction_points);
    out << buf;
}

} // namespace gppsm
