#include "gppsm/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "gppsm/errors.hpp"
#include "gppsm/rng.hpp"

using namespace gppsm;

namespace {

FeatureRow make_row(const std::string& spectrum, int rank, double f2, bool correct) {
    FeatureRow row;
    row.spectrum_id = spectrum;
    row.rank = rank;
    row.peptide = "PEPTIDE";
    row.features.f2_n_matched = f2;
    row.is_correct = correct;
    return row;
}

// A model whose score is exactly feature f2, so expected orderings can be
// written down by hand.
ScoringModel f2_model() {
    ScoringModel m;
    m.tree = ExpressionTree::feature(1);
    m.feature_schema = ScoringModel::default_schema();
    return m;
}

CandidateSet make_set(const std::string& id,
                      const std::vector<std::pair<double, bool>>& scored) {
    CandidateSet cs;
    cs.spectrum_id = id;
    int rank = 1;
    for (const auto& [score, correct] : scored) {
        CandidatePSM c;
        c.spectrum_id = id;
        c.orig_rank = rank++;
        c.peptide = "P";
        c.is_correct = correct;
        c.new_score = score;
        cs.candidates.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < cs.candidates.size() && !cs.tied; ++i)
        for (std::size_t j = i + 1; j < cs.candidates.size(); ++j)
            if (cs.candidates[i].new_score == cs.candidates[j].new_score) {
                cs.tied = true;
                break;
            }
    return cs;
}

// Independent evaluation of one candidate set, written as directly as
// possible: explicit copies, explicit sorts, no shared helpers.
struct OracleOutcome {
    bool baseline_hit = false;
    bool rescored_hit = false;
    bool has_correct = false;
};

OracleOutcome oracle_outcome(const CandidateSet& cs) {
    OracleOutcome o;
    auto by_rank = cs.candidates;
    std::sort(by_rank.begin(), by_rank.end(),
              [](const CandidatePSM& a, const CandidatePSM& b) {
                  return a.orig_rank < b.orig_rank;
              });
    o.baseline_hit = by_rank.front().is_correct;
    for (const auto& c : cs.candidates) o.has_correct = o.has_correct || c.is_correct;

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : cs.candidates) best = std::max(best, *c.new_score);
    std::size_t at_best = 0;
    for (const auto& c : cs.candidates) at_best += (*c.new_score == best) ? 1 : 0;
    if (at_best > 1 || cs.tied) {
        o.rescored_hit = false;  // ambiguous identification is rejected
    } else {
        for (const auto& c : cs.candidates)
            if (*c.new_score == best) o.rescored_hit = c.is_correct;
    }
    return o;
}

} // namespace

TEST(GroupCandidates, FirstAppearanceOrderAndRankSort) {
    std::vector<FeatureRow> rows;
    rows.push_back(make_row("s1", 2, 1.0, false));
    rows.push_back(make_row("s2", 1, 2.0, true));
    rows.push_back(make_row("s1", 1, 3.0, true));
    rows.push_back(make_row("s2", 2, 4.0, false));
    rows.push_back(make_row("s1", 3, 5.0, false));

    const auto sets = group_candidates(rows);
    ASSERT_EQ(sets.size(), 2u);
    EXPECT_EQ(sets[0].spectrum_id, "s1");
    EXPECT_EQ(sets[1].spectrum_id, "s2");
    ASSERT_EQ(sets[0].candidates.size(), 3u);
    EXPECT_EQ(sets[0].candidates[0].orig_rank, 1);
    EXPECT_EQ(sets[0].candidates[1].orig_rank, 2);
    EXPECT_EQ(sets[0].candidates[2].orig_rank, 3);
    EXPECT_TRUE(sets[0].candidates[0].is_correct);
    EXPECT_EQ(sets[1].candidates.size(), 2u);
    EXPECT_TRUE(group_candidates({}).empty());
}

TEST(Rescore, OrdersByModelScoreDescending) {
    std::vector<FeatureRow> rows;
    rows.push_back(make_row("s1", 1, 1.0, true));
    rows.push_back(make_row("s1", 2, 5.0, false));
    rows.push_back(make_row("s1", 3, 3.0, false));
    auto sets = group_candidates(rows);

    rescore(f2_model(), sets);
    const auto& cs = sets[0];
    ASSERT_EQ(cs.candidates.size(), 3u);
    EXPECT_DOUBLE_EQ(*cs.candidates[0].new_score, 5.0);
    EXPECT_DOUBLE_EQ(*cs.candidates[1].new_score, 3.0);
    EXPECT_DOUBLE_EQ(*cs.candidates[2].new_score, 1.0);
    EXPECT_EQ(cs.candidates[0].orig_rank, 2);  // baseline order kept in the field
    EXPECT_EQ(cs.candidates[2].orig_rank, 1);
    EXPECT_FALSE(cs.tied);
}

TEST(Rescore, FlagsExactTiesAndKeepsBaselineOrderAmongThem) {
    std::vector<FeatureRow> rows;
    rows.push_back(make_row("s1", 1, 2.0, true));
    rows.push_back(make_row("s1", 2, 2.0, false));  // same f2, same score
    rows.push_back(make_row("s1", 3, 7.0, false));
    auto sets = group_candidates(rows);

    rescore(f2_model(), sets);
    const auto& cs = sets[0];
    EXPECT_TRUE(cs.tied);
    EXPECT_DOUBLE_EQ(*cs.candidates[0].new_score, 7.0);
    EXPECT_EQ(cs.candidates[1].orig_rank, 1);  // stable among equal scores
    EXPECT_EQ(cs.candidates[2].orig_rank, 2);
}

TEST(Rescore, RejectsNonFiniteFeatures) {
    std::vector<FeatureRow> rows;
    auto bad = make_row("s1", 1, 1.0, true);
    bad.features.f7_cosine = std::numeric_limits<double>::quiet_NaN();
    rows.push_back(bad);
    auto sets = group_candidates(rows);
    EXPECT_THROW(rescore(f2_model(), sets), ValidationError);
}

TEST(ComputeFpr, BaselineCountsRankOneMisses) {
    std::vector<CandidateSet> sets;
    sets.push_back(make_set("a", {{9.0, true}, {1.0, false}}));   // rank 1 correct
    sets.push_back(make_set("b", {{9.0, false}, {1.0, true}}));   // rank 1 wrong
    sets.push_back(make_set("c", {{9.0, false}, {1.0, false}}));  // no correct at all

    const auto r = compute_fpr(sets, RankingKind::Baseline);
    EXPECT_EQ(r.n_spectra, 3u);
    EXPECT_EQ(r.tp, 1u);
    EXPECT_EQ(r.fp, 2u);
    EXPECT_DOUBLE_EQ(r.fpr, 2.0 / 3.0);
    EXPECT_EQ(r.no_correct_candidate, 1u);
    EXPECT_EQ(r.missed_targets_recovered, 0u);
    EXPECT_EQ(r.targets_lost, 0u);
}

TEST(ComputeFpr, RescoredTracksTransitions) {
    std::vector<CandidateSet> sets;
    // Baseline wrong, model right: recovered.
    sets.push_back(make_set("a", {{1.0, false}, {9.0, true}}));
    // Baseline right, model wrong: lost.
    sets.push_back(make_set("b", {{1.0, true}, {9.0, false}}));
    // Right under both rankings.
    sets.push_back(make_set("c", {{9.0, true}, {1.0, false}}));

    const auto r = compute_fpr(sets, RankingKind::Rescored);
    EXPECT_EQ(r.tp, 2u);
    EXPECT_EQ(r.fp, 1u);
    EXPECT_DOUBLE_EQ(r.fpr, 1.0 / 3.0);
    EXPECT_EQ(r.missed_targets_recovered, 1u);
    EXPECT_EQ(r.targets_lost, 1u);
}

TEST(ComputeFpr, TiedSetsAreRejected) {
    std::vector<CandidateSet> sets;
    // The correct candidate holds the best score, but the set is tied.
    sets.push_back(make_set("a", {{9.0, true}, {9.0, false}}));
    const auto r = compute_fpr(sets, RankingKind::Rescored);
    EXPECT_EQ(r.tp, 0u);
    EXPECT_EQ(r.fp, 1u);

    // Baseline ignores score ties: rank 1 still wins.
    const auto b = compute_fpr(sets, RankingKind::Baseline);
    EXPECT_EQ(b.tp, 1u);
}

TEST(ComputeFpr, ValidatesInput) {
    EXPECT_THROW(compute_fpr({}, RankingKind::Baseline), ValidationError);

    std::vector<CandidateSet> empty_set(1);
    empty_set[0].spectrum_id = "x";
    EXPECT_THROW(compute_fpr(empty_set, RankingKind::Baseline), ValidationError);

    std::vector<CandidateSet> two_correct;
    two_correct.push_back(make_set("x", {{2.0, true}, {1.0, true}}));
    EXPECT_THROW(compute_fpr(two_correct, RankingKind::Baseline), ValidationError);

    std::vector<CandidateSet> unscored;
    unscored.push_back(make_set("x", {{2.0, true}, {1.0, false}}));
    unscored[0].candidates[1].new_score.reset();
    EXPECT_THROW(compute_fpr(unscored, RankingKind::Rescored), ValidationError);
    EXPECT_NO_THROW(compute_fpr(unscored, RankingKind::Baseline));
}

TEST(ComputeFpr, MatchesOracleOnRandomInstances) {
    Rng rng(2024);
    for (int instance = 0; instance < 1000; ++instance) {
        const std::size_t n = 1 + rng.below(50);
        std::vector<CandidateSet> sets;
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t k = 1 + rng.below(6);
            // Integer scores in a small range make exact ties common.
            std::vector<std::pair<double, bool>> scored(k);
            for (auto& [score, correct] : scored) {
                score = static_cast<double>(rng.below(10));
                correct = false;
            }
            if (rng.coin(0.8)) scored[rng.below(k)].second = true;
            auto cs = make_set("s" + std::to_string(s), scored);
            // Shuffle storage order so top-candidate search is exercised.
            rng.shuffle(cs.candidates);
            sets.push_back(std::move(cs));
        }

        std::size_t base_fp = 0;
        std::size_t res_fp = 0;
        std::size_t recovered = 0;
        std::size_t lost = 0;
        std::size_t no_correct = 0;
        for (const auto& cs : sets) {
            const auto o = oracle_outcome(cs);
            base_fp += o.baseline_hit ? 0 : 1;
            res_fp += o.rescored_hit ? 0 : 1;
            recovered += (o.rescored_hit && !o.baseline_hit) ? 1 : 0;
            lost += (!o.rescored_hit && o.baseline_hit) ? 1 : 0;
            no_correct += o.has_correct ? 0 : 1;
        }

        const auto base = compute_fpr(sets, RankingKind::Baseline);
        const auto res = compute_fpr(sets, RankingKind::Rescored);
        ASSERT_EQ(base.fp, base_fp) << "instance " << instance;
        ASSERT_EQ(base.tp, n - base_fp);
        ASSERT_EQ(base.fpr, static_cast<double>(base_fp) / static_cast<double>(n));
        ASSERT_EQ(res.fp, res_fp) << "instance " << instance;
        ASSERT_EQ(res.fpr, static_cast<double>(res_fp) / static_cast<double>(n));
        ASSERT_EQ(res.missed_targets_recovered, recovered);
        ASSERT_EQ(res.targets_lost, lost);
        ASSERT_EQ(res.no_correct_candidate, no_correct);
    }
}

TEST(CompareReports, ComputesReductionPoints) {
    EvaluationReport before;
    before.n_spectra = 120;
    before.tp = 67;
    before.fp = 53;
    before.fpr = 53.0 / 120.0;
    EvaluationReport after = before;
    after.tp = 79;
    after.fp = 41;
    after.fpr = 41.0 / 120.0;
    after.missed_targets_recovered = 14;
    after.targets_lost = 2;

    const auto delta = compare_reports(before, after);
    EXPECT_DOUBLE_EQ(delta.fpr_before, before.fpr);
    EXPECT_DOUBLE_EQ(delta.fpr_after, after.fpr);
    EXPECT_NEAR(delta.reduction_points, 10.0, 1e-9);
    EXPECT_EQ(delta.missed_targets_recovered, 14u);
    EXPECT_EQ(delta.targets_lost, 2u);

    after.n_spectra = 121;
    EXPECT_THROW(compare_reports(before, after), ValidationError);
}

TEST(CandidateTable, RoundTrips) {
    std::vector<CandidateRow> rows;
    rows.push_back({"run:01", 1, "LGEYGFQN", 98.756, true});
    rows.push_back({"run:01", 2, "LGEYGFNQ", 45.5, false});
    rows.push_back({"synth-000002", 1, "GASHK", 12.25, false});

    std::stringstream buf;
    write_candidate_table(rows, buf);
    EXPECT_NE(buf.str().find("spectrum_id\trank\tpeptide\tdenovo_score\tis_correct"),
              std::string::npos);

    const auto back = read_candidate_table(buf);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i].spectrum_id, rows[i].spectrum_id);
        EXPECT_EQ(back[i].rank, rows[i].rank);
        EXPECT_EQ(back[i].peptide, rows[i].peptide);
        EXPECT_DOUBLE_EQ(back[i].denovo_score, rows[i].denovo_score);
        EXPECT_EQ(back[i].is_correct, rows[i].is_correct);
    }
}

TEST(CandidateTable, RejectsMalformedRows) {
    const auto parse = [](const std::string& text) {
        std::stringstream buf(text);
        return read_candidate_table(buf);
    };
    EXPECT_THROW(parse("wrong\theader\n"), ParseError);
    EXPECT_THROW(parse("spectrum_id\trank\tpeptide\tdenovo_score\tis_correct\n"
                       "s1\tone\tPEP\t1.0\t0\n"),
                 ParseError);
    EXPECT_THROW(parse("spectrum_id\trank\tpeptide\tdenovo_score\tis_correct\n"
                       "s1\t1\tPEP\t1.0\n"),
                 ParseError);
    EXPECT_THROW(read_candidate_table_file("/nonexistent/cands.tsv"), ValidationError);
}

TEST(RankedTable, RoundTripsBitExactScores) {
    std::vector<FeatureRow> rows;
    rows.push_back(make_row("s1", 1, 0.1, true));
    rows.push_back(make_row("s1", 2, 0.30000000000000004, false));
    rows.push_back(make_row("s2", 1, -1.5, false));
    rows.push_back(make_row("s2", 2, -1.5, true));  // forces a tie in s2
    auto sets = group_candidates(rows);
    rescore(f2_model(), sets);

    std::stringstream buf;
    write_ranked_table(sets, buf);
    const auto back = read_ranked_table(buf);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_FALSE(back[0].tied);
    EXPECT_TRUE(back[1].tied);
    for (std::size_t s = 0; s < sets.size(); ++s) {
        ASSERT_EQ(back[s].candidates.size(), sets[s].candidates.size());
        for (std::size_t i = 0; i < sets[s].candidates.size(); ++i) {
            const auto& want = sets[s].candidates[i];
            const auto& got = back[s].candidates[i];
            EXPECT_EQ(*got.new_score, *want.new_score);  // bit-exact through text
            EXPECT_EQ(got.orig_rank, want.orig_rank);
            EXPECT_EQ(got.is_correct, want.is_correct);
        }
    }

    // The report computed from the file equals the in-memory one.
    const auto before_disk = compute_fpr(back, RankingKind::Baseline);
    const auto before_mem = compute_fpr(sets, RankingKind::Baseline);
    EXPECT_EQ(before_disk.fp, before_mem.fp);
    const auto after_disk = compute_fpr(back, RankingKind::Rescored);
    const auto after_mem = compute_fpr(sets, RankingKind::Rescored);
    EXPECT_EQ(after_disk.fp, after_mem.fp);
}

TEST(RankedTable, ValidatesStructure) {
    const std::string header =
        "spectrum_id\trank\tpeptide\tnew_score\torig_rank\tis_correct\ttied\n";
    const auto parse = [](const std::string& text) {
        std::stringstream buf(text);
        return read_ranked_table(buf);
    };
    // Ranks must be consecutive from 1 within a spectrum.
    EXPECT_THROW(parse(header + "s1\t2\tPEP\t1.5\t1\t0\t0\n"), ParseError);
    EXPECT_THROW(parse(header + "s1\t1\tPEP\t1.5\t1\t0\t0\n"
                                "s1\t3\tPEP\t1.0\t2\t0\t0\n"),
                 ParseError);
    // The tie flag must agree across a spectrum's rows.
    EXPECT_THROW(parse(header + "s1\t1\tPEP\t1.5\t1\t0\t1\n"
                                "s1\t2\tPEP\t1.5\t2\t0\t0\n"),
                 ParseError);
    EXPECT_THROW(parse("bogus header\n"), ParseError);
    EXPECT_THROW(parse(header + "s1\t1\tPEP\tx\t1\t0\t0\n"), ParseError);
}

TEST(Report, WritesMachineReadableKeys) {
    std::vector<CandidateSet> sets;
    sets.push_back(make_set("a", {{1.0, false}, {9.0, true}}));
    sets.push_back(make_set("b", {{9.0, true}, {1.0, false}}));
    const auto before = compute_fpr(sets, RankingKind::Baseline);
    const auto after = compute_fpr(sets, RankingKind::Rescored);
    const auto delta = compare_reports(before, after);

    std::stringstream buf;
    write_report(before, after, delta, buf);
    const auto text = buf.str();
    EXPECT_NE(text.find("n_spectra\t2\n"), std::string::npos);
    EXPECT_NE(text.find("baseline_tp\t1\n"), std::string::npos);
    EXPECT_NE(text.find("baseline_fpr\t0.5\n"), std::string::npos);
    EXPECT_NE(text.find("rescored_tp\t2\n"), std::string::npos);
    EXPECT_NE(text.find("rescored_fpr\t0\n"), std::string::npos);
    EXPECT_NE(text.find("missed_targets_recovered\t1\n"), std::string::npos);
    EXPECT_NE(text.find("targets_lost\t0\n"), std::string::npos);
    EXPECT_NE(text.find("fpr_reduction_points\t50\n"), std::string::npos);

    std::stringstream human;
    print_report(before, after, delta, human);
    EXPECT_NE(human.str().find("FPR"), std::string::npos);
}
