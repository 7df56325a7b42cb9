#include "gppsm/mass.hpp"

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "gppsm/errors.hpp"
#include "gppsm/rng.hpp"

namespace fs = std::filesystem;
using namespace gppsm;

namespace {

constexpr std::string_view kResidues = "ACDEFGHIKLMNPQRSTVWY";

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

} // namespace

TEST(Peptide, AcceptsStandardSequences) {
    const Peptide p("LGEYGFQN");
    EXPECT_EQ(p.sequence(), "LGEYGFQN");
    EXPECT_EQ(p.length(), 8u);
    EXPECT_EQ(p[0], 'L');
    EXPECT_EQ(p[7], 'N');
}

TEST(Peptide, RejectsEmptyAndNonStandard) {
    EXPECT_THROW(Peptide(""), ValidationError);
    EXPECT_THROW(Peptide("GAZ"), ValidationError);  // Z is not a residue
    EXPECT_THROW(Peptide("gas"), ValidationError);  // lower case is not accepted
    EXPECT_THROW(Peptide("GA S"), ValidationError);
}

TEST(Peptide, StandardResidueLetterSet) {
    for (char c : kResidues) EXPECT_TRUE(Peptide::is_standard_residue(c)) << c;
    EXPECT_FALSE(Peptide::is_standard_residue('B'));
    EXPECT_FALSE(Peptide::is_standard_residue('Z'));
    EXPECT_FALSE(Peptide::is_standard_residue('a'));
}

TEST(MassTable, BuiltinConstants) {
    const auto& m = MassTable::builtin();
    EXPECT_DOUBLE_EQ(m.proton(), 1.00728);
    EXPECT_DOUBLE_EQ(m.water(), 18.01056);
    EXPECT_DOUBLE_EQ(m.residue('G'), 57.02146);
    EXPECT_DOUBLE_EQ(m.residue('A'), 71.03711);
    EXPECT_DOUBLE_EQ(m.residue('W'), 186.07931);
    // Leucine and isoleucine are isobaric.
    EXPECT_DOUBLE_EQ(m.residue('L'), m.residue('I'));
    EXPECT_THROW(m.residue('Z'), ValidationError);
}

TEST(MassTable, PeptideMassExamples) {
    const auto& m = MassTable::builtin();
    EXPECT_NEAR(peptide_mass(Peptide("G"), m), 75.03202, 1e-9);
    EXPECT_NEAR(peptide_mass(Peptide("GG"), m), 132.05348, 1e-9);
    EXPECT_NEAR(peptide_mass(Peptide("GAS"), m), 233.10116, 1e-9);
    EXPECT_NEAR(peptide_mass(Peptide("LGEYGFQN"), m), 926.41338, 1e-9);
}

TEST(MassTable, ConcatenationAddsResiduesMinusWater) {
    const auto& m = MassTable::builtin();
    Rng rng(41);
    for (int i = 0; i < 200; ++i) {
        std::string a(1 + rng.below(8), 'G');
        std::string b(1 + rng.below(8), 'G');
        for (auto& c : a) c = kResidues[rng.below(kResidues.size())];
        for (auto& c : b) c = kResidues[rng.below(kResidues.size())];
        const double whole = peptide_mass(Peptide(a + b), m);
        const double parts = peptide_mass(Peptide(a), m) + peptide_mass(Peptide(b), m);
        EXPECT_NEAR(whole, parts - m.water(), 1e-9) << a << "+" << b;
    }
}

TEST(MassTable, LoadOverridesAndValidates) {
    const auto path = write_temp("gppsm_mass_ok.txt",
                                 "# comment line\n"
                                 "G 1.5\n"
                                 "A 2.5\n"
                                 "proton 0.25\n"
                                 "water 0.125\n");
    const auto m = MassTable::load(path);
    EXPECT_DOUBLE_EQ(m.residue('G'), 1.5);
    EXPECT_DOUBLE_EQ(m.residue('A'), 2.5);
    EXPECT_DOUBLE_EQ(m.proton(), 0.25);
    EXPECT_DOUBLE_EQ(m.water(), 0.125);
    fs::remove(path);
}

TEST(MassTable, LoadReportsBadLines) {
    const auto bad_mass = write_temp("gppsm_mass_bad1.txt", "G abc\n");
    EXPECT_THROW(MassTable::load(bad_mass), ParseError);
    fs::remove(bad_mass);

    const auto bad_key = write_temp("gppsm_mass_bad2.txt", "G 1.0\nneutron 5\n");
    try {
        MassTable::load(bad_key);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    fs::remove(bad_key);

    EXPECT_THROW(MassTable::load("/nonexistent/gppsm_mass.txt"), ValidationError);
}

TEST(MassTable, LoadedTableDrivesPeptideMass) {
    const auto path = write_temp("gppsm_mass_small.txt",
                                 "G 1.0\nA 2.0\nwater 0.5\nproton 0.25\n");
    const auto m = MassTable::load(path);
    EXPECT_DOUBLE_EQ(peptide_mass(Peptide("GAG"), m), 1.0 + 2.0 + 1.0 + 0.5);
    fs::remove(path);
}
