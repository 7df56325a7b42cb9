#include "gppsm/mass.hpp"

#include <cctype>

#include "text_util.hpp"

namespace gppsm {

namespace {

// Standard monoisotopic residue masses, Da.
constexpr struct { char letter; double mass; } kResidues[] = {
    {'G', 57.02146},  {'A', 71.03711},  {'S', 87.03203},  {'P', 97.05276},
    {'V', 99.06841},  {'T', 101.04768}, {'C', 103.00919}, {'L', 113.08406},
    {'I', 113.08406}, {'N', 114.04293}, {'D', 115.02694}, {'Q', 128.05858},
    {'K', 128.09496}, {'E', 129.04259}, {'M', 131.04049}, {'H', 137.05891},
    {'F', 147.06841}, {'R', 156.10111}, {'Y', 163.06333}, {'W', 186.07931},
};

constexpr double kProton = 1.00728;
constexpr double kWater = 18.01056;

} // namespace

Peptide::Peptide(std::string sequence) : sequence_(std::move(sequence)) {
    if (sequence_.empty()) throw ValidationError("empty peptide sequence");
    for (char c : sequence_) {
        if (!is_standard_residue(c))
            throw ValidationError(std::string("unknown residue letter '") + c +
                                  "' in peptide " + sequence_);
    }
}

bool Peptide::is_standard_residue(char c) noexcept {
    for (const auto& r : kResidues)
        if (r.letter == c) return true;
    return false;
}

const MassTable& MassTable::builtin() {
    static const MassTable table = [] {
        MassTable t;
        for (const auto& r : kResidues) t.set_residue(r.letter, r.mass);
        t.set_proton(kProton);
        t.set_water(kWater);
        return t;
    }();
    return table;
}

MassTable MassTable::load(const std::string& path) {
    auto in = detail::open_input(path);
    MassTable t = builtin();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto s = detail::trim(line);
        if (s.empty() || s.front() == '#') continue;
        const auto fields = detail::split_ws(s);
        if (fields.size() != 2)
            throw ParseError("expected `name mass` in mass table", lineno);
        double mass = 0.0;
        if (!detail::parse_double(fields[1], mass) || mass <= 0.0)
            throw ParseError("invalid mass value in mass table", lineno);
        if (fields[0] == "proton") {
            t.set_proton(mass);
        } else if (fields[0] == "water") {
            t.set_water(mass);
        } else if (fields[0].size() == 1 && Peptide::is_standard_residue(fields[0][0])) {
            t.set_residue(fields[0][0], mass);
        } else {
            throw ParseError("unknown mass table entry: " + std::string(fields[0]), lineno);
        }
    }
    return t;
}

double MassTable::residue(char letter) const {
    if (letter >= 'A' && letter <= 'Z') {
        const double m = residue_[static_cast<std::size_t>(letter - 'A')];
        if (m > 0.0) return m;
    }
    throw ValidationError(std::string("unknown residue letter '") + letter + "'");
}

void MassTable::set_residue(char letter, double mass) {
    if (letter < 'A' || letter > 'Z')
        throw ValidationError("residue letters must be A-Z");
    residue_[static_cast<std::size_t>(letter - 'A')] = mass;
}

double peptide_mass(const Peptide& p, const MassTable& masses) {
    double sum = masses.water();
    for (char c : p.sequence()) sum += masses.residue(c);
    return sum;
}

} // namespace gppsm
