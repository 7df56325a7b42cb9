#pragma once

#include <array>
#include <string>
#include <string_view>

#include "gppsm/errors.hpp"

namespace gppsm {

/// A peptide sequence over the 20 standard amino-acid letters.
class Peptide {
public:
    Peptide() = default;

    /// Throws ValidationError on an empty sequence or a non-standard letter.
    explicit Peptide(std::string sequence);

    const std::string& sequence() const noexcept { return sequence_; }
    std::size_t length() const noexcept { return sequence_.size(); }
    char operator[](std::size_t i) const { return sequence_[i]; }

    bool operator==(const Peptide& other) const noexcept = default;

    static bool is_standard_residue(char c) noexcept;

private:
    std::string sequence_;
};

/// Monoisotopic residue masses plus the proton and water constants.
///
/// The built-in table carries the standard published values; an alternative
/// table can be loaded from a key-value text file (one `X mass` pair per
/// line, plus optional `proton` and `water` entries).
class MassTable {
public:
    static const MassTable& builtin();
    static MassTable load(const std::string& path);

    /// Mass of a residue letter. Throws ValidationError for unknown letters.
    double residue(char letter) const;

    double proton() const noexcept { return proton_; }
    double water() const noexcept { return water_; }

    void set_residue(char letter, double mass);
    void set_proton(double mass) noexcept { proton_ = mass; }
    void set_water(double mass) noexcept { water_ = mass; }

private:
    MassTable() = default;

    std::array<double, 26> residue_{};  // indexed by letter - 'A'; 0 = absent
    double proton_ = 0.0;
    double water_ = 0.0;
};

/// Neutral monoisotopic peptide mass: sum of residue masses plus one water.
double peptide_mass(const Peptide& p, const MassTable& masses);

} // namespace gppsm
