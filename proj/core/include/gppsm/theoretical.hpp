#pragma once

#include <vector>

#include "gppsm/mass.hpp"

namespace gppsm {

enum class IonSeries : unsigned char { B, Y };

/// One singly charged fragment ion. `index` is 1-based within its series:
/// b_i spans the first i residues, y_i the last i.
struct FragmentIon {
    IonSeries series = IonSeries::B;
    int index = 0;
    double mz = 0.0;
};

/// The predicted fragment spectrum of a peptide under CID rules:
/// singly charged b- and y-ions only, n-1 of each for n residues.
///
/// b_i = sum of the first i residue masses + proton
/// y_i = sum of the last i residue masses + water + proton
///
/// Complementarity: b_i + y_{n-i} = peptide_mass + 2 * proton.
struct TheoreticalSpectrum {
    Peptide peptide;
    std::vector<FragmentIon> b_ions;  // index 1..n-1, ascending m/z
    std::vector<FragmentIon> y_ions;  // index 1..n-1, ascending m/z

    std::size_t ion_count() const noexcept { return b_ions.size() + y_ions.size(); }

    /// Both series merged into one list, sorted ascending by m/z.
    std::vector<FragmentIon> merged_ions() const;
};

/// Builds the theoretical spectrum for a peptide of length >= 2.
/// Throws ValidationError for shorter peptides (no fragments exist).
TheoreticalSpectrum generate_theoretical(const Peptide& p, const MassTable& masses);

} // namespace gppsm
