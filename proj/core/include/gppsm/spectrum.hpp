#pragma once

#include <string>
#include <vector>

namespace gppsm {

/// One centroided peak: m/z in Thomson, intensity in arbitrary units.
struct Peak {
    double mz = 0.0;
    double intensity = 0.0;

    bool operator==(const Peak&) const noexcept = default;
};

/// An experimental MS/MS spectrum.
///
/// `precursor_mass` is the neutral (uncharged) peptide mass; conversion from
/// the observed precursor m/z happens once at parse time. Peaks are kept
/// sorted ascending by m/z; duplicate m/z values are retained as-is.
struct Spectrum {
    std::string id;
    std::vector<Peak> peaks;
    double precursor_mass = 0.0;
    int charge = 1;

    bool operator==(const Spectrum&) const noexcept = default;

    double total_intensity() const noexcept {
        double sum = 0.0;
        for (const auto& p : peaks) sum += p.intensity;
        return sum;
    }
};

/// Sorts peaks ascending by m/z (stable for duplicates).
void sort_peaks(Spectrum& s);

/// Checks the type invariants: sorted peaks, positive m/z, non-negative
/// intensity, charge >= 1, precursor_mass > 0. Throws ValidationError.
void validate(const Spectrum& s);

} // namespace gppsm
