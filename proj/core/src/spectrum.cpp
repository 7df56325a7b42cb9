#include "gppsm/spectrum.hpp"

#include <algorithm>

#include "gppsm/errors.hpp"

namespace gppsm {

void sort_peaks(Spectrum& s) {
    std::stable_sort(s.peaks.begin(), s.peaks.end(),
                     [](const Peak& a, const Peak& b) { return a.mz < b.mz; });
}

void validate(const Spectrum& s) {
    if (s.charge < 1) throw ValidationError("spectrum " + s.id + ": charge must be >= 1");
    if (s.precursor_mass <= 0.0)
        throw ValidationError("spectrum " + s.id + ": precursor mass must be positive");
    double prev = 0.0;
    for (const auto& p : s.peaks) {
        if (p.mz <= 0.0) throw ValidationError("spectrum " + s.id + ": peak m/z must be positive");
        if (p.intensity < 0.0)
            throw ValidationError("spectrum " + s.id + ": negative peak intensity");
        if (p.mz < prev) throw ValidationError("spectrum " + s.id + ": peaks not sorted by m/z");
        prev = p.mz;
    }
}

} // namespace gppsm
