#include "gppsm/theoretical.hpp"

#include <algorithm>

#include "gppsm/errors.hpp"

namespace gppsm {

TheoreticalSpectrum generate_theoretical(const Peptide& p, const MassTable& masses) {
    const std::size_t n = p.length();
    if (n < 2)
        throw ValidationError("peptide " + p.sequence() +
                              ": length must be >= 2 to fragment");

    TheoreticalSpectrum t;
    t.peptide = p;
    t.b_ions.reserve(n - 1);
    t.y_ions.reserve(n - 1);

    double prefix = masses.proton();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        prefix += masses.residue(p[i]);
        t.b_ions.push_back({IonSeries::B, static_cast<int>(i + 1), prefix});
    }

    double suffix = masses.water() + masses.proton();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        suffix += masses.residue(p[n - 1 - i]);
        t.y_ions.push_back({IonSeries::Y, static_cast<int>(i + 1), suffix});
    }
    return t;
}

std::vector<FragmentIon> TheoreticalSpectrum::merged_ions() const {
    std::vector<FragmentIon> all;
    all.reserve(ion_count());
    all.insert(all.end(), b_ions.begin(), b_ions.end());
    all.insert(all.end(), y_ions.begin(), y_ions.end());
    std::stable_sort(all.begin(), all.end(),
                     [](const FragmentIon& a, const FragmentIon& b) { return a.mz < b.mz; });
    return all;
}

} // namespace gppsm
