#include "gppsm/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "gppsm/errors.hpp"
#include "text_util.hpp"

namespace gppsm {

namespace {

void require_same_length(const BinnedVector& a, const BinnedVector& b) {
    if (a.bins.size() != b.bins.size())
        throw ValidationError("binned vector length mismatch: " +
                              std::to_string(a.bins.size()) + " vs " +
                              std::to_string(b.bins.size()));
}

double squared_norm(const BinnedVector& v) {
    double n2 = 0.0;
    for (double x : v.bins) n2 += x * x;
    return n2;
}

/// Nearest peak to `mz` within +-tol, or npos. Ties go to the lower m/z peak.
std::size_t nearest_peak(const std::vector<Peak>& peaks, double mz, double tol) {
    constexpr auto npos = static_cast<std::size_t>(-1);
    const auto it = std::lower_bound(
        peaks.begin(), peaks.end(), mz,
        [](const Peak& p, double value) { return p.mz < value; });

    std::size_t best = npos;
    double best_dist = tol;
    if (it != peaks.begin()) {
        const auto prev = std::prev(it);
        const double d = mz - prev->mz;
        if (d <= best_dist) {
            best = static_cast<std::size_t>(prev - peaks.begin());
            best_dist = d;
        }
    }
    if (it != peaks.end()) {
        const double d = it->mz - mz;
        // Strict comparison keeps the lower-m/z peak on an exact tie.
        if (d <= tol && (best == npos || d < best_dist)) {
            best = static_cast<std::size_t>(it - peaks.begin());
        }
    }
    return best;
}

/// Length of the initial run of matched ions (index 1, 2, ...).
double consecutive_from_start(const std::vector<bool>& matched) {
    std::size_t run = 0;
    while (run < matched.size() && matched[run]) ++run;
    return static_cast<double>(run);
}

} // namespace

double FeatureVector::value(std::size_t index) const {
    return const_cast<FeatureVector*>(this)->value(index);
}

double& FeatureVector::value(std::size_t index) {
    switch (index) {
        case 0: return f1_intensity_matched;
        case 1: return f2_n_matched;
        case 2: return f3_n_unmatched;
        case 3: return f4_delta_mass;
        case 4: return f5_nterm;
        case 5: return f6_cterm;
        case 6: return f7_cosine;
        case 7: return f8_euclidean;
        case 8: return f9_hamming;
        case 9: return f10_seq_fixed;
        case 10: return f11_seq_variable;
        default: throw ValidationError("feature index out of range");
    }
}

const char* FeatureVector::name(std::size_t index) {
    static const char* names[] = {"f1", "f2", "f3", "f4", "f5", "f6",
                                  "f7", "f8", "f9", "f10", "f11"};
    if (index >= kCount) throw ValidationError("feature index out of range");
    return names[index];
}

MatchResult match_peaks(const Spectrum& s, const TheoreticalSpectrum& t, double tolerance) {
    if (tolerance <= 0.0) throw ValidationError("match tolerance must be positive");
    constexpr auto npos = static_cast<std::size_t>(-1);

    MatchResult result;
    result.tolerance = tolerance;
    const auto ions = t.merged_ions();
    result.ions.reserve(ions.size());
    for (const auto& ion : ions) {
        IonMatch m;
        m.ion = ion;
        const auto idx = nearest_peak(s.peaks, ion.mz, tolerance);
        if (idx != npos) {
            m.matched = true;
            m.peak_index = idx;
        }
        result.ions.push_back(m);
    }
    return result;
}

BinnedVector bin_spectrum(const Spectrum& s, std::size_t n_bins, double bin_width) {
    if (n_bins == 0 || bin_width <= 0.0)
        throw ValidationError("binning requires n_bins > 0 and bin_width > 0");
    BinnedVector v;
    v.bins.assign(n_bins, 0.0);
    v.bin_width = bin_width;
    for (const auto& p : s.peaks) {
        const auto bin = static_cast<std::size_t>(std::floor(p.mz / bin_width));
        if (bin >= n_bins) {
            ++v.dropped;
            continue;
        }
        v.bins[bin] += p.intensity;
    }
    return v;
}

BinnedVector bin_spectrum(const TheoreticalSpectrum& t, std::size_t n_bins, double bin_width) {
    if (n_bins == 0 || bin_width <= 0.0)
        throw ValidationError("binning requires n_bins > 0 and bin_width > 0");
    BinnedVector v;
    v.bins.assign(n_bins, 0.0);
    v.bin_width = bin_width;
    for (const auto& ion : t.merged_ions()) {
        const auto bin = static_cast<std::size_t>(std::floor(ion.mz / bin_width));
        if (bin >= n_bins) {
            ++v.dropped;
            continue;
        }
        v.bins[bin] = 1.0;
    }
    return v;
}

double cosine_feature(const BinnedVector& a, const BinnedVector& b) {
    require_same_length(a, b);
    double dot = 0.0;
    for (std::size_t i = 0; i < a.bins.size(); ++i) dot += a.bins[i] * b.bins[i];
    const double n2 = squared_norm(a) * squared_norm(b);
    if (n2 == 0.0) return 0.0;
    return dot / std::sqrt(n2);
}

double euclidean_feature(const BinnedVector& a, const BinnedVector& b) {
    require_same_length(a, b);
    const double na = std::sqrt(squared_norm(a));
    const double nb = std::sqrt(squared_norm(b));
    if (na == 0.0 || nb == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.bins.size(); ++i) {
        const double d = a.bins[i] / na - b.bins[i] / nb;
        sum += d * d;
    }
    return std::sqrt(sum);
}

double hamming_feature(const BinnedVector& a, const BinnedVector& b) {
    require_same_length(a, b);
    std::size_t count = 0;
    for (std::size_t i = 0; i < a.bins.size(); ++i)
        count += (a.bins[i] != 0.0) != (b.bins[i] != 0.0) ? 1 : 0;
    return static_cast<double>(count);
}

Spectrum preprocess_spectrum(const Spectrum& s, const FeatureConfig& cfg) {
    Spectrum out;
    out.id = s.id;
    out.precursor_mass = s.precursor_mass;
    out.charge = s.charge;
    if (s.peaks.empty()) return out;

    out.peaks = s.peaks;
    for (auto& p : out.peaks) p.intensity = std::sqrt(p.intensity);

    // Rescale each m/z window so that its strongest peak reaches the target.
    const double lo = out.peaks.front().mz;
    const double hi = out.peaks.back().mz;
    const double span = hi - lo;
    const int windows = std::max(1, cfg.window_count);
    auto window_of = [&](double mz) {
        if (span <= 0.0) return 0;
        const int w = static_cast<int>((mz - lo) / span * windows);
        return std::clamp(w, 0, windows - 1);
    };

    std::vector<double> window_max(static_cast<std::size_t>(windows), 0.0);
    for (const auto& p : out.peaks) {
        auto& m = window_max[static_cast<std::size_t>(window_of(p.mz))];
        m = std::max(m, p.intensity);
    }
    for (auto& p : out.peaks) {
        const double m = window_max[static_cast<std::size_t>(window_of(p.mz))];
        if (m > 0.0) p.intensity *= cfg.window_target / m;
    }

    double global_max = 0.0;
    for (const auto& p : out.peaks) global_max = std::max(global_max, p.intensity);
    const double floor_value = cfg.noise_floor * global_max;
    std::erase_if(out.peaks, [&](const Peak& p) { return p.intensity < floor_value; });
    return out;
}

std::pair<double, double> sequest_features(const Spectrum& s, const TheoreticalSpectrum& t,
                                           const FeatureConfig& cfg) {
    const Spectrum cleaned = preprocess_spectrum(s, cfg);

    const auto vs_fixed = bin_spectrum(cleaned, cfg.fixed_bins, cfg.bin_width);
    const auto vt_fixed = bin_spectrum(t, cfg.fixed_bins, cfg.bin_width);
    const double fixed = cosine_feature(vs_fixed, vt_fixed);

    // The variable length covers exactly the precursor mass range.
    const auto var_bins =
        static_cast<std::size_t>(std::ceil(s.precursor_mass / cfg.bin_width));
    const auto vs_var = bin_spectrum(cleaned, std::max<std::size_t>(var_bins, 1), cfg.bin_width);
    const auto vt_var = bin_spectrum(t, std::max<std::size_t>(var_bins, 1), cfg.bin_width);
    const double variable = cosine_feature(vs_var, vt_var);

    return {fixed, variable};
}

FeatureVector extract_features(const Spectrum& s, const Peptide& p,
                               const MassTable& masses, const FeatureConfig& cfg) {
    const auto theo = generate_theoretical(p, masses);
    const auto match = match_peaks(s, theo, cfg.tolerance);

    FeatureVector fv;

    // f1 sums each matched experimental peak once, even when it serves
    // several theoretical ions.
    std::vector<bool> peak_used(s.peaks.size(), false);
    std::vector<bool> b_matched(theo.b_ions.size(), false);
    std::vector<bool> y_matched(theo.y_ions.size(), false);
    for (const auto& m : match.ions) {
        if (!m.matched) continue;
        peak_used[m.peak_index] = true;
        auto& series = m.ion.series == IonSeries::B ? b_matched : y_matched;
        series[static_cast<std::size_t>(m.ion.index - 1)] = true;
    }
    for (std::size_t i = 0; i < s.peaks.size(); ++i)
        if (peak_used[i]) fv.f1_intensity_matched += s.peaks[i].intensity;

    fv.f2_n_matched = static_cast<double>(match.matched_count());
    fv.f3_n_unmatched = static_cast<double>(match.unmatched_count());
    fv.f4_delta_mass = std::abs(s.precursor_mass - peptide_mass(p, masses));
    fv.f5_nterm = consecutive_from_start(b_matched);
    fv.f6_cterm = consecutive_from_start(y_matched);

    const auto vs = bin_spectrum(s, cfg.fixed_bins, cfg.bin_width);
    const auto vt = bin_spectrum(theo, cfg.fixed_bins, cfg.bin_width);
    fv.f7_cosine = cosine_feature(vs, vt);
    fv.f8_euclidean = euclidean_feature(vs, vt);
    fv.f9_hamming = hamming_feature(vs, vt);

    const auto [seq_fixed, seq_variable] = sequest_features(s, theo, cfg);
    fv.f10_seq_fixed = seq_fixed;
    fv.f11_seq_variable = seq_variable;
    return fv;
}

// --- feature table I/O --------------------------------------------------------

namespace {

constexpr const char* kFeatureHeader =
    "psm_id\tpeptide\tf1\tf2\tf3\tf4\tf5\tf6\tf7\tf8\tf9\tf10\tf11\ttarget\tis_correct";

} // namespace

void write_feature_table(const std::vector<FeatureRow>& rows, std::ostream& out) {
    out << kFeatureHeader << "\n";
    for (const auto& row : rows) {
        out << row.psm_id() << '\t' << row.peptide;
        for (std::size_t i = 0; i < FeatureVector::kCount; ++i)
            out << '\t' << detail::format_g6(row.features.value(i));
        out << '\t'
            << (row.features.target ? detail::format_g6(*row.features.target) : "NA");
        out << '\t' << (row.is_correct ? 1 : 0) << "\n";
    }
}

void write_feature_table_file(const std::vector<FeatureRow>& rows, const std::string& path) {
    auto out = detail::open_output(path);
    write_feature_table(rows, out);
}

std::vector<FeatureRow> read_feature_table(std::istream& in) {
    std::vector<FeatureRow> rows;
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) return rows;
    ++lineno;
    if (detail::trim(line) != kFeatureHeader)
        throw ParseError("unexpected feature table header", lineno);

    while (std::getline(in, line)) {
        ++lineno;
        const auto s = detail::trim(line);
        if (s.empty()) continue;
        const auto fields = detail::split_tabs(s);
        if (fields.size() != 2 + FeatureVector::kCount + 2)
            throw ParseError("wrong field count in feature table row", lineno);

        FeatureRow row;
        const auto id = fields[0];
        const auto colon = id.rfind(':');
        long rank = 0;
        if (colon == std::string_view::npos || !detail::parse_long(id.substr(colon + 1), rank))
            throw ParseError("psm_id must be <spectrum_id>:<rank>", lineno);
        row.spectrum_id = std::string(id.substr(0, colon));
        row.rank = static_cast<int>(rank);
        row.peptide = std::string(fields[1]);

        for (std::size_t i = 0; i < FeatureVector::kCount; ++i) {
            double v = 0.0;
            if (!detail::parse_double(fields[2 + i], v))
                throw ParseError("non-numeric feature value", lineno);
            row.features.value(i) = v;
        }
        const auto target = fields[2 + FeatureVector::kCount];
        if (target != "NA") {
            double v = 0.0;
            if (!detail::parse_double(target, v))
                throw ParseError("non-numeric target value", lineno);
            row.features.target = v;
        }
        const auto flag = fields[3 + FeatureVector::kCount];
        if (flag == "1") {
            row.is_correct = true;
        } else if (flag == "0") {
            row.is_correct = false;
        } else {
            throw ParseError("is_correct must be 0 or 1", lineno);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<FeatureRow> read_feature_table_file(const std::string& path) {
    auto in = detail::open_input(path);
    return read_feature_table(in);
}

} // namespace gppsm
