#include "gppsm/mgf.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "gppsm/errors.hpp"
#include "text_util.hpp"

namespace gppsm {

namespace {

bool parse_charge(std::string_view s, int& out) {
    s = detail::trim(s);
    if (s.empty()) return false;
    bool negative = false;
    if (s.back() == '+' || s.back() == '-') {
        negative = s.back() == '-';
        s.remove_suffix(1);
    } else if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    long v = 0;
    if (!detail::parse_long(s, v) || v <= 0) return false;
    if (negative) return false;
    out = static_cast<int>(v);
    return true;
}

} // namespace

std::vector<Spectrum> parse_mgf(std::istream& in, const MassTable& masses) {
    std::vector<Spectrum> out;
    std::string line;
    std::size_t lineno = 0;

    bool in_block = false;
    std::size_t block_line = 0;
    std::size_t block_index = 0;
    Spectrum cur;
    bool have_pepmass = false, have_charge = false;
    double pepmass_mz = 0.0;

    while (std::getline(in, line)) {
        ++lineno;
        const auto s = detail::trim(line);
        if (s.empty() || s.front() == '#') continue;

        if (!in_block) {
            if (s == "BEGIN IONS") {
                in_block = true;
                block_line = lineno;
                cur = Spectrum{};
                have_pepmass = have_charge = false;
                ++block_index;
            } else {
                throw ParseError("expected BEGIN IONS, got: " + std::string(s), lineno);
            }
            continue;
        }

        if (s == "END IONS") {
            if (!have_pepmass) throw ParseError("block is missing PEPMASS", block_line);
            if (!have_charge) throw ParseError("block is missing CHARGE", block_line);
            if (cur.peaks.empty()) throw ParseError("block has an empty peak list", block_line);
            if (cur.id.empty()) cur.id = "scan_" + std::to_string(block_index);
            cur.precursor_mass =
                pepmass_mz * cur.charge - cur.charge * masses.proton();
            sort_peaks(cur);
            validate(cur);
            out.push_back(std::move(cur));
            in_block = false;
            continue;
        }

        const auto eq = s.find('=');
        if (eq != std::string_view::npos && s.find_first_of(" \t") > eq) {
            const auto key = s.substr(0, eq);
            const auto value = detail::trim(s.substr(eq + 1));
            if (key == "TITLE") {
                cur.id = std::string(value);
            } else if (key == "PEPMASS") {
                // PEPMASS may carry a trailing intensity; only m/z is used.
                const auto fields = detail::split_ws(value);
                if (fields.empty() || !detail::parse_double(fields[0], pepmass_mz) ||
                    pepmass_mz <= 0.0)
                    throw ParseError("invalid PEPMASS value", lineno);
                have_pepmass = true;
            } else if (key == "CHARGE") {
                if (!parse_charge(value, cur.charge))
                    throw ParseError("invalid CHARGE value", lineno);
                have_charge = true;
            }
            // Other headers (RTINSECONDS, SCANS, ...) are ignored.
            continue;
        }

        const auto fields = detail::split_ws(s);
        if (fields.size() < 2)
            throw ParseError("expected `mz intensity` peak line", lineno);
        Peak peak;
        if (!detail::parse_double(fields[0], peak.mz) ||
            !detail::parse_double(fields[1], peak.intensity))
            throw ParseError("non-numeric peak line", lineno);
        cur.peaks.push_back(peak);
    }

    if (in_block) throw ParseError("block is missing END IONS", block_line);
    return out;
}

std::vector<Spectrum> parse_mgf(const std::string& text, const MassTable& masses) {
    std::istringstream in(text);
    return parse_mgf(in, masses);
}

std::vector<Spectrum> parse_mgf_file(const std::string& path, const MassTable& masses) {
    auto in = detail::open_input(path);
    return parse_mgf(in, masses);
}

void serialize_mgf(const std::vector<Spectrum>& spectra, std::ostream& out,
                   const MassTable& masses) {
    for (const auto& s : spectra) {
        const double pepmass_mz =
            (s.precursor_mass + s.charge * masses.proton()) / s.charge;
        out << "BEGIN IONS\n";
        out << "TITLE=" << s.id << "\n";
        out << "PEPMASS=" << detail::format_double(pepmass_mz, "%.5f") << "\n";
        out << "CHARGE=" << s.charge << "+\n";
        for (const auto& p : s.peaks)
            out << detail::format_double(p.mz, "%.5f") << ' '
                << detail::format_double(p.intensity, "%.5f") << "\n";
        out << "END IONS\n";
    }
}

std::string serialize_mgf(const std::vector<Spectrum>& spectra, const MassTable& masses) {
    std::ostringstream out;
    serialize_mgf(spectra, out, masses);
    return out.str();
}

void write_mgf_file(const std::vector<Spectrum>& spectra, const std::string& path,
                    const MassTable& masses) {
    auto out = detail::open_output(path);
    serialize_mgf(spectra, out, masses);
}

} // namespace gppsm
