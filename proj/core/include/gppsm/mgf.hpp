#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gppsm/mass.hpp"
#include "gppsm/spectrum.hpp"

namespace gppsm {

/// Parses MGF text: BEGIN IONS/END IONS blocks with TITLE=, PEPMASS=,
/// CHARGE=n+ headers and whitespace-separated `mz intensity` peak lines.
///
/// PEPMASS is read as precursor m/z; the stored precursor_mass is the
/// neutral mass  PEPMASS * charge - charge * proton.  Peaks are sorted
/// ascending by m/z. Malformed blocks (missing END IONS, missing PEPMASS
/// or CHARGE, a non-numeric peak line, an empty peak list) raise ParseError
/// with the offending line number.
std::vector<Spectrum> parse_mgf(std::istream& in, const MassTable& masses);
std::vector<Spectrum> parse_mgf(const std::string& text, const MassTable& masses);
std::vector<Spectrum> parse_mgf_file(const std::string& path, const MassTable& masses);

/// Writes spectra back to MGF. Masses are formatted with 5 decimal places,
/// which round-trips through parse_mgf exactly.
void serialize_mgf(const std::vector<Spectrum>& spectra, std::ostream& out,
                   const MassTable& masses);
std::string serialize_mgf(const std::vector<Spectrum>& spectra, const MassTable& masses);
void write_mgf_file(const std::vector<Spectrum>& spectra, const std::string& path,
                    const MassTable& masses);

} // namespace gppsm
