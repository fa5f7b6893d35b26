#pragma once

// Grid file container and CSV import/export. Layout is described in docs/formats.md.

#include <iosfwd>
#include <string>
#include <variant>

#include "dyadic/signal.hpp"

namespace dyadic::io {

/// Malformed or unreadable input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

using GridData = std::variant<GridSignal, HaarExpansion>;

/// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_double(double v);

void write_grid(std::ostream& os, const GridData& data);
GridData read_grid(std::istream& is);
void save_grid(const std::string& path, const GridData& data);
GridData load_grid(const std::string& path);

/// One row per cell (or coefficient slot): i0,...,i{N-1},value.
void write_csv(std::ostream& os, const GridData& data);
/// Reads the CSV layout of write_csv; `coefficients` selects the kind, depths are inferred
/// from the largest index per axis.
GridData read_csv(std::istream& is, bool coefficients);

}  // namespace dyadic::io
