#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "safepass/simulate.hpp"

namespace safepass {

// Trajectory CSV: one header row, then one record per line with columns
//   t, q0..q{n-1}, v0.., x0..x{d-1}, c, h, phi, u0.., u_nom0.., mu0.., S, hdot, in_C, in_C_eps
// Reals use %.17g so every double survives a round trip bit for bit; flags
// are 0/1.

class CsvFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string csv_header(int n, int d);
void write_csv(const Trajectory& traj, std::ostream& out);
void write_csv_file(const Trajectory& traj, const std::string& path);

/// Throws CsvFormatError on a missing/unknown header, ragged rows, or
/// unparsable numbers. An input with no records is an error as well.
Trajectory read_csv(std::istream& in);
Trajectory read_csv_file(const std::string& path);

}  // namespace safepass
