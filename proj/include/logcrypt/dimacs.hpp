#pragma once

#include "logcrypt/cnf.hpp"

#include <iosfwd>
#include <string>
#include <string_view>

namespace logcrypt {

/// Reads DIMACS CNF. Besides plain comments, two annotations are understood:
///   c input <name> <var>      marks an input variable (order is kept)
///   c keystream <t> <var>     output bit t (1-based, consecutive)
/// Clauses may span lines and must end with 0. Errors raise ParseError
/// carrying the offending line number.
[[nodiscard]] Cnf parse_dimacs(std::istream &in);
[[nodiscard]] Cnf parse_dimacs(std::string_view text);
[[nodiscard]] Cnf read_dimacs_file(const std::string &path);

/// Annotations first, then the `p cnf` header, then one clause per line.
void write_dimacs(std::ostream &out, const Cnf &cnf);
[[nodiscard]] std::string write_dimacs(const Cnf &cnf);
void write_dimacs_file(const std::string &path, const Cnf &cnf);

} // namespace logcrypt
