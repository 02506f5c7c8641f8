#pragma once

#include <string>

#include "jbd/matrix.hpp"

namespace jbd {

/// Reads a Matrix Market file into CSR form.
///
/// Accepts coordinate and array formats with a real field and general or
/// symmetric symmetry. Symmetric storage is expanded to the full pattern.
/// Duplicate coordinate entries are summed; explicitly stored zeros are kept.
/// Complex, pattern, and integer fields raise UnsupportedFormatError; malformed
/// lines raise ParseError with the offending line number.
CsrMatrix load_matrix_market(const std::string& path);

/// Writes a CSR matrix as coordinate/real/general Matrix Market with 1-based
/// indices and 17 significant digits, so a load round-trips bit-exactly.
void write_matrix_market(const CsrMatrix& a, const std::string& path);

}  // namespace jbd
