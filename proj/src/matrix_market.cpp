#include "jbd/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "jbd/errors.hpp"

namespace jbd {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct Header {
  bool coordinate = true;
  bool symmetric = false;
};

Header parse_header(const std::string& line, long lineno) {
  std::istringstream ss(line);
  std::string banner, object, format, field, symmetry;
  ss >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket")
    throw ParseError("missing %%MatrixMarket banner", lineno);
  if (lower(object) != "matrix") throw ParseError("unsupported object '" + object + "'", lineno);

  Header h;
  const std::string fmt = lower(format);
  if (fmt == "coordinate")
    h.coordinate = true;
  else if (fmt == "array")
    h.coordinate = false;
  else
    throw ParseError("unknown format '" + format + "'", lineno);

  const std::string fld = lower(field);
  if (fld != "real")
    throw UnsupportedFormatError("unsupported field '" + field + "', only real is handled");

  const std::string sym = lower(symmetry);
  if (sym == "general")
    h.symmetric = false;
  else if (sym == "symmetric")
    h.symmetric = true;
  else
    throw UnsupportedFormatError("unsupported symmetry '" + symmetry +
                                 "', only general and symmetric are handled");
  return h;
}

bool data_line(std::istream& in, std::string& line, long& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;   // blank
    if (line[pos] == '%') continue;           // comment
    return true;
  }
  return false;
}

double parse_value(const std::string& tok, long lineno) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw ParseError("trailing characters in number '" + tok + "'", lineno);
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("bad numeric value '" + tok + "'", lineno);
  }
}

}  // namespace

CsrMatrix load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  long lineno = 0;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++lineno;
  const Header h = parse_header(line, lineno);

  if (!data_line(in, line, lineno)) throw ParseError("missing size line", lineno);
  std::istringstream size_ss(line);
  long nrows = -1, ncols = -1, nnz = -1;
  if (h.coordinate) {
    if (!(size_ss >> nrows >> ncols >> nnz)) throw ParseError("bad coordinate size line", lineno);
  } else {
    if (!(size_ss >> nrows >> ncols)) throw ParseError("bad array size line", lineno);
  }
  if (nrows < 0 || ncols < 0) throw ParseError("negative dimensions", lineno);

  std::vector<std::tuple<int, int, double>> triplets;
  if (h.coordinate) {
    if (nnz < 0) throw ParseError("negative entry count", lineno);
    triplets.reserve(static_cast<std::size_t>(h.symmetric ? 2 * nnz : nnz));
    for (long t = 0; t < nnz; ++t) {
      if (!data_line(in, line, lineno))
        throw ParseError("expected " + std::to_string(nnz) + " entries, file ended after " +
                             std::to_string(t),
                         lineno);
      std::istringstream ss(line);
      long i = 0, j = 0;
      std::string vtok;
      if (!(ss >> i >> j >> vtok)) throw ParseError("bad coordinate entry", lineno);
      const double v = parse_value(vtok, lineno);
      if (i < 1 || i > nrows || j < 1 || j > ncols)
        throw ParseError("coordinate out of range", lineno);
      triplets.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
      if (h.symmetric && i != j)
        triplets.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), v);
    }
  } else {
    if (h.symmetric && nrows != ncols)
      throw ParseError("symmetric array matrix must be square", lineno);
    // Array data is listed column-major; symmetric storage lists the lower
    // triangle of each column, diagonal included.
    triplets.reserve(static_cast<std::size_t>(nrows) * ncols);
    for (long j = 0; j < ncols; ++j) {
      for (long i = h.symmetric ? j : 0; i < nrows; ++i) {
        if (!data_line(in, line, lineno)) throw ParseError("array data ended early", lineno);
        std::istringstream ss(line);
        std::string vtok;
        if (!(ss >> vtok)) throw ParseError("bad array entry", lineno);
        const double v = parse_value(vtok, lineno);
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
        if (h.symmetric && i != j)
          triplets.emplace_back(static_cast<int>(j), static_cast<int>(i), v);
      }
    }
  }

  return CsrMatrix::from_triplets(static_cast<int>(nrows), static_cast<int>(ncols),
                                  std::move(triplets));
}

void write_matrix_market(const CsrMatrix& a, const std::string& path) {
  a.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.nrows << " " << a.ncols << " " << a.nnz() << "\n";
  char buf[64];
  for (int i = 0; i < a.nrows; ++i) {
    for (int t = a.row_offsets[i]; t < a.row_offsets[i + 1]; ++t) {
      std::snprintf(buf, sizeof buf, "%.17g", a.values[t]);
      out << (i + 1) << " " << (a.col_indices[t] + 1) << " " << buf << "\n";
    }
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace jbd
