#pragma once

#include "psfm/measure.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace psfm::io {

using Json = nlohmann::ordered_json;

/// Residual formatting for reports: 17 significant digits, as a string.
std::string decimal(double x);

/// {"dim": N, "entries": [[[re, im], ...], ...]}; a bare number is read as a
/// real entry. `where` prefixes error messages.
Matrix matrix_from_json(const Json& j, const std::string& where = "matrix");
Json matrix_to_json(const Matrix& m);

/// One row per line, 2N comma-separated values re0,im0,re1,im1,...
/// Blank lines and lines starting with '#' are skipped.
Matrix matrix_from_csv(const std::string& text, const std::string& where = "csv");

/// Reads a matrix file; ".csv" selects CSV, anything else JSON.
Matrix read_matrix(const std::string& path);

struct PsfmFile {
  DiscretePSFM measure;
  std::optional<std::vector<double>> alphas;
};

/// {"dim": N, "alphas": [...]?, "atoms": [{"label": "...", "form": <matrix>}]}.
/// With `validate`, a non-positive atom is an InputError naming the atom.
PsfmFile psfm_from_json(const Json& j, bool validate = true, double tol = kDefaultPsdTol,
                        const std::string& where = "psfm");
Json psfm_to_json(const DiscretePSFM& e, const std::optional<std::vector<double>>& alphas = {});
PsfmFile read_psfm(const std::string& path, bool validate = true, double tol = kDefaultPsdTol);

/// Parses JSON text; syntax errors become InputError with line and column.
Json parse_json(const std::string& text, const std::string& where);
std::string read_text(const std::string& path);

}  // namespace psfm::io
