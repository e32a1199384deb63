#include "psfm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace psfm::io {
namespace {

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

double finite_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(where + ": value is not finite");
  return v;
}

Complex complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return finite_number(j, where);
  if (!j.is_array() || j.size() != 2) throw InputError(where + ": expected [re, im]");
  return {finite_number(j[0], where + "[0]"), finite_number(j[1], where + "[1]")};
}

}  // namespace

std::string decimal(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Matrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object with dim and entries");
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long>() < 0)
    throw InputError(where + ".dim: expected a nonnegative integer");
  if (!j.contains("entries") || !j["entries"].is_array())
    throw InputError(where + ".entries: expected an array of rows");
  const Index n = j["dim"].get<Index>();
  const Json& rows = j["entries"];
  if (static_cast<Index>(rows.size()) != n)
    throw InputError(where + ".entries: " + std::to_string(rows.size()) + " rows for dim " +
                     std::to_string(n));
  Matrix m(n, n);
  for (Index r = 0; r < n; ++r) {
    const std::string rw = where + ".entries[" + std::to_string(r) + "]";
    const Json& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n)
      throw InputError(rw + ": expected " + std::to_string(n) + " entries");
    for (Index c = 0; c < n; ++c)
      m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], rw + "[" + std::to_string(c) + "]");
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return Json{{"dim", m.rows()}, {"entries", std::move(rows)}};
}

Matrix matrix_from_csv(const std::string& text, const std::string& where) {
  std::vector<std::vector<Complex>> rows;
  std::vector<std::size_t> source_line;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#')
      continue;
    std::vector<double> values;
    std::size_t pos = 0;
    std::size_t field = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      ++field;
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v))
        throw InputError(where + ": line " + std::to_string(line_no) + ", column " +
                         std::to_string(pos + 1) + " (field " + std::to_string(field) +
                         "): '" + cell + "' is not a finite number");
      values.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (values.size() % 2 != 0)
      throw InputError(where + ": line " + std::to_string(line_no) +
                       ": odd number of values; expected interleaved re,im pairs");
    std::vector<Complex> row;
    for (std::size_t k = 0; k < values.size(); k += 2) row.emplace_back(values[k], values[k + 1]);
    rows.push_back(std::move(row));
    source_line.push_back(line_no);
  }
  const Index n = static_cast<Index>(rows.size());
  Matrix m(n, n);
  for (Index r = 0; r < n; ++r) {
    if (static_cast<Index>(rows[static_cast<std::size_t>(r)].size()) != n)
      throw InputError(where + ": line " + std::to_string(source_line[static_cast<std::size_t>(r)]) + " has " +
                       std::to_string(rows[static_cast<std::size_t>(r)].size()) +
                       " entries, expected " + std::to_string(n));
    for (Index c = 0; c < n; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return m;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Json parse_json(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw InputError(where + ": JSON syntax error at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + " (byte " + std::to_string(e.byte) + ")");
  }
}

Matrix read_matrix(const std::string& path) {
  const std::string text = read_text(path);
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
    return matrix_from_csv(text, path);
  return matrix_from_json(parse_json(text, path), path);
}

PsfmFile psfm_from_json(const Json& j, bool validate, double tol, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long>() < 0)
    throw InputError(where + ".dim: expected a nonnegative integer");
  if (!j.contains("atoms") || !j["atoms"].is_array())
    throw InputError(where + ".atoms: expected an array");
  const Index n = j["dim"].get<Index>();

  PsfmFile out;
  if (j.contains("alphas")) {
    if (!j["alphas"].is_array()) throw InputError(where + ".alphas: expected an array");
    std::vector<double> a;
    for (std::size_t k = 0; k < j["alphas"].size(); ++k)
      a.push_back(finite_number(j["alphas"][k], where + ".alphas[" + std::to_string(k) + "]"));
    out.alphas = std::move(a);
  }

  std::vector<Atom> atoms;
  for (std::size_t k = 0; k < j["atoms"].size(); ++k) {
    const std::string aw = where + ".atoms[" + std::to_string(k) + "]";
    const Json& a = j["atoms"][k];
    if (!a.is_object() || !a.contains("form")) throw InputError(aw + ": expected {label, form}");
    std::string label = "atom" + std::to_string(k);
    if (a.contains("label")) {
      if (!a["label"].is_string()) throw InputError(aw + ".label: expected a string");
      label = a["label"].get<std::string>();
    }
    Matrix m = matrix_from_json(a["form"], aw + ".form");
    if (m.rows() != n)
      throw InputError(aw + ".form: dim " + std::to_string(m.rows()) + " differs from " +
                       std::to_string(n));
    atoms.push_back({std::move(label), Form(std::move(m))});
  }
  out.measure = DiscretePSFM(n, std::move(atoms), validate, tol);
  return out;
}

Json psfm_to_json(const DiscretePSFM& e, const std::optional<std::vector<double>>& alphas) {
  Json j{{"dim", e.dim()}};
  if (alphas) j["alphas"] = *alphas;
  Json atoms = Json::array();
  for (const Atom& a : e.atoms()) atoms.push_back({{"label", a.label}, {"form", matrix_to_json(a.form.matrix())}});
  j["atoms"] = std::move(atoms);
  return j;
}

PsfmFile read_psfm(const std::string& path, bool validate, double tol) {
  return psfm_from_json(parse_json(read_text(path), path), validate, tol, path);
}

}  // namespace psfm::io
