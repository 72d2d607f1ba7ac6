#include "hormander/io.hpp"

#include <algorithm>
#include <string>

namespace hormander::io {

namespace {

[[noreturn]] void malformed(const std::string& msg) { throw Error(ErrorCode::MalformedInput, msg); }

std::string position(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

Json parse_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::string what = e.what();
    // Drop the library prefix "[json.exception.parse_error.101] parse error at ...: ".
    const auto colon = what.rfind(": ");
    if (colon != std::string::npos) what = what.substr(colon + 2);
    malformed("JSON syntax error at " + position(text, e.byte) + ": " + what);
  }
}

Matrix read_matrix(const Json& doc, const std::string& field, Eigen::Index rows, Eigen::Index cols) {
  const auto it = doc.find(field);
  if (it == doc.end()) malformed("missing field '" + field + "'");
  if (!it->is_array()) malformed("field '" + field + "' must be an array of rows");
  if (static_cast<Eigen::Index>(it->size()) != rows) {
    malformed("field '" + field + "' has " + std::to_string(it->size()) + " rows, expected " +
              std::to_string(rows));
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = (*it)[static_cast<std::size_t>(r)];
    const std::string where = "field '" + field + "' row " + std::to_string(r + 1);
    if (!row.is_array()) malformed(where + " must be an array");
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      malformed(where + " has " + std::to_string(row.size()) + " entries, expected " +
                std::to_string(cols));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& x = row[static_cast<std::size_t>(c)];
      if (!x.is_number()) {
        malformed(where + " column " + std::to_string(c + 1) + " is not a number");
      }
      m(r, c) = x.get<double>();
    }
  }
  return m;
}

}  // namespace

Json to_json(HalfInteger h) { return Json{{"doubled", h.doubled}}; }

Json to_json(const Inertia& in) {
  return Json{{"n_pos", in.n_pos}, {"n_neg", in.n_neg}, {"n_zero", in.n_zero}};
}

Json to_json(const IndexResult& r) {
  Json j;
  j["k"] = r.k;
  j["method"] = std::string(to_string(r.method));
  j["s"] = to_json(r.s);
  if (r.method != IndexMethod::PathDifference) j["inertia"] = to_json(r.inertia);
  return j;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json blocks_to_json(const ReturnMapBlocks& blocks) {
  Json j;
  j["n"] = blocks.n();
  j["A"] = matrix_to_json(blocks.a);
  j["B"] = matrix_to_json(blocks.b);
  j["C"] = matrix_to_json(blocks.c);
  j["D"] = matrix_to_json(blocks.d);
  return j;
}

ReturnMapBlocks blocks_from_json(const Json& doc) {
  if (!doc.is_object()) malformed("blocks document must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    static const char* known[] = {"v", "n", "A", "B", "C", "D", "Phi"};
    if (std::none_of(std::begin(known), std::end(known), [&](const char* k) { return key == k; })) {
      malformed("unknown field '" + key + "'");
    }
  }
  const auto n_it = doc.find("n");
  if (n_it == doc.end()) malformed("missing field 'n'");
  if (!n_it->is_number_integer() || n_it->get<long long>() < 1) {
    malformed("field 'n' must be a positive integer");
  }
  const Eigen::Index n = n_it->get<Eigen::Index>();
  const bool has_phi = doc.contains("Phi");
  const bool has_blocks = doc.contains("A") || doc.contains("B") || doc.contains("C") ||
                          doc.contains("D");
  if (has_phi && has_blocks) malformed("give either 'Phi' or 'A', 'B', 'C', 'D', not both");
  if (has_phi) return Blocks::split(read_matrix(doc, "Phi", 2 * n, 2 * n));
  return {read_matrix(doc, "A", n, n), read_matrix(doc, "B", n, n), read_matrix(doc, "C", n, n),
          read_matrix(doc, "D", n, n)};
}

ReturnMapBlocks parse_blocks(std::string_view text, double rel_tol) {
  const ReturnMapBlocks blocks = blocks_from_json(parse_text(text));
  const double scale = std::max(1.0, norm_inf(blocks.assemble()));
  const DarwinReport rep = validate_darwin(blocks, rel_tol * scale * scale);
  if (!rep.ok) {
    throw Error(ErrorCode::InvalidBlocks, std::string("blocks violate ") + rep.first_failure() +
                                              " (residual " + format_real(rep.max_residual()) +
                                              ", tolerance " + format_real(rep.tol) + ")");
  }
  return blocks;
}

Vector parse_vector(std::string_view text, std::string_view what) {
  const Json j = parse_text(text);
  if (!j.is_array()) malformed(std::string(what) + " must be a JSON array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      malformed(std::string(what) + " entry " + std::to_string(i + 1) + " is not a number");
    }
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

HalfInteger half_integer_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("doubled") || !j["doubled"].is_number_integer()) {
    malformed("half-integer must be an object {\"doubled\": int}");
  }
  return HalfInteger::from_doubled(j["doubled"].get<int>());
}

}  // namespace hormander::io
