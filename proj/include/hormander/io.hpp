#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hormander/darwin.hpp"
#include "hormander/index.hpp"
#include "hormander/linalg.hpp"

namespace hormander::io {

// Insertion-ordered so that emitted documents are byte-stable.
using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

Json to_json(HalfInteger h);
Json to_json(const Inertia& in);
Json to_json(const IndexResult& r);
Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);

/// {"n": n, "A": [[...]], "B": ..., "C": ..., "D": ...}, row-major.
Json blocks_to_json(const ReturnMapBlocks& blocks);

/// Accepts {"n", "A", "B", "C", "D"} or {"n", "Phi"}; an optional "v" key is
/// ignored. Throws MalformedInput naming the offending field, row and column.
ReturnMapBlocks blocks_from_json(const Json& doc);

/// Parses a blocks document and checks the block identities at
/// rel_tol * max(1, ||Phi||)^2. Syntax errors are reported with line and
/// column; failed identities raise InvalidBlocks.
ReturnMapBlocks parse_blocks(std::string_view text, double rel_tol = 1e-8);

/// A JSON array of numbers. Throws MalformedInput.
Vector parse_vector(std::string_view text, std::string_view what);

HalfInteger half_integer_from_json(const Json& j);

}  // namespace hormander::io
