#pragma once

#include "polyclt/constraint_model.hpp"
#include "polyclt/entropy_center.hpp"
#include "polyclt/fourier.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace polyclt::io {

using nlohmann::json;

/// Instance JSON: {"A": [[...]], "b": [...], "blocks": [{"column": [...], "repeat": k}]}.
/// Block columns are appended after the columns of A; "A" may be omitted when
/// blocks are given.
ConstraintSystem instance_from_json(const json& doc);
json instance_to_json(const ConstraintSystem& cs);

/// JSON by extension, otherwise a headerless CSV matrix with b from rhs_path.
ConstraintSystem load_instance(const std::string& path, const std::string& rhs_path = "");

json barycenter_to_json(const Barycenter& bc);
Barycenter barycenter_from_json(const json& doc);

/// box.json: {"lo": [...], "hi": [...]}, where the string "inf" means +infinity.
Box box_from_json(const json& doc);
json box_to_json(const Box& box);

json load_json(const std::string& path);
/// Writes `text` to `path`, or to stdout when path is empty or "-".
void write_text(const std::string& path, const std::string& text);

/// Every number in the file, separated by commas, whitespace or newlines.
Vector read_vector(const std::string& path);
/// One row per nonempty line, comma separated.
Matrix read_matrix_csv(const std::string& path);
/// %.17g, one row per line.
std::string matrix_to_csv(const Matrix& m);
std::string format_double(double x);

/// Lowercase hex SHA-256 of the file contents.
std::string sha256_file(const std::string& path);

json vector_to_json(const Vector& v);
json matrix_to_json(const Matrix& m);
Vector vector_from_json(const json& j);
Matrix matrix_from_json(const json& j);

}  // namespace polyclt::io
