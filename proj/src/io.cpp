#include "polyclt/io.hpp"
#include "polyclt/error.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <sstream>

namespace polyclt::io {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<double> parse_row(const std::string& line, const std::string& path) {
  std::vector<double> row;
  std::string item;
  std::stringstream in(line);
  while (std::getline(in, item, ',')) {
    std::stringstream field(item);
    double x = 0.0;
    std::string rest;
    if (!(field >> x) || (field >> rest)) {
      throw Error(ErrorCode::InvalidArgument, "'" + path + "': not a number: '" + item + "'");
    }
    row.push_back(x);
  }
  return row;
}

double number_or_inf(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::InvalidArgument, "unexpected string '" + s + "' in box");
  }
  return j.get<double>();
}

}  // namespace

json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i).transpose()));
  return rows;
}

Vector vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw Error(ErrorCode::DimensionMismatch, "ragged matrix rows");
    }
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

ConstraintSystem instance_from_json(const json& doc) {
  try {
    if (!doc.contains("b")) throw Error(ErrorCode::InvalidArgument, "instance needs \"b\"");
    Vector b = vector_from_json(doc.at("b"));
    Matrix a = doc.contains("A") ? matrix_from_json(doc.at("A")) : Matrix(b.size(), 0);
    if (a.rows() == 0) a.resize(b.size(), 0);
    if (doc.contains("blocks")) {
      std::vector<Vector> extra;
      for (const auto& block : doc.at("blocks")) {
        const Vector column = vector_from_json(block.at("column"));
        const int repeat = block.value("repeat", 1);
        if (column.size() != a.rows()) {
          throw Error(ErrorCode::DimensionMismatch, "block column length differs from m");
        }
        if (repeat < 0) throw Error(ErrorCode::InvalidArgument, "negative block repeat");
        for (int r = 0; r < repeat; ++r) extra.push_back(column);
      }
      const Eigen::Index base = a.cols();
      a.conservativeResize(Eigen::NoChange, base + static_cast<Eigen::Index>(extra.size()));
      for (std::size_t k = 0; k < extra.size(); ++k) a.col(base + k) = extra[k];
    }
    return ConstraintSystem(std::move(a), std::move(b));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed instance: ") + e.what());
  }
}

json instance_to_json(const ConstraintSystem& cs) {
  return {{"A", matrix_to_json(cs.a())}, {"b", vector_to_json(cs.b())}};
}

ConstraintSystem load_instance(const std::string& path, const std::string& rhs_path) {
  const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  if (is_json) return instance_from_json(load_json(path));
  if (rhs_path.empty()) {
    throw Error(ErrorCode::InvalidArgument, "CSV instances need the right-hand side via --rhs");
  }
  return ConstraintSystem(read_matrix_csv(path), read_vector(rhs_path));
}

json barycenter_to_json(const Barycenter& bc) {
  return {{"w", vector_to_json(bc.w)},
          {"lambda0", vector_to_json(bc.lambda0)},
          {"dual_value", bc.dual_value},
          {"residual", bc.centering_residual},
          {"gradient_norm", bc.gradient_norm},
          {"iterations", bc.iterations},
          {"converged", bc.converged},
          {"rescaled", bc.rescaled}};
}

Barycenter barycenter_from_json(const json& doc) {
  try {
    Barycenter bc;
    bc.w = vector_from_json(doc.at("w"));
    bc.lambda0 = vector_from_json(doc.at("lambda0"));
    bc.dual_value = doc.value("dual_value", 0.0);
    bc.centering_residual = doc.value("residual", 0.0);
    bc.gradient_norm = doc.value("gradient_norm", bc.centering_residual);
    bc.iterations = doc.value("iterations", 0);
    bc.converged = doc.value("converged", true);
    bc.rescaled = doc.value("rescaled", false);
    return bc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed barycenter: ") + e.what());
  }
}

Box box_from_json(const json& doc) {
  try {
    const auto& lo = doc.at("lo");
    const auto& hi = doc.at("hi");
    if (lo.size() != hi.size()) throw Error(ErrorCode::DimensionMismatch, "lo and hi differ in size");
    Box box{Vector(lo.size()), Vector(hi.size())};
    for (std::size_t j = 0; j < lo.size(); ++j) {
      box.lo[j] = number_or_inf(lo[j]);
      box.hi[j] = number_or_inf(hi[j]);
    }
    return box;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed box: ") + e.what());
  }
}

json box_to_json(const Box& box) {
  json lo = json::array(), hi = json::array();
  for (Eigen::Index j = 0; j < box.lo.size(); ++j) {
    lo.push_back(box.lo[j]);
    hi.push_back(std::isinf(box.hi[j]) ? json("inf") : json(box.hi[j]));
  }
  return {{"lo", lo}, {"hi", hi}};
}

json load_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, "'" + path + "': " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << text;
}

Vector read_vector(const std::string& path) {
  std::string text = read_file(path);
  for (char& c : text)
    if (c == ',' || c == ';') c = ' ';
  std::stringstream in(text);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "'" + path + "': not a number: '" + token + "'");
    }
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Matrix read_matrix_csv(const std::string& path) {
  std::stringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    rows.push_back(parse_row(line, path));
    if (rows.back().size() != rows.front().size()) {
      throw Error(ErrorCode::DimensionMismatch, "'" + path + "': ragged rows");
    }
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  return m;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string matrix_to_csv(const Matrix& m) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size()) * 24);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if (k) out += ',';
      out += format_double(m(i, k));
    }
    out += '\n';
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  const std::string data = read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidArgument, "SHA-256 failed for '" + path + "'");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

}  // namespace polyclt::io
