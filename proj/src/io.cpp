#include "subdfo/io.hpp"

#include <fstream>
#include <sstream>

#include "subdfo/errors.hpp"

namespace subdfo::io {
namespace {

[[noreturn]] void malformed(std::string_view field, std::string_view what) {
  throw Error(ErrorKind::MalformedInput, "field '" + std::string(field) + "': " + std::string(what));
}

const Json& require(const Json& j, const char* field) {
  if (!j.is_object()) malformed(field, "document is not an object");
  auto it = j.find(field);
  if (it == j.end()) malformed(field, "missing");
  return *it;
}

Index require_count(const Json& j, const char* field) {
  const Json& v = require(j, field);
  if (!v.is_number_integer() || v.get<long long>() < 0) malformed(field, "expected a nonnegative integer");
  return static_cast<Index>(v.get<long long>());
}

double number(const Json& v, std::string_view field) {
  if (!v.is_number()) malformed(field, "expected a number");
  return v.get<double>();
}

void require_length(const Vector& v, Index n, std::string_view field) {
  if (v.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "field '" + std::string(field) + "' has length " +
                                                  std::to_string(v.size()) + ", expected " +
                                                  std::to_string(n));
  }
}

}  // namespace

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j, std::string_view field) {
  if (!j.is_array()) malformed(field, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = number(j[static_cast<std::size_t>(i)], field);
  return v;
}

Json rows_to_json(const Matrix& a) {
  Json out = Json::array();
  for (Index i = 0; i < a.rows(); ++i) out.push_back(vector_to_json(a.row(i).transpose()));
  return out;
}

Matrix rows_from_json(const Json& j, std::string_view field) {
  if (!j.is_array()) malformed(field, "expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  const Index cols = static_cast<Index>(j.front().is_array() ? j.front().size() : 0);
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(i)], field);
    if (row.size() != cols) malformed(field, "rows have different lengths");
    a.row(i) = row.transpose();
  }
  return a;
}

Json columns_to_json(const Matrix& a) { return rows_to_json(a.transpose()); }

Matrix columns_from_json(const Json& j, Index rows, std::string_view field) {
  if (!j.is_array()) malformed(field, "expected an array of vectors");
  Matrix a(rows, static_cast<Index>(j.size()));
  for (Index c = 0; c < a.cols(); ++c) {
    const Vector col = vector_from_json(j[static_cast<std::size_t>(c)], field);
    require_length(col, rows, field);
    a.col(c) = col;
  }
  return a;
}

Json to_json(const SampleSet& y) {
  Json out;
  out["n"] = y.dim();
  out["x0"] = vector_to_json(y.base());
  out["displacements"] = columns_to_json(y.displacements());
  out["values"] = vector_to_json(y.values());
  return out;
}

SampleSet sampleset_from_json(const Json& j) {
  const Index n = require_count(j, "n");
  Vector x0 = vector_from_json(require(j, "x0"), "x0");
  require_length(x0, n, "x0");
  Matrix d = columns_from_json(require(j, "displacements"), n, "displacements");
  Vector values = vector_from_json(require(j, "values"), "values");
  require_length(values, d.cols() + 1, "values");
  return SampleSet(std::move(x0), std::move(d), std::move(values));
}

Json to_json(const ModelResult& m) {
  Json out;
  out["kind"] = std::string(to_string(m.kind));
  out["n"] = m.model.dim();
  out["x0"] = vector_to_json(m.model.base);
  out["c"] = m.model.constant;
  out["g"] = vector_to_json(m.model.gradient);
  out["H"] = rows_to_json(m.model.hessian.matrix());
  out["gradient_representative"] = "minimum-norm";
  out["ambiguity_basis"] = columns_to_json(m.gradients.ambiguity_basis);
  if (m.reference_hessian) out["href"] = rows_to_json(m.reference_hessian->matrix());
  if (m.raw_hessian) out["H_raw"] = rows_to_json(*m.raw_hessian);
  return out;
}

ModelResult model_from_json(const Json& j) {
  const Json& kind = require(j, "kind");
  if (!kind.is_string()) malformed("kind", "expected a string");
  ModelResult out;
  out.kind = model_kind_from_string(kind.get<std::string>());
  const Index n = require_count(j, "n");
  out.model.base = vector_from_json(require(j, "x0"), "x0");
  require_length(out.model.base, n, "x0");
  out.model.constant = number(require(j, "c"), "c");
  out.model.gradient = vector_from_json(require(j, "g"), "g");
  require_length(out.model.gradient, n, "g");
  const Matrix h = n == 0 ? Matrix(0, 0) : rows_from_json(require(j, "H"), "H");
  if (h.rows() != n || h.cols() != n) malformed("H", "expected an n x n array of rows");
  out.model.hessian = SymMatrix::from_matrix(h);
  out.gradients.canonical = out.model.gradient;
  out.gradients.ambiguity_basis = Matrix(n, 0);
  if (auto it = j.find("ambiguity_basis"); it != j.end()) {
    out.gradients.ambiguity_basis = columns_from_json(*it, n, "ambiguity_basis");
  }
  if (auto it = j.find("href"); it != j.end()) {
    const Matrix href = rows_from_json(*it, "href");
    if (href.rows() != n || href.cols() != n) malformed("href", "expected an n x n array of rows");
    out.reference_hessian = SymMatrix::from_matrix(href);
  }
  if (auto it = j.find("H_raw"); it != j.end()) {
    Matrix raw = rows_from_json(*it, "H_raw");
    if (raw.rows() != n || raw.cols() != n) malformed("H_raw", "expected an n x n array of rows");
    out.raw_hessian = std::move(raw);
  }
  return out;
}

Json to_json(const DirectionBundle& b, const std::optional<Vector>& x0) {
  Json out;
  out["n"] = b.dim();
  if (x0) out["x0"] = vector_to_json(*x0);
  out["S"] = columns_to_json(b.s());
  if (b.is_shared()) {
    out["T"] = columns_to_json(b.t(0));
  } else {
    Json list = Json::array();
    for (const Matrix& t : b.t_list()) list.push_back(columns_to_json(t));
    out["T_list"] = std::move(list);
  }
  return out;
}

DirectionBundle bundle_from_json(const Json& j) {
  const Index n = require_count(j, "n");
  Matrix s = columns_from_json(require(j, "S"), n, "S");
  const bool has_t = j.contains("T");
  const bool has_list = j.contains("T_list");
  if (has_t == has_list) malformed("T", "exactly one of 'T' and 'T_list' is required");
  if (has_t) return DirectionBundle::shared(std::move(s), columns_from_json(j["T"], n, "T"));
  const Json& list = j["T_list"];
  if (!list.is_array()) malformed("T_list", "expected an array of direction sets");
  std::vector<Matrix> blocks;
  for (const Json& block : list) blocks.push_back(columns_from_json(block, n, "T_list"));
  return DirectionBundle::per_direction(std::move(s), std::move(blocks));
}

std::optional<Vector> bundle_base_from_json(const Json& j) {
  auto it = j.find("x0");
  if (it == j.end()) return std::nullopt;
  Vector x0 = vector_from_json(*it, "x0");
  require_length(x0, require_count(j, "n"), "x0");
  return x0;
}

Json to_json(const SubspaceFrame& f) {
  Json out;
  out["n"] = f.ambient();
  out["d"] = f.dim();
  out["x0"] = vector_to_json(f.base());
  out["Q"] = columns_to_json(f.q());
  out["hatted"] = columns_to_json(f.hatted());
  return out;
}

SubspaceFrame frame_from_json(const Json& j) {
  const Index n = require_count(j, "n");
  const Index d = require_count(j, "d");
  Vector x0 = vector_from_json(require(j, "x0"), "x0");
  require_length(x0, n, "x0");
  Matrix q = columns_from_json(require(j, "Q"), n, "Q");
  if (q.cols() != d) malformed("Q", "expected d columns");
  Matrix hatted = j.contains("hatted") ? columns_from_json(j["hatted"], d, "hatted") : Matrix(d, 0);
  return SubspaceFrame(OrthonormalBasis(std::move(q)), std::move(x0), std::move(hatted));
}

Json to_json(const ConversionReport& r) {
  Json out;
  out["gradient_gap"] = r.gradient_gap;
  out["hessian_gap"] = r.hessian_gap;
  out["subspace_value_gap"] = r.subspace_value_gap;
  out["orthogonal_value_gap"] = r.orthogonal_value_gap;
  out["axis_orthogonal_gap"] = r.axis_orthogonal_gap;
  out["correction_applied"] = r.correction_applied;
  out["value_scale"] = r.value_scale;
  out["seed"] = r.seed;
  out["probes"] = r.probes;
  out["scale"] = r.scale;
  return out;
}

SymMatrix symmetric_from_json(const Json& j) {
  if (j.is_array()) return SymMatrix::from_matrix(rows_from_json(j, "H"));
  if (j.is_object()) {
    if (j.contains("H")) return SymMatrix::from_matrix(rows_from_json(j["H"], "H"));
    if (j.contains("href")) return SymMatrix::from_matrix(rows_from_json(j["href"], "href"));
  }
  malformed("H", "expected a matrix or an object with an 'H' field");
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MalformedInput, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedInput, "'" + path.string() + "': " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::MalformedInput, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::MalformedInput, "write to '" + path.string() + "' failed");
}

}  // namespace subdfo::io
