#pragma once

// JSON documents for sample sets, models, direction bundles, frames and
// conversion reports. Reals are written in shortest round-trip form, so a
// write followed by a read reproduces every double bit for bit. Matrices are
// stored as arrays of rows except where a field holds a set of vectors
// (displacements, S, T, Q, ambiguity_basis), which are arrays of columns.

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "subdfo/interpolation.hpp"
#include "subdfo/sample_geometry.hpp"
#include "subdfo/simplex_calculus.hpp"
#include "subdfo/subspace_bridge.hpp"

namespace subdfo::io {

using Json = nlohmann::ordered_json;

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, std::string_view field);
Json rows_to_json(const Matrix& a);
Matrix rows_from_json(const Json& j, std::string_view field);
/// Columns of `a` as an array of arrays.
Json columns_to_json(const Matrix& a);
/// `rows` is needed to shape an empty column list.
Matrix columns_from_json(const Json& j, Index rows, std::string_view field);

Json to_json(const SampleSet& y);
SampleSet sampleset_from_json(const Json& j);

/// kind, n, x0, c, g, H, plus ambiguity_basis, href and H_raw when present.
Json to_json(const ModelResult& m);
ModelResult model_from_json(const Json& j);

/// n, S, and T or T_list; `x0` is written when given.
Json to_json(const DirectionBundle& b, const std::optional<Vector>& x0 = {});
DirectionBundle bundle_from_json(const Json& j);
std::optional<Vector> bundle_base_from_json(const Json& j);

Json to_json(const SubspaceFrame& f);
SubspaceFrame frame_from_json(const Json& j);

Json to_json(const ConversionReport& r);

/// Symmetric matrix from a bare array of rows or from an object with an
/// `H` (or `href`) field.
SymMatrix symmetric_from_json(const Json& j);

/// Parses a file; throws MalformedInput on I/O or syntax errors.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace subdfo::io
