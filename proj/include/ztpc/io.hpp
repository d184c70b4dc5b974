#pragma once

#include <filesystem>
#include <optional>

#include "ztpc/kruskal.hpp"
#include "ztpc/observation_set.hpp"
#include "ztpc/sparse.hpp"

namespace ztpc::io {

/// Text formats
/// ------------
/// Count tensor: one line per stored entry, N whitespace-separated 1-based
/// indices followed by an integer count. Observation set: the same minus the
/// count column. Lines starting with `#` are comments; this library writes a
/// `# dims: I_1 ... I_N` comment so files are self-describing, and the readers
/// honor it. Files without that header get their shape inferred from the
/// maximum index seen per mode (or taken from `expected_shape` if supplied).
/// Model: a single JSON document with fields `shape`, `rank`, `lambda`, and
/// `factors` (one row-major matrix, i.e. array of rows, per mode), written
/// with round-trip-exact decimal floats.

void write_counts(const SparseCountTensor& X, const std::filesystem::path& path);
[[nodiscard]] SparseCountTensor read_counts(const std::filesystem::path& path,
                                            std::optional<Shape> expected_shape = std::nullopt);

void write_observation_set(const ObservationSet& set, const std::filesystem::path& path);
[[nodiscard]] ObservationSet read_observation_set(
    const std::filesystem::path& path, std::optional<Shape> expected_shape = std::nullopt);

void write_model(const KruskalModel& model, const std::filesystem::path& path);
[[nodiscard]] KruskalModel read_model(const std::filesystem::path& path);

/// JSON-string forms of the model (de)serializer, for embedding models inside
/// larger documents. `indent` < 0 writes compact single-line JSON.
[[nodiscard]] std::string model_to_json(const KruskalModel& model, int indent = -1);
[[nodiscard]] KruskalModel model_from_json(const std::string& text);

}  // namespace ztpc::io
