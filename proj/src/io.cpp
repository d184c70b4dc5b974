#include "ztpc/io.hpp"

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ztpc/errors.hpp"

namespace ztpc::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::filesystem::path& path, size_t line_no, const std::string& why) {
    throw data_error(path.string() + ":" + std::to_string(line_no) + ": " + why);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open for reading: " + path.string());
    return in;
}

// Splits a line into whitespace-separated int64 fields.
std::vector<index_t> parse_fields(std::string_view line, const std::filesystem::path& path,
                                  size_t line_no) {
    std::vector<index_t> fields;
    size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r'))
            ++pos;
        if (pos >= line.size()) break;
        size_t end = pos;
        while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r')
            ++end;
        index_t value = 0;
        auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, value);
        if (ec != std::errc() || ptr != line.data() + end)
            fail(path, line_no, "expected an integer, got '" + std::string(line.substr(pos, end - pos)) + "'");
        fields.push_back(value);
        pos = end;
    }
    return fields;
}

struct ParsedIndexFile {
    std::optional<Shape> declared_shape;        // from a "# dims:" header
    std::vector<std::vector<index_t>> rows;     // 0-based multi-indices
    std::vector<index_t> trailing;              // last column when values_expected
};

// Shared reader for the count and observation-set formats. Indices in files
// are 1-based; they are converted to 0-based here.
ParsedIndexFile parse_index_file(const std::filesystem::path& path, bool values_expected) {
    auto in = open_in(path);
    ParsedIndexFile parsed;
    std::string line;
    size_t line_no = 0;
    size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        while (!view.empty() && (view.front() == ' ' || view.front() == '\t')) view.remove_prefix(1);
        if (view.empty() || view == "\r") continue;
        if (view.front() == '#') {
            std::string_view rest(view.substr(1));
            size_t mark = rest.find("dims:");
            if (mark != std::string_view::npos && !parsed.declared_shape) {
                auto dims = parse_fields(rest.substr(mark + 5), path, line_no);
                if (dims.empty()) fail(path, line_no, "empty dims header");
                parsed.declared_shape = Shape(dims);
            }
            continue;
        }
        auto fields = parse_fields(view, path, line_no);
        const size_t expected_min = values_expected ? 2 : 1;
        if (fields.size() < expected_min) fail(path, line_no, "too few columns");
        if (width == 0)
            width = fields.size();
        else if (fields.size() != width)
            fail(path, line_no, "inconsistent column count (expected " + std::to_string(width) + ")");
        index_t trailing = 0;
        if (values_expected) {
            trailing = fields.back();
            fields.pop_back();
        }
        for (size_t n = 0; n < fields.size(); ++n) {
            if (fields[n] < 1) fail(path, line_no, "indices are 1-based; got " + std::to_string(fields[n]));
            --fields[n];
        }
        parsed.rows.push_back(std::move(fields));
        if (values_expected) parsed.trailing.push_back(trailing);
    }
    return parsed;
}

// Resolves the shape of a parsed file: explicit expectation wins (validated
// against any header), then the header, then per-mode maxima.
Shape resolve_shape(const ParsedIndexFile& parsed, const std::optional<Shape>& expected,
                    const std::filesystem::path& path) {
    if (expected && parsed.declared_shape && *expected != *parsed.declared_shape)
        throw data_error(path.string() + ": dims header disagrees with the expected shape");
    if (expected) return *expected;
    if (parsed.declared_shape) return *parsed.declared_shape;
    if (parsed.rows.empty())
        throw data_error(path.string() + ": no dims header and no entries; shape is unknowable");
    std::vector<index_t> dims(parsed.rows.front().size(), 1);
    for (const auto& row : parsed.rows) {
        if (row.size() != dims.size())
            throw data_error(path.string() + ": inconsistent index order across lines");
        for (size_t n = 0; n < dims.size(); ++n) dims[n] = std::max(dims[n], row[n] + 1);
    }
    return Shape(dims);
}

void check_order(const Shape& shape, const ParsedIndexFile& parsed,
                 const std::filesystem::path& path) {
    for (const auto& row : parsed.rows)
        if (static_cast<int>(row.size()) != shape.order())
            throw data_error(path.string() + ": index order does not match shape order " +
                             std::to_string(shape.order()));
}

void write_dims_header(std::ofstream& out, const Shape& shape) {
    out << "# dims:";
    for (index_t e : shape.extents()) out << ' ' << e;
    out << '\n';
}

json matrix_to_json(const FactorMatrix& A) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index r = 0; r < A.cols(); ++r) row.push_back(A(i, r));
        rows.push_back(std::move(row));
    }
    return rows;
}

json model_to_json_value(const KruskalModel& model) {
    json doc;
    doc["shape"] = model.shape().extents();
    doc["rank"] = model.rank();
    json lambda = json::array();
    for (int r = 0; r < model.rank(); ++r) lambda.push_back(model.weights()[r]);
    doc["lambda"] = std::move(lambda);
    json factors = json::array();
    for (int n = 0; n < model.shape().order(); ++n) factors.push_back(matrix_to_json(model.factor(n)));
    doc["factors"] = std::move(factors);
    return doc;
}

KruskalModel model_from_json_value(const json& doc, const std::string& origin) {
    try {
        Shape shape(doc.at("shape").get<std::vector<index_t>>());
        const int rank = doc.at("rank").get<int>();
        auto lambda_values = doc.at("lambda").get<std::vector<double>>();
        if (static_cast<int>(lambda_values.size()) != rank)
            throw data_error(origin + ": lambda length does not match rank");
        Eigen::VectorXd weights(rank);
        for (int r = 0; r < rank; ++r) weights[r] = lambda_values[static_cast<size_t>(r)];
        const json& factor_docs = doc.at("factors");
        if (static_cast<int>(factor_docs.size()) != shape.order())
            throw data_error(origin + ": expected one factor per mode");
        std::vector<FactorMatrix> factors;
        for (int n = 0; n < shape.order(); ++n) {
            const json& rows = factor_docs.at(static_cast<size_t>(n));
            FactorMatrix A(shape.extent(n), rank);
            if (static_cast<index_t>(rows.size()) != shape.extent(n))
                throw data_error(origin + ": factor " + std::to_string(n) + " row count mismatch");
            for (index_t i = 0; i < shape.extent(n); ++i) {
                const json& row = rows.at(static_cast<size_t>(i));
                if (static_cast<int>(row.size()) != rank)
                    throw data_error(origin + ": factor " + std::to_string(n) + " column count mismatch");
                for (int r = 0; r < rank; ++r) A(i, r) = row.at(static_cast<size_t>(r)).get<double>();
            }
            factors.push_back(std::move(A));
        }
        return KruskalModel(std::move(shape), std::move(weights), std::move(factors));
    } catch (const json::exception& e) {
        throw data_error(origin + ": malformed model JSON: " + e.what());
    } catch (const contract_error& e) {
        // Values that parse but violate model invariants (negative weights,
        // non-finite entries) are still malformed input, not caller bugs.
        throw data_error(origin + ": " + e.what());
    }
}

}  // namespace

void write_counts(const SparseCountTensor& X, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_dims_header(out, X.shape());
    std::vector<index_t> idx(static_cast<size_t>(X.shape().order()));
    for (index_t k = 0; k < X.nnz(); ++k) {
        X.shape().delinearize(X.linear_indices()[static_cast<size_t>(k)], idx);
        for (index_t coordinate : idx) out << coordinate + 1 << ' ';
        out << X.counts()[static_cast<size_t>(k)] << '\n';
    }
    if (!out) throw data_error("write failed: " + path.string());
}

SparseCountTensor read_counts(const std::filesystem::path& path,
                              std::optional<Shape> expected_shape) {
    auto parsed = parse_index_file(path, /*values_expected=*/true);
    Shape shape = resolve_shape(parsed, expected_shape, path);
    check_order(shape, parsed, path);
    std::vector<index_t> linear;
    linear.reserve(parsed.rows.size());
    try {
        for (const auto& row : parsed.rows) linear.push_back(shape.linearize(row));
        return SparseCountTensor::from_linear(std::move(shape), std::move(linear),
                                              std::move(parsed.trailing));
    } catch (const contract_error& e) {
        throw data_error(path.string() + ": " + e.what());
    }
}

void write_observation_set(const ObservationSet& set, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_dims_header(out, set.shape());
    std::vector<index_t> idx(static_cast<size_t>(set.shape().order()));
    for (index_t k = 0; k < set.size(); ++k) {
        set.shape().delinearize(set.index_at(k), idx);
        for (size_t n = 0; n < idx.size(); ++n) out << idx[n] + 1 << (n + 1 < idx.size() ? ' ' : '\n');
    }
    if (!out) throw data_error("write failed: " + path.string());
}

ObservationSet read_observation_set(const std::filesystem::path& path,
                                    std::optional<Shape> expected_shape) {
    auto parsed = parse_index_file(path, /*values_expected=*/false);
    Shape shape = resolve_shape(parsed, expected_shape, path);
    check_order(shape, parsed, path);
    std::vector<index_t> linear;
    linear.reserve(parsed.rows.size());
    try {
        for (const auto& row : parsed.rows) linear.push_back(shape.linearize(row));
        return ObservationSet::from_indices(std::move(shape), std::move(linear));
    } catch (const contract_error& e) {
        throw data_error(path.string() + ": " + e.what());
    }
}

void write_model(const KruskalModel& model, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << model_to_json_value(model).dump(2) << '\n';
    if (!out) throw data_error("write failed: " + path.string());
}

KruskalModel read_model(const std::filesystem::path& path) {
    auto in = open_in(path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw data_error(path.string() + ": invalid JSON: " + e.what());
    }
    return model_from_json_value(doc, path.string());
}

std::string model_to_json(const KruskalModel& model, int indent) {
    return model_to_json_value(model).dump(indent);
}

KruskalModel model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw data_error(std::string("invalid model JSON: ") + e.what());
    }
    return model_from_json_value(doc, "<string>");
}

}  // namespace ztpc::io
