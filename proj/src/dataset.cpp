#include "coupled/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "coupled/error.hpp"

namespace coupled {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

// Unbiased draw from [0, bound) on a standardized engine; the std
// distributions are implementation-defined and would break reproducibility.
std::uint64_t draw_below(std::mt19937_64& engine, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
        v = engine();
    } while (v >= limit);
    return v % bound;
}

}  // namespace

LabeledDataset::LabeledDataset(Matrix features, std::vector<int> labels)
    : features_(std::move(features)), labels_(std::move(labels)), num_classes_(0) {
    if (static_cast<std::size_t>(features_.rows()) != labels_.size())
        throw DomainError("dataset: " + std::to_string(features_.rows()) + " rows for " +
                          std::to_string(labels_.size()) + " labels");
    for (int l : labels_) {
        if (l < 0) throw DomainError("dataset: negative class id");
        num_classes_ = std::max(num_classes_, static_cast<std::size_t>(l) + 1);
    }
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& indices) const {
    Matrix rows(static_cast<Eigen::Index>(indices.size()), features_.cols());
    std::vector<int> labels;
    labels.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= labels_.size()) throw DomainError("dataset: subset index out of range");
        rows.row(static_cast<Eigen::Index>(i)) = features_.row(static_cast<Eigen::Index>(indices[i]));
        labels.push_back(labels_[indices[i]]);
    }
    return LabeledDataset(std::move(rows), std::move(labels));
}

FeatureSet load_feature_file(const std::filesystem::path& path, std::size_t expected_dim, std::string name) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open feature file '" + path.string() + "'");
    if (expected_dim == 0) throw ParseError(path.string() + ": expected dimension must be positive");

    std::vector<double> values;
    values.reserve(kMfeatRows * expected_dim);
    std::string line;
    std::size_t line_no = 0, rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t pos = 0, cols = 0;
        while (true) {
            while (pos < line.size() && is_space(line[pos])) ++pos;
            if (pos >= line.size()) break;
            std::size_t end = pos;
            while (end < line.size() && !is_space(line[end])) ++end;
            double v = 0.0;
            const char* first = line.data() + pos;
            const char* last = line.data() + end;
            if (*first == '+') ++first;
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || ptr != last || !std::isfinite(v))
                throw ParseError(path.string() + ":" + std::to_string(line_no) + ":" + std::to_string(pos + 1) +
                                     ": cannot parse '" + line.substr(pos, end - pos) + "' as a number",
                                 line_no, pos + 1);
            ++cols;
            if (cols > expected_dim)
                throw ParseError(path.string() + ":" + std::to_string(line_no) + ": more than " +
                                     std::to_string(expected_dim) + " columns",
                                 line_no, pos + 1);
            values.push_back(v);
            pos = end;
        }
        if (cols == 0) continue;  // blank line
        if (cols != expected_dim)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                 std::to_string(expected_dim) + " columns, found " + std::to_string(cols),
                             line_no, 0);
        ++rows;
        if (rows > kMfeatRows)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": more than " +
                                 std::to_string(kMfeatRows) + " rows",
                             line_no, 0);
    }
    if (rows != kMfeatRows)
        throw ParseError(path.string() + ": expected " + std::to_string(kMfeatRows) + " rows, found " +
                             std::to_string(rows) + " (short by " + std::to_string(kMfeatRows - rows) + ")",
                         line_no, 0);

    FeatureSet fs;
    fs.name = name.empty() ? path.filename().string() : std::move(name);
    fs.matrix = Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(kMfeatRows),
                                         static_cast<Eigen::Index>(expected_dim));
    return fs;
}

LabeledDataset label_by_block(const FeatureSet& fs) {
    if (static_cast<std::size_t>(fs.matrix.rows()) != kMfeatRows)
        throw DomainError("feature set '" + fs.name + "' does not have " + std::to_string(kMfeatRows) + " rows");
    std::vector<int> labels(kMfeatRows);
    for (std::size_t i = 0; i < kMfeatRows; ++i) labels[i] = static_cast<int>(i / kMfeatBlock);
    return LabeledDataset(fs.matrix, std::move(labels));
}

const std::vector<CanonicalFeature>& canonical_features() {
    static const std::vector<CanonicalFeature> table{
        {"fourier", "mfeat-fou", 76},        {"profile-correlations", "mfeat-fac", 216},
        {"karhunen-loeve", "mfeat-kar", 64}, {"pixel", "mfeat-pix", 240},
        {"zernike", "mfeat-zer", 47},        {"morphological", "mfeat-mor", 6},
    };
    return table;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
    const std::filesystem::path base = path.parent_path();

    std::vector<std::string> order;
    std::map<std::string, std::string> paths;
    std::map<std::string, std::size_t> dims;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(line.substr(0, line.find('#')));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const auto dot = body.rfind('.', eq);
        if (eq == std::string::npos || dot == std::string::npos)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected '<name>.path = ...' or '<name>.dim = ...'",
                             line_no, 0);
        const std::string name = trim(body.substr(0, dot));
        const std::string key = trim(body.substr(dot + 1, eq - dot - 1));
        const std::string value = trim(body.substr(eq + 1));
        if (name.empty() || value.empty())
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": empty name or value", line_no, 0);
        if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
        if (key == "path") {
            paths[name] = value;
        } else if (key == "dim") {
            std::size_t d = 0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), d);
            if (ec != std::errc() || ptr != value.data() + value.size() || d == 0)
                throw ParseError(path.string() + ":" + std::to_string(line_no) + ": invalid dimension '" + value + "'",
                                 line_no, 0);
            dims[name] = d;
        } else {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": unknown key '" + key + "'", line_no, 0);
        }
    }
    std::vector<ManifestEntry> entries;
    for (const auto& name : order) {
        if (!paths.count(name) || !dims.count(name))
            throw ParseError(path.string() + ": feature set '" + name + "' needs both .path and .dim");
        std::filesystem::path p = paths[name];
        if (p.is_relative()) p = base / p;
        entries.push_back({name, p, dims[name]});
    }
    if (entries.empty()) throw ParseError(path.string() + ": manifest lists no feature sets");
    return entries;
}

SplitIndices split_indices(const SplitSpec& spec) {
    SplitIndices out;
    out.train.reserve(kMfeatRows / 2);
    out.test.reserve(kMfeatRows / 2);
    std::mt19937_64 engine(spec.seed);
    for (std::size_t digit = 0; digit < kMfeatDigits; ++digit) {
        std::vector<std::size_t> block(kMfeatBlock);
        for (std::size_t i = 0; i < kMfeatBlock; ++i) block[i] = digit * kMfeatBlock + i;
        if (spec.mode == SplitMode::shuffle) {
            for (std::size_t i = kMfeatBlock - 1; i > 0; --i) std::swap(block[i], block[draw_below(engine, i + 1)]);
        }
        out.train.insert(out.train.end(), block.begin(), block.begin() + kMfeatBlock / 2);
        out.test.insert(out.test.end(), block.begin() + kMfeatBlock / 2, block.end());
    }
    return out;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, const SplitSpec& spec) {
    if (ds.size() != kMfeatRows) throw DomainError("split: dataset must have " + std::to_string(kMfeatRows) + " rows");
    const SplitIndices idx = split_indices(spec);
    return {ds.subset(idx.train), ds.subset(idx.test)};
}

}  // namespace coupled
