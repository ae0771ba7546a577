#pragma once

// UCI Multiple Features ("mfeat") ingestion and the 100-per-digit split.
//
// Each mfeat file holds 2000 rows of whitespace-separated numbers with no
// label column; rows come in ten blocks of 200, digits 0..9 in order.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace coupled {

inline constexpr std::size_t kMfeatRows = 2000;
inline constexpr std::size_t kMfeatDigits = 10;
inline constexpr std::size_t kMfeatBlock = kMfeatRows / kMfeatDigits;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FeatureSet {
    std::string name;
    Matrix matrix;  // kMfeatRows x d

    std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix.cols()); }
};

// Features (n x d) with one class id per row; ids are 0..num_classes-1.
class LabeledDataset {
public:
    LabeledDataset(Matrix features, std::vector<int> labels);

    const Matrix& features() const noexcept { return features_; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }
    std::size_t num_classes() const noexcept { return num_classes_; }

    // Rows at `indices`, in that order.
    LabeledDataset subset(const std::vector<std::size_t>& indices) const;

private:
    Matrix features_;
    std::vector<int> labels_;
    std::size_t num_classes_;
};

// Reads one mfeat file. Throws ParseError naming the line and column of an
// unparseable token, a column-count mismatch, or a row-count shortfall.
FeatureSet load_feature_file(const std::filesystem::path& path, std::size_t expected_dim, std::string name = {});

// Attaches digit labels by row position (row / 200).
LabeledDataset label_by_block(const FeatureSet& fs);

struct ManifestEntry {
    std::string name;
    std::filesystem::path path;  // resolved against the manifest's directory
    std::size_t dim;
};

// Canonical feature-set names in table order, with their mfeat file names.
struct CanonicalFeature {
    const char* name;
    const char* file;
    std::size_t dim;
};
const std::vector<CanonicalFeature>& canonical_features();

// Manifest format, one key per line, '#' comments:
//   <name>.path = <file>
//   <name>.dim  = <integer>
// Entries keep the order in which their names first appear.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

enum class SplitMode { first_half, shuffle };

struct SplitSpec {
    SplitMode mode = SplitMode::first_half;
    std::uint64_t seed = 0;  // shuffle mode only
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Row indices for a 2000-row mfeat layout: within each 200-row digit block the
// first 100 (after an optional seeded permutation) train, the rest test.
SplitIndices split_indices(const SplitSpec& spec);

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, const SplitSpec& spec);

}  // namespace coupled
