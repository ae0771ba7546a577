#pragma once

// End-to-end experiment: fit naive Bayes, coupled fusion and multivariate
// Gaussian models on every feature set of a manifest, choose the coupling on
// a grid, score everything on the held-out half, and write the tables.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "coupled/classifiers.hpp"
#include "coupled/dataset.hpp"
#include "coupled/metrics.hpp"
#include "coupled/model_io.hpp"

namespace coupled {

enum class SelectOn { train, test };

struct ExperimentConfig {
    std::filesystem::path manifest;
    SplitSpec split;
    double shrinkage = kDefaultShrinkage;
    CovarianceMode covariance_mode = CovarianceMode::per_class;
    SelectOn select_on = SelectOn::train;
    std::vector<double> kappa_grid = default_kappa_grid();
    std::vector<double> risk_grid = default_risk_grid();
    double probability_floor = kDefaultProbabilityFloor;
    double variance_floor = kDefaultVarianceFloor;
    // Worker threads; results are identical for every value.
    unsigned threads = 1;
};

struct ModelResult {
    ModelKind kind;
    long long parameters;
    double percent_correct;          // fraction in [0, 1]
    double probability_accuracy;     // floored geometric mean of true-class posteriors
    double probability_accuracy_unfloored;
    RiskProfile risk_profile;
};

struct FeatureResult {
    std::string name;
    std::size_t dim;
    CouplingSelection selection;
    std::array<ModelResult, 3> models;  // naive_bayes, coupled, multivariate
    std::vector<AnyModel> fitted;       // same order as models

    const ModelResult& result(ModelKind kind) const;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<FeatureResult> features;  // manifest order

    const FeatureResult& feature(const std::string& name) const;
};

struct LoadedFeature {
    std::string name;
    LabeledDataset train;
    LabeledDataset test;
};

// Loads every manifest entry and applies the one split to all of them.
std::vector<LoadedFeature> load_experiment_data(const std::filesystem::path& manifest, const SplitSpec& split,
                                                unsigned threads = 1);

ExperimentReport run_experiment(const ExperimentConfig& config);

// Coupling selection only, per feature set in manifest order.
std::vector<std::pair<std::string, CouplingSelection>> run_sweep(const ExperimentConfig& config);

// Writes table1.csv, fig2.csv, fig3a.csv, fig3b_<feature>.csv, report.json,
// plots.gp and models/<feature>.<kind>.model under `out_dir`.
void emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir);

void write_sweep_csv(std::ostream& out, const std::vector<std::pair<std::string, CouplingSelection>>& sweeps);
void write_profile_csv(std::ostream& out, const RiskProfile& profile);

// External probability file: one sample per line, the true label followed by
// the class probabilities. Rows are renormalized if they sum to 1 within 1e-6.
struct ScoredSamples {
    std::vector<Posterior> posteriors;
    std::vector<int> labels;
};
ScoredSamples read_probability_file(const std::filesystem::path& path);

// Locale-independent "%.17g".
std::string format_real(double v);

}  // namespace coupled
