#include "coupled/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "coupled/error.hpp"
#include "coupled/parallel.hpp"
#include "json.hpp"

namespace coupled {

namespace {

constexpr std::array<ModelKind, 3> kModelOrder{ModelKind::naive_bayes, ModelKind::coupled, ModelKind::multivariate};

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
    return buf;
}

ModelResult score_model(ModelKind kind, std::size_t dim, const std::vector<Posterior>& posteriors,
                        const LabeledDataset& test, const ExperimentConfig& config) {
    const TrueClassProbabilities truth = true_class_probabilities(posteriors, test.labels());
    ModelResult r;
    r.kind = kind;
    r.parameters = parameter_count(kind, dim);
    r.percent_correct = percent_correct(posteriors, test.labels());
    r.probability_accuracy = generalized_mean(truth, 0.0, config.probability_floor);
    r.probability_accuracy_unfloored = generalized_mean(truth, 0.0, 0.0);
    r.risk_profile = risk_profile(truth, config.risk_grid, config.probability_floor);
    return r;
}

const char* split_name(SplitMode m) { return m == SplitMode::shuffle ? "shuffle" : "first-half"; }

nlohmann::ordered_json config_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["manifest"] = c.manifest.string();
    j["split"] = split_name(c.split.mode);
    j["seed"] = c.split.seed;
    j["shrinkage"] = c.shrinkage;
    j["covariance_mode"] = c.covariance_mode == CovarianceMode::pooled ? "pooled" : "per_class";
    j["select_on"] = c.select_on == SelectOn::test ? "test" : "train";
    j["kappa_grid"] = c.kappa_grid;
    j["risk_grid"] = c.risk_grid;
    j["probability_floor"] = c.probability_floor;
    j["variance_floor"] = c.variance_floor;
    return j;
}

}  // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const ModelResult& FeatureResult::result(ModelKind kind) const {
    for (const auto& m : models)
        if (m.kind == kind) return m;
    throw DomainError("no result for model kind");
}

const FeatureResult& ExperimentReport::feature(const std::string& name) const {
    for (const auto& f : features)
        if (f.name == name) return f;
    throw DomainError("report has no feature set '" + name + "'");
}

std::vector<LoadedFeature> load_experiment_data(const std::filesystem::path& manifest, const SplitSpec& split_spec,
                                                unsigned threads) {
    const std::vector<ManifestEntry> entries = read_manifest(manifest);
    const SplitIndices idx = split_indices(split_spec);
    std::vector<std::optional<LoadedFeature>> slots(entries.size());
    parallel_for(entries.size(), threads, [&](std::size_t i) {
        const FeatureSet fs = load_feature_file(entries[i].path, entries[i].dim, entries[i].name);
        const LabeledDataset all = label_by_block(fs);
        slots[i].emplace(LoadedFeature{entries[i].name, all.subset(idx.train), all.subset(idx.test)});
    });
    std::vector<LoadedFeature> out;
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    const std::vector<LoadedFeature> data = load_experiment_data(config.manifest, config.split, config.threads);
    std::vector<std::optional<FeatureResult>> slots(data.size());
    parallel_for(data.size(), config.threads, [&](std::size_t i) {
        const LoadedFeature& f = data[i];
        const std::size_t d = f.train.dim();
        GaussianNBModel nb = fit_naive_bayes(f.train, config.variance_floor);
        const LabeledDataset& selection_data = config.select_on == SelectOn::test ? f.test : f.train;
        CouplingSelection sel = select_coupling(nb, selection_data, config.kappa_grid, config.probability_floor, 1);
        CoupledFusionModel coupled_model{nb, sel.kappa};
        MultivariateGaussianModel mv = fit_multivariate(f.train, config.shrinkage, config.covariance_mode);

        FeatureResult fr{f.name, d, std::move(sel), {}, {}};
        fr.fitted.emplace_back(std::move(nb));
        fr.fitted.emplace_back(std::move(coupled_model));
        fr.fitted.emplace_back(std::move(mv));
        for (std::size_t m = 0; m < kModelOrder.size(); ++m) {
            const auto posteriors = predict_all(fr.fitted[m], f.test.features());
            fr.models[m] = score_model(kModelOrder[m], d, posteriors, f.test, config);
        }
        slots[i].emplace(std::move(fr));
    });
    ExperimentReport report{config, {}};
    for (auto& s : slots) report.features.push_back(std::move(*s));
    return report;
}

std::vector<std::pair<std::string, CouplingSelection>> run_sweep(const ExperimentConfig& config) {
    const std::vector<LoadedFeature> data = load_experiment_data(config.manifest, config.split, config.threads);
    std::vector<std::pair<std::string, CouplingSelection>> out(data.size());
    parallel_for(data.size(), config.threads, [&](std::size_t i) {
        const GaussianNBModel nb = fit_naive_bayes(data[i].train, config.variance_floor);
        const LabeledDataset& sel = config.select_on == SelectOn::test ? data[i].test : data[i].train;
        out[i] = {data[i].name, select_coupling(nb, sel, config.kappa_grid, config.probability_floor, 1)};
    });
    return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<std::pair<std::string, CouplingSelection>>& sweeps) {
    out << "feature,kappa,score,selected\n";
    for (const auto& [name, sel] : sweeps)
        for (std::size_t g = 0; g < sel.grid.size(); ++g)
            out << name << ',' << format_real(sel.grid[g]) << ',' << format_real(sel.scores[g]) << ','
                << (sel.grid[g] == sel.kappa.value() ? 1 : 0) << '\n';
}

void write_profile_csv(std::ostream& out, const RiskProfile& profile) {
    out << "risk,accuracy\n";
    for (std::size_t i = 0; i < profile.grid.size(); ++i)
        out << format_real(profile.grid[i]) << ',' << format_real(profile.accuracy[i]) << '\n';
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "models", ec);
    if (ec) throw IoError("cannot create '" + (out_dir / "models").string() + "': " + ec.message());

    {
        const auto path = out_dir / "table1.csv";
        auto out = open_output(path);
        out << "feature,model,params,pct_correct,prob_accuracy\n";
        for (const auto& f : report.features)
            for (const auto& m : f.models)
                out << f.name << ',' << model_kind_name(m.kind) << ',' << m.parameters << ','
                    << percent(m.percent_correct) << ',' << percent(m.probability_accuracy) << '\n';
        close_output(out, path);
    }
    {
        const auto path = out_dir / "fig2.csv";
        auto out = open_output(path);
        out << "feature,model,params,prob_accuracy\n";
        for (const auto& f : report.features)
            for (const auto& m : f.models)
                out << f.name << ',' << model_kind_name(m.kind) << ',' << m.parameters << ','
                    << format_real(m.probability_accuracy) << '\n';
        close_output(out, path);
    }
    {
        const auto path = out_dir / "fig3a.csv";
        auto out = open_output(path);
        std::vector<std::pair<std::string, CouplingSelection>> sweeps;
        for (const auto& f : report.features) sweeps.emplace_back(f.name, f.selection);
        write_sweep_csv(out, sweeps);
        close_output(out, path);
    }
    for (const auto& f : report.features) {
        const auto path = out_dir / ("fig3b_" + f.name + ".csv");
        auto out = open_output(path);
        out << "risk";
        for (const auto& m : f.models) out << ',' << model_kind_name(m.kind);
        out << '\n';
        const auto& grid = f.models[0].risk_profile.grid;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out << format_real(grid[i]);
            for (const auto& m : f.models) out << ',' << format_real(m.risk_profile.accuracy[i]);
            out << '\n';
        }
        close_output(out, path);
    }
    for (const auto& f : report.features) {
        for (std::size_t m = 0; m < f.fitted.size(); ++m) {
            const auto path = out_dir / "models" / (f.name + "." + model_kind_name(f.models[m].kind) + ".model");
            save_model(path, f.fitted[m]);
        }
    }
    {
        nlohmann::ordered_json j;
        j["format"] = "coupled-report";
        j["version"] = 1;
        j["config"] = config_json(report.config);
        auto& features = j["features"] = nlohmann::ordered_json::array();
        for (const auto& f : report.features) {
            nlohmann::ordered_json fj;
            fj["name"] = f.name;
            fj["dim"] = f.dim;
            fj["selected_kappa"] = f.selection.kappa.value();
            fj["selection_score"] = f.selection.score;
            fj["sweep"] = {{"kappa", f.selection.grid}, {"score", f.selection.scores}};
            auto& models = fj["models"] = nlohmann::ordered_json::array();
            for (const auto& m : f.models) {
                models.push_back({{"model", model_kind_name(m.kind)},
                                  {"parameters", m.parameters},
                                  {"percent_correct", m.percent_correct},
                                  {"probability_accuracy", m.probability_accuracy},
                                  {"probability_accuracy_unfloored", m.probability_accuracy_unfloored},
                                  {"risk_profile", {{"risk", m.risk_profile.grid}, {"accuracy", m.risk_profile.accuracy}}}});
            }
            features.push_back(std::move(fj));
        }
        const auto path = out_dir / "report.json";
        auto out = open_output(path);
        out << j.dump(2) << '\n';
        close_output(out, path);
    }
    {
        const auto path = out_dir / "plots.gp";
        auto out = open_output(path);
        out << "# gnuplot script for the emitted CSV files\n"
               "set datafile separator ','\n"
               "set key autotitle columnhead\n"
               "set terminal pngcairo size 900,600\n\n"
               "set output 'fig3a.png'\n"
               "set xlabel 'coupling'\nset ylabel 'geometric mean of true-class probability'\n"
               "plot ";
        for (std::size_t i = 0; i < report.features.size(); ++i) {
            const auto& name = report.features[i].name;
            out << (i ? ", \\\n     " : "") << "'fig3a.csv' using ($1 eq '" << name << "' ? $2 : NaN):3 with lines title '"
                << name << "'";
        }
        out << "\n\nset xlabel 'risk bias'\nset ylabel 'generalized mean'\n";
        for (const auto& f : report.features) {
            out << "set output 'fig3b_" << f.name << ".png'\n"
                << "plot for [col=2:4] 'fig3b_" << f.name << ".csv' using 1:col with lines\n";
        }
        close_output(out, path);
    }
}

ScoredSamples read_probability_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open probability file '" + path.string() + "'");
    ScoredSamples out;
    std::string line;
    std::size_t line_no = 0, classes = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::vector<std::string> tokens;
        for (std::string t; ss >> t;) tokens.push_back(t);
        if (tokens.empty() || tokens[0][0] == '#') continue;
        auto where = [&] { return path.string() + ":" + std::to_string(line_no) + ": "; };
        if (tokens.size() < 3) throw ParseError(where() + "need a label and at least two probabilities", line_no, 0);
        int label = 0;
        std::vector<double> probs;
        try {
            std::size_t used = 0;
            label = std::stoi(tokens[0], &used);
            if (used != tokens[0].size()) throw std::invalid_argument("label");
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                probs.push_back(std::stod(tokens[i], &used));
                if (used != tokens[i].size()) throw std::invalid_argument("probability");
            }
        } catch (const std::exception&) {
            throw ParseError(where() + "unparseable token", line_no, 0);
        }
        if (classes == 0) classes = probs.size();
        if (probs.size() != classes) throw ParseError(where() + "inconsistent number of classes", line_no, 0);
        if (label < 0 || static_cast<std::size_t>(label) >= classes)
            throw ParseError(where() + "label outside the class range", line_no, 0);
        double total = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw ParseError(where() + "probabilities must be nonnegative", line_no, 0);
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-6) throw ParseError(where() + "probabilities do not sum to 1", line_no, 0);
        for (double& p : probs) p /= total;
        out.posteriors.emplace_back(std::move(probs));
        out.labels.push_back(label);
    }
    if (out.labels.empty()) throw ParseError(path.string() + ": no samples");
    return out;
}

}  // namespace coupled
