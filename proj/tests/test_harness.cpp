#include <filesystem>
#include <fstream>
#include <sstream>

#include "coupled/error.hpp"
#include "coupled/harness.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace coupled;
using testsupport::Rng;
namespace fs = std::filesystem;

namespace {

// Writes an mfeat-style file: 2000 rows, digit c in rows [200c, 200c+200),
// feature j of digit c drawn from N(shift * c * (j + 1) / d, sd^2). With
// `repeat` every column is a copy of the first, which makes naive Bayes
// overconfident and pushes the selected coupling below zero.
void write_synthetic(const fs::path& path, std::size_t d, double shift, double sd, std::uint64_t seed,
                     bool repeat = false) {
    Rng rng(seed);
    std::ofstream out(path);
    out.precision(17);
    for (int row = 0; row < 2000; ++row) {
        const int c = row / 200;
        const double first = rng.normal(shift * c / static_cast<double>(d), sd);
        for (std::size_t j = 0; j < d; ++j)
            out << (j ? " " : "")
                << (repeat || j == 0 ? first : rng.normal(shift * c * static_cast<double>(j + 1) / static_cast<double>(d), sd));
        out << '\n';
    }
}

struct SyntheticSet {
    std::string name;
    std::size_t dim;
    double shift, sd;
    bool repeat = false;
};

fs::path write_manifest(const fs::path& dir, const std::vector<SyntheticSet>& sets) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream m(dir / "synthetic.manifest");
    std::uint64_t seed = 100;
    for (const auto& s : sets) {
        write_synthetic(dir / s.name, s.dim, s.shift, s.sd, ++seed, s.repeat);
        m << s.name << ".path = " << s.name << "\n" << s.name << ".dim = " << s.dim << "\n";
    }
    return dir / "synthetic.manifest";
}

std::vector<std::vector<double>> read_rows(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::vector<double>> rows;
    for (std::string line; std::getline(in, line);) {
        std::istringstream ss(line);
        rows.emplace_back();
        for (double v; ss >> v;) rows.back().push_back(v);
    }
    return rows;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::vector<SyntheticSet> kSix = {{"a", 3, 1.0, 1.5}, {"b", 2, 0.8, 2.0}, {"c", 4, 1.2, 1.5},
                                        {"d", 1, 1.0, 1.0}, {"e", 2, 0.5, 1.5}, {"f", 3, 0.9, 2.5}};

}  // namespace

TEST_CASE("end-to-end run reproduces brute-force posteriors") {
    const fs::path dir = fs::temp_directory_path() / "coupled_harness_e2e";
    const auto manifest = write_manifest(dir, {{"alpha", 2, 1.0, 1.5}, {"beta", 3, 0.7, 2.0, true}});
    ExperimentConfig config;
    config.manifest = manifest;
    const ExperimentReport report = run_experiment(config);
    REQUIRE(report.features.size() == 2);

    for (const auto& [name, dim] : std::vector<std::pair<std::string, std::size_t>>{{"alpha", 2}, {"beta", 3}}) {
        CAPTURE(name);
        const auto rows = read_rows(dir / name);
        REQUIRE(rows.size() == 2000);
        // Training statistics straight from the file: first 100 rows of each block.
        std::vector<std::vector<double>> means(10, std::vector<double>(dim, 0.0)), vars = means;
        for (int c = 0; c < 10; ++c)
            for (std::size_t j = 0; j < dim; ++j) {
                double s = 0.0, ss = 0.0;
                for (int i = 0; i < 100; ++i) s += rows[static_cast<std::size_t>(200 * c + i)][j];
                const double mu = s / 100.0;
                for (int i = 0; i < 100; ++i) {
                    const double e = rows[static_cast<std::size_t>(200 * c + i)][j] - mu;
                    ss += e * e;
                }
                means[static_cast<std::size_t>(c)][j] = mu;
                vars[static_cast<std::size_t>(c)][j] = ss / 99.0;
            }
        const std::vector<double> priors(10, 0.1);
        const auto& fr = report.feature(name);
        CHECK(fr.dim == dim);
        const double kappa = fr.selection.kappa.value();
        if (name == "beta") CHECK(kappa < 0.0);

        std::vector<double> truth_nb, truth_coupled;
        int correct_nb = 0, correct_coupled = 0;
        for (int c = 0; c < 10; ++c)
            for (int i = 100; i < 200; ++i) {
                const auto& x = rows[static_cast<std::size_t>(200 * c + i)];
                const auto want_nb = testsupport::oracle_coupled_posterior(means, vars, priors, x, 0.0);
                const auto want_cp = testsupport::oracle_coupled_posterior(means, vars, priors, x, kappa);
                Matrix xm(1, static_cast<Eigen::Index>(dim));
                for (std::size_t j = 0; j < dim; ++j) xm(0, static_cast<Eigen::Index>(j)) = x[j];
                const auto got_nb = predict_all(fr.fitted[0], xm)[0];
                const auto got_cp = predict_all(fr.fitted[1], xm)[0];
                for (std::size_t k = 0; k < 10; ++k) {
                    CHECK(testsupport::rel_close_scaled(got_nb[k], want_nb[k], 1e-9, 1e-300));
                    CHECK(testsupport::rel_close_scaled(got_cp[k], want_cp[k], 1e-9, 1e-300));
                }
                truth_nb.push_back(std::max(want_nb[static_cast<std::size_t>(c)], 1e-12));
                truth_coupled.push_back(std::max(want_cp[static_cast<std::size_t>(c)], 1e-12));
                correct_nb += static_cast<int>(std::max_element(want_nb.begin(), want_nb.end()) - want_nb.begin()) == c;
                correct_coupled += static_cast<int>(std::max_element(want_cp.begin(), want_cp.end()) - want_cp.begin()) == c;
            }
        auto geo = [](const std::vector<double>& p) {
            double s = 0.0;
            for (double v : p) s += std::log(v);
            return std::exp(s / static_cast<double>(p.size()));
        };
        CHECK(fr.result(ModelKind::naive_bayes).percent_correct == doctest::Approx(correct_nb / 1000.0));
        CHECK(fr.result(ModelKind::coupled).percent_correct == doctest::Approx(correct_coupled / 1000.0));
        CHECK(fr.result(ModelKind::naive_bayes).probability_accuracy == doctest::Approx(geo(truth_nb)).epsilon(1e-9));
        CHECK(fr.result(ModelKind::coupled).probability_accuracy == doctest::Approx(geo(truth_coupled)).epsilon(1e-9));
        CHECK(fr.result(ModelKind::coupled).parameters == static_cast<long long>(2 * dim + 1));
    }
}

TEST_CASE("emit_report") {
    const fs::path dir = fs::temp_directory_path() / "coupled_harness_emit";
    const auto manifest = write_manifest(dir / "data", kSix);
    ExperimentConfig config;
    config.manifest = manifest;
    config.threads = 1;
    const ExperimentReport serial = run_experiment(config);
    emit_report(serial, dir / "out1");
    config.threads = 4;
    emit_report(run_experiment(config), dir / "out2");
    emit_report(run_experiment(config), dir / "out3");

    SUBCASE("table1 has one row per feature set and model") {
        std::ifstream in(dir / "out1" / "table1.csv");
        std::string header, line;
        std::getline(in, header);
        CHECK(header == "feature,model,params,pct_correct,prob_accuracy");
        int rows = 0;
        while (std::getline(in, line)) ++rows;
        CHECK(rows == 18);
    }
    SUBCASE("outputs are byte-identical across runs and thread counts") {
        std::vector<std::string> names = {"table1.csv", "fig2.csv", "fig3a.csv", "report.json", "plots.gp"};
        for (const auto& s : kSix) {
            names.push_back("fig3b_" + s.name + ".csv");
            for (const char* kind : {"naive_bayes", "coupled", "multivariate"})
                names.push_back("models/" + s.name + "." + kind + ".model");
        }
        for (const auto& n : names) {
            CAPTURE(n);
            const std::string a = slurp(dir / "out1" / n);
            CHECK(!a.empty());
            CHECK(a == slurp(dir / "out2" / n));
            CHECK(a == slurp(dir / "out3" / n));
        }
    }
    SUBCASE("risk profile columns are nondecreasing") {
        for (const auto& s : kSix) {
            std::ifstream in(dir / "out1" / ("fig3b_" + s.name + ".csv"));
            std::string line;
            std::getline(in, line);
            CHECK(line == "risk,naive_bayes,coupled,multivariate");
            std::vector<double> prev(4, -1e300);
            while (std::getline(in, line)) {
                std::istringstream ss(line);
                std::string cell;
                for (std::size_t k = 0; std::getline(ss, cell, ','); ++k) {
                    const double v = std::stod(cell);
                    CHECK(v >= prev[k]);
                    prev[k] = v;
                }
            }
        }
    }
    SUBCASE("accuracies recompute from the serialized models") {
        const auto data = load_experiment_data(manifest, config.split);
        for (std::size_t f = 0; f < data.size(); ++f) {
            for (const auto& m : serial.features[f].models) {
                const auto model = load_model(dir / "out1" / "models" /
                                              (data[f].name + "." + model_kind_name(m.kind) + ".model"));
                CHECK(kind_of(model) == m.kind);
                const auto posts = predict_all(model, data[f].test.features());
                const auto truth = true_class_probabilities(posts, data[f].test.labels());
                CHECK(percent_correct(posts, data[f].test.labels()) == m.percent_correct);
                CHECK(generalized_mean(truth, 0.0, config.probability_floor) == m.probability_accuracy);
            }
        }
    }
    SUBCASE("report.json records the configuration") {
        const std::string json = slurp(dir / "out1" / "report.json");
        CHECK(json.find("\"shrinkage\": 0.1") != std::string::npos);
        CHECK(json.find("\"split\": \"first-half\"") != std::string::npos);
        CHECK(json.find("threads") == std::string::npos);
    }
}

TEST_CASE("run_experiment surfaces load failures") {
    const fs::path dir = fs::temp_directory_path() / "coupled_harness_fail";
    const auto manifest = write_manifest(dir, {{"alpha", 2, 1.0, 1.5}});
    {
        std::ofstream m(manifest, std::ios::app);
        m << "ghost.path = nowhere\nghost.dim = 4\n";
    }
    ExperimentConfig config;
    config.manifest = manifest;
    CHECK_THROWS_AS(run_experiment(config), IoError);
    config.manifest = dir / "absent.manifest";
    CHECK_THROWS_AS(run_experiment(config), IoError);
}

TEST_CASE("read_probability_file") {
    const fs::path dir = fs::temp_directory_path() / "coupled_harness_probs";
    fs::create_directories(dir);
    auto write = [&](const std::string& text) {
        std::ofstream(dir / "p.txt") << text;
        return dir / "p.txt";
    };
    CHECK_THROWS_AS(read_probability_file(write("0 0.5 0.5\n2 0 0 1\n")), ParseError);

    const auto ok = read_probability_file(write("# header\n0 0.5 0.5\n1 0.2 0.8000001\n\n1 0 1\n"));
    REQUIRE(ok.labels.size() == 3);
    CHECK(ok.labels[1] == 1);
    CHECK(ok.posteriors[1][1] == doctest::Approx(0.8000001 / 1.0000001));
    CHECK(ok.posteriors[2][0] == 0.0);

    CHECK_THROWS_AS(read_probability_file(write("0 0.5 0.6\n")), ParseError);
    CHECK_THROWS_AS(read_probability_file(write("0 -0.5 1.5\n")), ParseError);
    CHECK_THROWS_AS(read_probability_file(write("3 0.5 0.5\n")), ParseError);
    CHECK_THROWS_AS(read_probability_file(write("x 0.5 0.5\n")), ParseError);
    CHECK_THROWS_AS(read_probability_file(write("# nothing\n")), ParseError);
    CHECK_THROWS_AS(read_probability_file(dir / "missing.txt"), IoError);
}
