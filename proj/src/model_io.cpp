#include "coupled/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "coupled/error.hpp"

namespace coupled {

namespace {

constexpr int kFormatVersion = 1;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_row(std::ostream& out, const char* key, std::size_t c, const auto& row) {
    out << key << ' ' << c;
    for (Eigen::Index j = 0; j < row.size(); ++j) out << ' ' << fmt(row(j));
    out << '\n';
}

void write_header(std::ostream& out, ModelKind kind, std::size_t classes, std::size_t d) {
    out << "coupled-model " << kFormatVersion << '\n'
        << "kind " << model_kind_name(kind) << '\n'
        << "classes " << classes << '\n'
        << "features " << d << '\n';
}

void write_nb_body(std::ostream& out, const GaussianNBModel& m) {
    for (std::size_t c = 0; c < m.num_classes(); ++c)
        out << "prior " << c << ' ' << fmt(m.priors()[static_cast<Eigen::Index>(c)]) << '\n';
    for (std::size_t c = 0; c < m.num_classes(); ++c) write_row(out, "mean", c, m.means().row(static_cast<Eigen::Index>(c)));
    for (std::size_t c = 0; c < m.num_classes(); ++c)
        write_row(out, "variance", c, m.variances().row(static_cast<Eigen::Index>(c)));
}

// Tokenized line with its number, for error messages.
struct Line {
    std::size_t number;
    std::vector<std::string> tokens;
};

class Reader {
public:
    explicit Reader(std::istream& in) {
        std::string text;
        std::size_t n = 0;
        while (std::getline(in, text)) {
            ++n;
            std::istringstream ss(text);
            Line line{n, {}};
            for (std::string tok; ss >> tok;) line.tokens.push_back(tok);
            if (!line.tokens.empty()) lines_.push_back(std::move(line));
        }
    }

    const Line& next(const char* expected) {
        if (pos_ >= lines_.size()) throw ParseError(std::string("model file ended before '") + expected + "'");
        const Line& l = lines_[pos_++];
        if (l.tokens.front() != expected)
            throw ParseError("model file line " + std::to_string(l.number) + ": expected '" + expected + "', found '" +
                                 l.tokens.front() + "'",
                             l.number, 1);
        return l;
    }

    bool done() const { return pos_ >= lines_.size(); }

private:
    std::vector<Line> lines_;
    std::size_t pos_ = 0;
};

double to_double(const Line& l, std::size_t i) {
    if (i >= l.tokens.size()) throw ParseError("model file line " + std::to_string(l.number) + ": missing value", l.number, 0);
    const std::string& t = l.tokens[i];
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ParseError("model file line " + std::to_string(l.number) + ": bad number '" + t + "'", l.number, 0);
    return v;
}

std::size_t to_size(const Line& l, std::size_t i) {
    const double v = to_double(l, i);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
        throw ParseError("model file line " + std::to_string(l.number) + ": expected a nonnegative integer", l.number, 0);
    return static_cast<std::size_t>(v);
}

void expect_index(const Line& l, std::size_t want) {
    if (to_size(l, 1) != want)
        throw ParseError("model file line " + std::to_string(l.number) + ": expected index " + std::to_string(want),
                         l.number, 0);
}

void read_rows(Reader& r, const char* key, Matrix& m) {
    for (Eigen::Index c = 0; c < m.rows(); ++c) {
        const Line& l = r.next(key);
        expect_index(l, static_cast<std::size_t>(c));
        if (l.tokens.size() != static_cast<std::size_t>(m.cols()) + 2)
            throw ParseError("model file line " + std::to_string(l.number) + ": wrong number of values", l.number, 0);
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(c, j) = to_double(l, static_cast<std::size_t>(j) + 2);
    }
}

}  // namespace

ModelKind kind_of(const AnyModel& model) {
    if (std::holds_alternative<GaussianNBModel>(model)) return ModelKind::naive_bayes;
    if (std::holds_alternative<CoupledFusionModel>(model)) return ModelKind::coupled;
    return ModelKind::multivariate;
}

void write_model(std::ostream& out, const AnyModel& model) {
    if (const auto* nb = std::get_if<GaussianNBModel>(&model)) {
        write_header(out, ModelKind::naive_bayes, nb->num_classes(), nb->dim());
        out << "variance_floor " << fmt(nb->variance_floor()) << '\n';
        write_nb_body(out, *nb);
    } else if (const auto* cf = std::get_if<CoupledFusionModel>(&model)) {
        write_header(out, ModelKind::coupled, cf->base.num_classes(), cf->base.dim());
        out << "variance_floor " << fmt(cf->base.variance_floor()) << '\n';
        out << "kappa " << fmt(cf->kappa.value()) << '\n';
        write_nb_body(out, cf->base);
    } else {
        const auto& mv = std::get<MultivariateGaussianModel>(model);
        write_header(out, ModelKind::multivariate, mv.num_classes(), mv.dim());
        out << "shrinkage " << fmt(mv.shrinkage()) << '\n';
        out << "covariance_mode " << (mv.mode() == CovarianceMode::pooled ? "pooled" : "per_class") << '\n';
        for (std::size_t c = 0; c < mv.num_classes(); ++c)
            out << "prior " << c << ' ' << fmt(mv.priors()[static_cast<Eigen::Index>(c)]) << '\n';
        for (std::size_t c = 0; c < mv.num_classes(); ++c)
            write_row(out, "mean", c, mv.means().row(static_cast<Eigen::Index>(c)));
        for (std::size_t m = 0; m < mv.covariances().size(); ++m) {
            const Matrix& cov = mv.covariances()[m];
            for (Eigen::Index i = 0; i < cov.rows(); ++i) {
                out << "covariance " << m << ' ' << i;
                for (Eigen::Index j = 0; j < cov.cols(); ++j) out << ' ' << fmt(cov(i, j));
                out << '\n';
            }
        }
    }
    out << "end\n";
    if (!out) throw IoError("failed writing model");
}

AnyModel read_model(std::istream& in) {
    Reader r(in);
    const Line& magic = r.next("coupled-model");
    if (to_size(magic, 1) != static_cast<std::size_t>(kFormatVersion))
        throw ParseError("unsupported model format version " + magic.tokens.at(1), magic.number, 0);
    const Line& kind_line = r.next("kind");
    const std::string kind = kind_line.tokens.size() > 1 ? kind_line.tokens[1] : "";
    const std::size_t classes = to_size(r.next("classes"), 1);
    const std::size_t d = to_size(r.next("features"), 1);
    if (classes == 0 || d == 0) throw ParseError("model must have at least one class and feature");
    const auto K = static_cast<Eigen::Index>(classes);
    const auto D = static_cast<Eigen::Index>(d);

    auto read_priors = [&] {
        Vector priors(K);
        for (Eigen::Index c = 0; c < K; ++c) {
            const Line& l = r.next("prior");
            expect_index(l, static_cast<std::size_t>(c));
            priors[c] = to_double(l, 2);
        }
        return priors;
    };

    std::optional<AnyModel> result;
    if (kind == "naive_bayes" || kind == "coupled") {
        const double floor = to_double(r.next("variance_floor"), 1);
        std::optional<double> kappa;
        if (kind == "coupled") kappa = to_double(r.next("kappa"), 1);
        Vector priors = read_priors();
        Matrix means(K, D), variances(K, D);
        read_rows(r, "mean", means);
        read_rows(r, "variance", variances);
        GaussianNBModel base(std::move(means), std::move(variances), std::move(priors), floor);
        if (kappa)
            result = CoupledFusionModel{std::move(base), Coupling(*kappa)};
        else
            result = std::move(base);
    } else if (kind == "multivariate") {
        const double shrinkage = to_double(r.next("shrinkage"), 1);
        const Line& mode_line = r.next("covariance_mode");
        const std::string mode_name = mode_line.tokens.size() > 1 ? mode_line.tokens[1] : "";
        if (mode_name != "pooled" && mode_name != "per_class")
            throw ParseError("unknown covariance mode '" + mode_name + "'", mode_line.number, 0);
        const CovarianceMode mode = mode_name == "pooled" ? CovarianceMode::pooled : CovarianceMode::per_class;
        Vector priors = read_priors();
        Matrix means(K, D);
        read_rows(r, "mean", means);
        std::vector<Matrix> covs(mode == CovarianceMode::pooled ? 1 : classes, Matrix(D, D));
        for (std::size_t m = 0; m < covs.size(); ++m) {
            for (Eigen::Index i = 0; i < D; ++i) {
                const Line& l = r.next("covariance");
                if (to_size(l, 1) != m || to_size(l, 2) != static_cast<std::size_t>(i) ||
                    l.tokens.size() != d + 3)
                    throw ParseError("model file line " + std::to_string(l.number) + ": malformed covariance row",
                                     l.number, 0);
                for (Eigen::Index j = 0; j < D; ++j) covs[m](i, j) = to_double(l, static_cast<std::size_t>(j) + 3);
            }
        }
        result = MultivariateGaussianModel(std::move(means), std::move(covs), std::move(priors), shrinkage, mode);
    } else {
        throw ParseError("unknown model kind '" + kind + "'", kind_line.number, 0);
    }
    r.next("end");
    if (!r.done()) throw ParseError("trailing content after 'end' in model file");
    return std::move(*result);
}

void save_model(const std::filesystem::path& path, const AnyModel& model) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file '" + path.string() + "'");
    write_model(out, model);
}

AnyModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file '" + path.string() + "'");
    return read_model(in);
}

std::vector<Posterior> predict_all(const AnyModel& model, const Matrix& features) {
    return std::visit([&](const auto& m) { return coupled::predict_all(m, features); }, model);
}

}  // namespace coupled
