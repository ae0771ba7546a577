#pragma once

// Versioned plain-text model files. Every real number is written with 17
// significant digits, so a save/load round trip is value-exact.
//
//   coupled-model 1
//   kind naive_bayes|coupled|multivariate
//   classes <K>
//   features <d>
//   variance_floor <v>            (naive_bayes, coupled)
//   kappa <v>                     (coupled)
//   shrinkage <v>                 (multivariate)
//   covariance_mode per_class|pooled   (multivariate)
//   prior <c> <v>
//   mean <c> <v_1> ... <v_d>
//   variance <c> <v_1> ... <v_d>  (naive_bayes, coupled)
//   covariance <m> <row> <v_1> ... <v_d>   (multivariate; m indexes matrices)
//   end

#include <filesystem>
#include <iosfwd>
#include <variant>

#include "coupled/classifiers.hpp"

namespace coupled {

using AnyModel = std::variant<GaussianNBModel, CoupledFusionModel, MultivariateGaussianModel>;

void write_model(std::ostream& out, const AnyModel& model);
AnyModel read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const AnyModel& model);
AnyModel load_model(const std::filesystem::path& path);

ModelKind kind_of(const AnyModel& model);
std::vector<Posterior> predict_all(const AnyModel& model, const Matrix& features);

}  // namespace coupled
