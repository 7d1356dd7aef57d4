#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fsgate/exec.hpp"
#include "fsgate/matrix.hpp"

namespace fsgate {

inline constexpr double kLambdaLower = -5.0;
inline constexpr double kLambdaUpper = 5.0;
inline constexpr double kLambdaTolerance = 1e-6;
// Standard deviations below this are stored as exactly 0 and the feature
// transforms to a zero column.
inline constexpr double kDegenerateStd = 1e-12;

// Yeo-Johnson power transform psi(x, lambda). Strictly increasing in x.
double yeo_johnson(double x, double lambda);

// Profile log-likelihood of lambda for one column (constant terms dropped).
// Returns -inf when the transformed variance is zero or not finite.
double yeo_johnson_log_likelihood(std::span<const double> column, double lambda);

// Golden-section maximiser of the profile log-likelihood over [-5, 5].
// A constant column yields 1.
double fit_lambda(std::span<const double> column);

struct TransformParams {
    std::vector<double> lambdas;
    std::vector<double> means;
    std::vector<double> stds;

    std::size_t size() const noexcept { return lambdas.size(); }
    friend bool operator==(const TransformParams&, const TransformParams&) = default;
};

// Power transform then standardise, fitted per column on the training rows.
TransformParams fit(const Matrix& train, Exec exec = Exec::serial);
Matrix transform(const Matrix& data, const TransformParams& params, Exec exec = Exec::serial);

void write_params(std::ostream& out, const TransformParams& params,
                  std::span<const std::string> names);
TransformParams read_params(std::istream& in);

} // namespace fsgate
