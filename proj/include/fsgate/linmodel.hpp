#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsgate/exec.hpp"
#include "fsgate/matrix.hpp"

namespace fsgate {

enum class PenaltyKind { none, l1 };

struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::none;
    double strength = 0.0;

    static PenaltySpec none() { return {}; }
    static PenaltySpec l1(double strength) { return {PenaltyKind::l1, strength}; }
    friend bool operator==(const PenaltySpec&, const PenaltySpec&) = default;
};

struct SolverOptions {
    double tolerance = 1e-6;
    int max_iters = 5000;
    // Optional (ridge / 2) * ||w||^2 added to the smooth part; 0 disables it.
    double ridge = 0.0;
    Exec exec = Exec::serial;
    // Keep the objective value after every accepted step.
    bool record_history = false;
};

struct LogisticModel {
    std::vector<double> weights;
    double intercept = 0.0;
    PenaltySpec penalty;
    bool converged = false;
    int iterations = 0;
    // Gradient norm (none) or gradient-mapping norm (l1) at the last iterate.
    double final_gradient_norm = 0.0;
    std::vector<double> objective_history;
};

struct WarmStart {
    std::span<const double> weights;
    double intercept = 0.0;
};

// Mean negative log-likelihood plus the penalty. Gradient descent with
// backtracking for PenaltyKind::none, proximal gradient (soft-thresholding)
// with backtracking for l1. The intercept is never penalised. Starts from zero
// unless a warm start is given.
LogisticModel train(const Matrix& X, std::span<const int> y, const PenaltySpec& penalty,
                    const SolverOptions& opts = {}, std::optional<WarmStart> warm = std::nullopt);

inline constexpr double kProbabilityClip = 1e-15;

// sigmoid(w.x + b), clipped to [1e-15, 1 - 1e-15].
std::vector<double> predict_proba(const LogisticModel& m, const Matrix& X);

struct Gradient {
    std::vector<double> weights;
    double intercept = 0.0;
};

// Unpenalised mean NLL and its gradient at (w, b).
double nll_loss(std::span<const double> w, double b, const Matrix& X, std::span<const int> y);
Gradient nll_gradient(std::span<const double> w, double b, const Matrix& X, std::span<const int> y);

// prox of t * |.|: sign(v) * max(|v| - t, 0).
double soft_threshold(double v, double t);

// Smallest L1 strength whose solution has all weights zero:
// max_j |(1/N) X_j^T (y - mean(y))|.
double lambda_max(const Matrix& X, std::span<const int> y);

struct PathOptions {
    int n_lambdas = 100;
    double ratio = 1e-3;
    SolverOptions solver;
};

struct PathPoint {
    double lambda = 0.0;
    std::vector<double> weights;
    double intercept = 0.0;
};

// Warm-started L1 solutions on a log-spaced grid from lambda_max down to
// lambda_max * ratio. The first point is the exact all-zero solution.
std::vector<PathPoint> regularization_path(const Matrix& X, std::span<const int> y,
                                           const PathOptions& opts = {});

void write_model(std::ostream& out, const LogisticModel& m, std::span<const std::string> names);

} // namespace fsgate
