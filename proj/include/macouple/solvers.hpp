#pragma once

#include <optional>
#include <string>
#include <vector>

#include "macouple/analysis.hpp"
#include "macouple/grid.hpp"
#include "macouple/operators.hpp"

namespace macouple {

/// Iteration parameters. The initial profile is one of the named presets
/// ("parabola" = 1 - t^2, "linear" = 1 - t, "constant-on-cone" = 1) or an
/// explicit profile which overrides the preset.
struct SolveConfig {
    GridPtr grid;
    double tol_fixpoint = 1e-10; ///< relative sup-norm change threshold
    int max_iter = 10000;
    std::string initial_preset = "parabola";
    std::optional<RadialProfile> initial_profile;

    /// When set, every iterate that lies in the cone is checked against the
    /// two-sided norm bounds; a violation throws std::logic_error.
    bool check_bounds_each_iter = false;

    explicit SolveConfig(GridPtr g) : grid(std::move(g)) {}
};

enum class SolveStatus { converged, nonexistence_certified, max_iter_exceeded };

std::string to_string(SolveStatus s);

/// Principal factor kappa of the degree-1 homogeneous composite operator,
/// the threshold constant C = kappa^{-N}, the critical ball radius
/// R* = C^{1/(2(N+alpha))}, and the sup-norm-normalized eigen shape.
struct EigenResult {
    double kappa = 0.0;
    double C = 0.0;
    double critical_radius = 0.0;
    RadialProfile eigen_shape;
    int iterations = 0;
    double ratio_spread = 0.0; ///< max-min of T(w)/w over nodes with w > 1e-6
};

/// Solution pair and certificates. v1, v2 is the positive concave pair; u1,
/// u2 = -v1, -v2 is the negative convex pair of the original system. For a
/// certified nonexistence verdict no solution pair is populated (profiles
/// stay zero) and the eigen data carries the threshold evidence.
struct SolveResult {
    Regime regime;
    SolveStatus status = SolveStatus::max_iter_exceeded;
    RadialProfile v1, v2;
    RadialProfile u1, u2;
    int iterations = 0;
    double final_change = 0.0;
    double residual_sup = 0.0; ///< scaled ODE-form residual of the pair
    ResidualReport residuals;
    std::vector<double> trace; ///< per-iteration change (Picard) or kappa (eigen)
    std::optional<EigenResult> eigen;
    std::string classification; ///< populated by solve_general only

    explicit SolveResult(GridPtr g, Regime r)
        : regime(r), v1(g), v2(g), u1(g), u2(std::move(g)) {}
};

struct NormalizedIterationResult {
    RadialProfile shape; ///< sup-norm 1
    double kappa = 0.0;
    int iterations = 0;
    double final_change = 0.0;
    double ratio_spread = 0.0;
    std::vector<double> kappa_trace;
};

/// Picard iteration v <- T(v) for the sublinear regime alpha*beta < N^2,
/// where the fixed point is unique and attracting. Throws WrongRegimeError
/// outside that regime. The converged status is certificate-gated: both the
/// iterate change and the independent ODE residual must pass.
SolveResult solve_picard_sublinear(const ProblemSpec& spec, const SolveConfig& cfg);

/// Normalized power iteration w <- T(w)/||T(w)|| for the scaled composite
/// operator. Valid in any regime (normalization cancels the homogeneity
/// scale). Throws MaxIterExceededError / ZeroCollapseError.
NormalizedIterationResult normalized_iteration(const ProblemSpec& spec, const SolveConfig& cfg);

/// Given T(shape) ~ kappa * shape, returns c * shape with c = kappa^{1/(1-p)},
/// p = alpha*beta/N^2, so that T(c shape) = c shape exactly by homogeneity.
/// Throws BalancedRegimeError when p = 1.
RadialProfile rescale_to_fixed_point(const RadialProfile& shape, double kappa,
                                     const ProblemSpec& spec);

/// Regime dispatch:
///  - sublinear: Picard iteration (unique fixed point);
///  - superlinear: normalized iteration, exact homogeneous rescale, one
///    confirming application;
///  - balanced: eigen computation; solvable iff lambda mu^{alpha/N} matches
///    the threshold constant C within 1e-6 relative, otherwise nonexistence
///    is certified (exit path for the unit-coefficient system, where C > 1).
SolveResult solve_system(const ProblemSpec& spec, const SolveConfig& cfg);

/// Threshold data for the balanced system with beta = N^2/alpha, computed by
/// normalized power iteration at unit scales.
EigenResult principal_constant(int N, double alpha);
EigenResult principal_constant(int N, double alpha, const SolveConfig& cfg);

/// Principal eigenvalue lambda_1 of the single radial Monge-Ampere operator,
/// via power iteration on S(v)(t) = integral_t^1 ( integral_0^s N tau^{N-1}
/// v^N )^{1/N} ds; lambda_1 = 1/kappa_S. N = 1 is admitted solely as a test
/// oracle (the 1-D reduction has the closed-form eigenvalue pi^2/4).
double single_equation_eigen(int N, const SolveConfig& cfg);

/// Damped Picard iteration for the generalized system with nonlinearities
/// f, g in place of the power laws. The classification is advisory and
/// recorded in the result; the damping factor is halved when the sup-norm
/// increment oscillates twice in a row. Convergence claims are gated by the
/// fixed-point residual, so a balanced-like pair can never produce a false
/// certificate.
SolveResult solve_general(const Nonlinearity& f, const Nonlinearity& g, int N,
                          const SolveConfig& cfg);

} // namespace macouple
