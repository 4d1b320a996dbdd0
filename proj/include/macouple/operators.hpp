#pragma once

#include <functional>
#include <string>

#include "macouple/grid.hpp"

namespace macouple {

enum class Regime { sublinear, balanced, superlinear };

std::string to_string(Regime r);

/// Problem data for the power-coupled system on the unit ball:
/// exponents (alpha, beta), space dimension N, and the scale pair
/// (lambda, mu) of the parametrized system (both default 1).
struct ProblemSpec {
    int N;
    double alpha;
    double beta;
    double lambda = 1.0;
    double mu = 1.0;

    ProblemSpec(int N_, double alpha_, double beta_, double lambda_ = 1.0, double mu_ = 1.0);

    /// sign(alpha*beta - N^2) classifies the regime.
    Regime regime() const noexcept;

    /// Homogeneity degree p = alpha*beta / N^2 of the composite operator.
    double homogeneity() const noexcept {
        return alpha * beta / (static_cast<double>(N) * static_cast<double>(N));
    }

    /// The quantity lambda * mu^{alpha/N} compared against the threshold
    /// constant in the balanced regime.
    double scale_product() const noexcept;
};

/// User-supplied scalar nonlinearity for the generalized system. The
/// monotonicity flag is asserted by the caller and only spot-checked.
/// Evaluators must be re-entrant.
struct Nonlinearity {
    std::function<double(double)> evaluator;
    bool monotone_nondecreasing = true;

    /// Evaluates and validates the result (finite and nonnegative);
    /// violations throw NonlinearityRangeError.
    double operator()(double x) const;
};

/// T1(v)(t) = integral_t^1 ( integral_0^s N tau^{N-1} v^alpha dtau )^{1/N} ds.
/// Unit-coefficient operator; the image is nonnegative, concave, zero at t=1.
RadialProfile apply_T1(const RadialProfile& v, const ProblemSpec& spec);

/// As apply_T1 with beta in place of alpha.
RadialProfile apply_T2(const RadialProfile& v, const ProblemSpec& spec);

/// Composite operator T = T1 T2. Maps the cone into itself and satisfies
/// T(c v) = c^{alpha*beta/N^2} T(v).
RadialProfile apply_T(const RadialProfile& v, const ProblemSpec& spec);

/// Scaled half-operators with lambda (resp. mu) inside the inner integrand.
RadialProfile apply_T1_scaled(const RadialProfile& v, const ProblemSpec& spec);
RadialProfile apply_T2_scaled(const RadialProfile& v, const ProblemSpec& spec);

/// Scaled composite; factorizes as lambda^{1/N} mu^{alpha/N^2} T(v).
RadialProfile apply_T_scaled(const RadialProfile& v, const ProblemSpec& spec);

/// Half-operator with a general nonlinearity f replacing the power law:
/// t -> integral_t^1 ( integral_0^s N tau^{N-1} f(v(tau)) dtau )^{1/N} ds.
RadialProfile apply_general(const RadialProfile& v, const Nonlinearity& f, int N);

enum class GeneralCase { case1, case2, indeterminate };

std::string to_string(GeneralCase c);

/// Finite-probe estimate of q(x) = ( f( g(x)^{1/N} ) )^{1/N} / x at both ends
/// of the probe interval. The thresholds are heuristic and reported in the
/// result; the classification is advisory, never silently trusted.
struct Classification {
    GeneralCase category = GeneralCase::indeterminate;
    double q_at_lo = 0.0;
    double q_at_hi = 0.0;
    double small_threshold = 0.1;
    double large_threshold = 10.0;
    bool monotonicity_ok = true; ///< 64-pair spot check of the caller's flags
};

Classification classify_general(const Nonlinearity& f, const Nonlinearity& g, int N,
                                double probe_lo, double probe_hi);

} // namespace macouple
