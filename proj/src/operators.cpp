#include "macouple/operators.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "macouple/errors.hpp"

namespace macouple {

namespace {

// Shared half-map: outer_tail of the N-th root of the cumulative kernel
// integral of phi. phi holds already-validated nonnegative nodal values.
RadialProfile half_map(const RadialProfile& like, std::vector<double> phi, int N) {
    std::vector<double> acc = kernel_cumulative(like.grid(), phi, N);
    const double root = 1.0 / static_cast<double>(N);
    for (double& x : acc)
        x = clamped_power(x, root);
    return outer_tail(RadialProfile(like.grid_ptr(), std::move(acc)));
}

RadialProfile power_half_map(const RadialProfile& v, double expo, double scale, int N) {
    std::vector<double> phi = nonnegative_values(v);
    for (double& x : phi)
        x = scale * clamped_power(x, expo);
    return half_map(v, std::move(phi), N);
}

} // namespace

std::string to_string(Regime r) {
    switch (r) {
    case Regime::sublinear: return "sublinear";
    case Regime::balanced: return "balanced";
    case Regime::superlinear: return "superlinear";
    }
    return "unknown";
}

std::string to_string(GeneralCase c) {
    switch (c) {
    case GeneralCase::case1: return "case1";
    case GeneralCase::case2: return "case2";
    case GeneralCase::indeterminate: return "indeterminate";
    }
    return "unknown";
}

ProblemSpec::ProblemSpec(int N_, double alpha_, double beta_, double lambda_, double mu_)
    : N(N_), alpha(alpha_), beta(beta_), lambda(lambda_), mu(mu_) {
    if (N < 2)
        throw std::invalid_argument("ProblemSpec: N must be >= 2");
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("ProblemSpec: alpha and beta must be positive");
    if (!(lambda > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("ProblemSpec: lambda and mu must be positive");
}

Regime ProblemSpec::regime() const noexcept {
    const double nn = static_cast<double>(N) * static_cast<double>(N);
    const double prod = alpha * beta;
    if (prod < nn)
        return Regime::sublinear;
    if (prod > nn)
        return Regime::superlinear;
    return Regime::balanced;
}

double ProblemSpec::scale_product() const noexcept {
    return lambda * std::pow(mu, alpha / static_cast<double>(N));
}

double Nonlinearity::operator()(double x) const {
    const double y = evaluator(x);
    if (!std::isfinite(y) || y < 0.0)
        throw NonlinearityRangeError("nonlinearity returned a negative or non-finite value");
    return y;
}

RadialProfile apply_T1(const RadialProfile& v, const ProblemSpec& spec) {
    return power_half_map(v, spec.alpha, 1.0, spec.N);
}

RadialProfile apply_T2(const RadialProfile& v, const ProblemSpec& spec) {
    return power_half_map(v, spec.beta, 1.0, spec.N);
}

RadialProfile apply_T(const RadialProfile& v, const ProblemSpec& spec) {
    return apply_T1(apply_T2(v, spec), spec);
}

RadialProfile apply_T1_scaled(const RadialProfile& v, const ProblemSpec& spec) {
    return power_half_map(v, spec.alpha, spec.lambda, spec.N);
}

RadialProfile apply_T2_scaled(const RadialProfile& v, const ProblemSpec& spec) {
    return power_half_map(v, spec.beta, spec.mu, spec.N);
}

RadialProfile apply_T_scaled(const RadialProfile& v, const ProblemSpec& spec) {
    return apply_T1_scaled(apply_T2_scaled(v, spec), spec);
}

RadialProfile apply_general(const RadialProfile& v, const Nonlinearity& f, int N) {
    std::vector<double> phi = nonnegative_values(v);
    for (double& x : phi)
        x = f(x);
    return half_map(v, std::move(phi), N);
}

Classification classify_general(const Nonlinearity& f, const Nonlinearity& g, int N,
                                double probe_lo, double probe_hi) {
    if (!(probe_lo > 0.0) || !(probe_hi > probe_lo))
        throw std::invalid_argument("classify_general: need 0 < probe_lo < probe_hi");

    const double root = 1.0 / static_cast<double>(N);
    auto q = [&](double x) { return clamped_power(f(clamped_power(g(x), root)), root) / x; };

    Classification out;
    out.q_at_lo = q(probe_lo);
    out.q_at_hi = q(probe_hi);

    const bool lo_small = out.q_at_lo < out.small_threshold;
    const bool lo_large = out.q_at_lo > out.large_threshold;
    const bool hi_small = out.q_at_hi < out.small_threshold;
    const bool hi_large = out.q_at_hi > out.large_threshold;
    if (lo_small && hi_large)
        out.category = GeneralCase::case1;
    else if (lo_large && hi_small)
        out.category = GeneralCase::case2;
    else
        out.category = GeneralCase::indeterminate;

    // Spot check of the caller-asserted monotonicity on 64 log-uniform pairs.
    // A black-box function cannot be certified globally; violations flip the
    // flag in the report rather than aborting.
    std::mt19937 rng(0x5eedu);
    std::uniform_real_distribution<double> unif(std::log(probe_lo), std::log(probe_hi));
    out.monotonicity_ok = true;
    for (int k = 0; k < 64; ++k) {
        double x = std::exp(unif(rng));
        double y = std::exp(unif(rng));
        if (x > y)
            std::swap(x, y);
        if (f.monotone_nondecreasing && f(x) > f(y) * (1.0 + 1e-12) + 1e-300)
            out.monotonicity_ok = false;
        if (g.monotone_nondecreasing && g(x) > g(y) * (1.0 + 1e-12) + 1e-300)
            out.monotonicity_ok = false;
    }
    return out;
}

} // namespace macouple
