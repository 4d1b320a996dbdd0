#pragma once

#include <memory>
#include <span>
#include <vector>

namespace macouple {

/// Uniform grid t_0 = 0 < t_1 < ... < t_{n-1} = 1 on the radial interval.
///
/// Grids coarser than 16 nodes are rejected; the quadrature below is not
/// meaningful on fewer nodes. Immutable after construction.
class Grid {
public:
    explicit Grid(int n_nodes);

    int size() const noexcept { return static_cast<int>(nodes_.size()); }
    double spacing() const noexcept { return spacing_; }
    double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    std::span<const double> nodes() const noexcept { return nodes_; }

    friend bool operator==(const Grid& a, const Grid& b) noexcept {
        return a.size() == b.size();
    }

private:
    std::vector<double> nodes_;
    double spacing_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(int n_nodes);

/// Sampled function on a Grid. Values are validated to be finite on
/// construction. Cheap to copy (the grid is shared, values are owned).
class RadialProfile {
public:
    explicit RadialProfile(GridPtr grid);
    RadialProfile(GridPtr grid, std::vector<double> values);

    template <class F>
    static RadialProfile sample(GridPtr grid, F&& f) {
        std::vector<double> vals(static_cast<std::size_t>(grid->size()));
        for (int i = 0; i < grid->size(); ++i)
            vals[static_cast<std::size_t>(i)] = f(grid->node(i));
        return RadialProfile(std::move(grid), std::move(vals));
    }

    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    int size() const noexcept { return static_cast<int>(values_.size()); }

    std::span<const double> values() const noexcept { return values_; }
    std::vector<double>& mutable_values() noexcept { return values_; }

    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return values_[static_cast<std::size_t>(i)]; }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Diagnostics for membership in the cone
///   K = { v >= 0 : min over [1/4,3/4] of v >= (1/4) sup|v| }.
struct ConeReport {
    bool nonnegative = false;
    bool concave_within_tol = false;
    double harnack_ratio = 0.0; ///< min over nodes in [1/4,3/4] divided by sup norm
    double tolerance_used = 0.0;

    /// Cone membership does not require concavity (concavity is reported
    /// separately; images of the solution operators happen to be concave).
    bool passes() const noexcept {
        return nonnegative && harnack_ratio >= 0.25 - tolerance_used;
    }
};

double sup_norm(const RadialProfile& v);

/// x^p for x >= 0 with 0 mapped to exactly 0 and a floor of 1e-300 under the
/// power to keep iteration round-off from producing NaNs.
double clamped_power(double x, double p);

/// Nodal values of v clamped at zero. Values below -1e-12 * sup_norm(v)
/// throw NegativeInputError; small negatives inside that band are round-off
/// from iteration and are clamped to 0.
std::vector<double> nonnegative_values(const RadialProfile& v);

/// Cumulative kernel integrals I_i = integral_0^{t_i} N tau^{N-1} phi(tau) dtau
/// where phi is the piecewise-linear interpolant of the nodal values given.
/// The kernel moments are integrated exactly on each cell, so the rule is
/// exact whenever phi is linear; in particular phi == 1 yields t_i^N to
/// round-off for every N. Weights are nonnegative, hence the output is
/// nondecreasing for nonnegative phi.
std::vector<double> kernel_cumulative(const Grid& g, std::span<const double> phi, int N);

/// s -> ( integral_0^s N tau^{N-1} v(tau)^gamma dtau )^{1/N}.
/// Nondecreasing, equals 0 at t = 0.
RadialProfile inner_cumulative(const RadialProfile& v, double gamma, int N);

/// t -> integral_t^1 w(s) ds by composite trapezoid from the right.
/// Nonincreasing for nonnegative w, exactly 0 at t = 1.
RadialProfile outer_tail(const RadialProfile& w);

/// Cone diagnostics with explicit tolerance (used both for the discrete
/// concavity slack and for the harnack pass margin).
ConeReport cone_report(const RadialProfile& v, double tol);

/// Default tolerance 10 * spacing^2: second differences of a C^2 concave
/// function are <= 0 up to O(spacing^2) discretization noise.
ConeReport cone_report(const RadialProfile& v);

} // namespace macouple
