/// @file kernel.hpp
/// @brief Breakage kernels, their admissibility checks, and the fragmentation
///        operator Q(f) = -nu f + nu * int_{r* > r} B(r, r*) f(r*) dr*.
///
/// Convention: `law(daughter, parent)` everywhere. The gain integral at daughter
/// radius r therefore reads law(r, r*) over parents r* > r.
#pragma once

#include "nsvb/phase.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nsvb::kernel {

using Law = std::function<double(double daughter, double parent)>;

struct BreakageKernel {
    double nu = 0.0;        ///< fragmentation rate
    double r_min = 0.5;     ///< radius interval [a, b] the kernel is used on
    double r_max = 1.0;
    Law law;
    std::string label;
};

/// Binary breakup uniform in daughter volume: 6 r^2 / r*^3 for r < r*.
BreakageKernel uniform_volume_kernel(double nu, double r_min, double r_max);

/// `base` with its law multiplied by `factor`.
BreakageKernel scaled_kernel(const BreakageKernel& base, double factor);

/// `base` with daughters above `fraction * r*` removed (violates normalization).
BreakageKernel truncated_kernel(const BreakageKernel& base, double fraction);

double eval_kernel(const BreakageKernel& k, double r_daughter, double r_parent);

struct KernelValidationReport {
    bool nonnegative = true;
    bool support = true;
    bool finite = true;
    double residual_I = 0.0;    ///< worst negative value or nonzero value on r >= r*
    double residual_II = 0.0;   ///< worst mirror-integral mismatch
    double residual_III = 0.0;  ///< worst |half-integral - 1|
    int n_quad = 0;
    double tolerance = 0.0;
    bool passed = false;
};

KernelValidationReport validate_hypotheses(const BreakageKernel& k, int n_quad, double tolerance = 1e-8);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
    explicit GaussLegendre(int n);
    template <class F>
    double integrate(F&& f, double lo, double hi) const {
        const double h = 0.5 * (hi - lo), c = 0.5 * (hi + lo);
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(c + h * nodes[i]);
        return s * h;
    }
};

enum class GainRule {
    /// Composite midpoint over parent cells; the half cell above the daughter
    /// uses its own midpoint with linearly interpolated f. Second order.
    midpoint,
    /// Midpoint weights with each parent column rescaled so the discrete
    /// r^3-mass of the daughters equals the parent's exactly.
    mass_conservative,
};

/// Gain matrix on a radius grid: gain_i = sum_j W(i, j) f_j.
class GainMatrix {
public:
    GainMatrix(const BreakageKernel& k, const phase::PhaseGrid& grid, GainRule rule);
    double operator()(int i, int j) const { return w_[static_cast<std::size_t>(i) * n_ + j]; }
    int size() const { return n_; }
    /// Applies the gain along r to every (x, xi) column of `in`.
    void apply(std::span<const double> in, std::span<double> out) const;

private:
    int n_;
    std::vector<double> w_;
};

/// Q(f) on the grid of f. Throws ConfigError if the kernel interval differs from
/// the grid's radius interval.
std::vector<double> apply_Q(const phase::Distribution& f, const BreakageKernel& k,
                            GainRule rule = GainRule::midpoint);

/// Integral of r^3 |xi|^p Q(f); zero for an admissible kernel up to quadrature.
double q_moment_residual(const phase::Distribution& f, const BreakageKernel& k, double p,
                         GainRule rule = GainRule::midpoint);

struct ParentMassResult {
    double residual = 0.0;
    bool degenerate = false;
};

/// |int_0^{r*} r^3 B(r, r*) dr - r*^3| / r*^3. A parent at or below r_min has no
/// daughters on the radius grid; that case reports residual 1 and `degenerate`.
ParentMassResult parent_mass_residual(const BreakageKernel& k, double r_parent, int n_quad);

void check_matches_grid(const BreakageKernel& k, const phase::PhaseGrid& g);

}  // namespace nsvb::kernel
