#include "nsvb/phase.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nsvb::phase {

void PhaseGrid::validate() const {
    auto fail = [](const std::string& what) { throw InputError("phase grid: " + what); };
    if (dim < 1 || dim > 3) fail("dim must be 1, 2 or 3");
    if (n_x < 2) fail("n_x must be >= 2");
    if (n_xi < 2) fail("n_xi must be >= 2");
    if (n_r < 2) fail("n_r must be >= 2");
    if (!(length > 0.0) || !std::isfinite(length)) fail("length must be positive");
    if (!(xi_max > 0.0) || !std::isfinite(xi_max)) fail("xi_max must be positive");
    if (!(r_min > 0.0)) fail("r_min must be positive");
    if (!(r_max > r_min) || !std::isfinite(r_max)) fail("r_max must exceed r_min");
}

std::array<int, 3> PhaseGrid::unflatten(std::size_t flat, int n) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % static_cast<std::size_t>(n));
        flat /= static_cast<std::size_t>(n);
    }
    return idx;
}

std::size_t PhaseGrid::flatten(const std::array<int, 3>& idx, int n) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim; ++a) flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx[a]);
    return flat;
}

std::array<double, 3> PhaseGrid::position(std::size_t ix) const {
    const auto idx = unflatten(ix, n_x);
    std::array<double, 3> x{0, 0, 0};
    for (int a = 0; a < dim; ++a) x[a] = x_coord(idx[a]);
    return x;
}

std::array<double, 3> PhaseGrid::velocity(std::size_t iv) const {
    const auto idx = unflatten(iv, n_xi);
    std::array<double, 3> v{0, 0, 0};
    for (int a = 0; a < dim; ++a) v[a] = xi_coord(idx[a]);
    return v;
}

void Distribution::validate() const {
    if (values.size() != grid.size()) throw InputError("distribution size does not match its grid");
    for (double v : values) {
        if (!std::isfinite(v)) throw InputError("distribution has non-finite entries");
        if (v < 0.0) throw InputError("distribution has negative entries");
    }
}

double Distribution::max_value() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double Distribution::min_value() const {
    return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

double VectorField::max_abs() const {
    double m = 0.0;
    for (double v : data) m = std::max(m, std::abs(v));
    return m;
}

namespace {

// Per-x-cell reduction of sum_{xi,r} w(r, xi) f, combined pairwise.
template <class Weight>
double phase_integral(const Distribution& f, Weight&& weight) {
    const auto& g = f.grid;
    const std::size_t nx = g.spatial_cells();
    const std::size_t nv = g.velocity_cells();
    std::vector<double> partial(nx, 0.0);
    std::vector<std::array<double, 3>> vel(nv);
    for (std::size_t iv = 0; iv < nv; ++iv) vel[iv] = g.velocity(iv);
    parallel_for(nx, [&](std::size_t b, std::size_t e) {
        for (std::size_t ix = b; ix < e; ++ix) {
            double s = 0.0;
            for (std::size_t iv = 0; iv < nv; ++iv) {
                const double* row = &f.values[g.index(ix, iv, 0)];
                for (int ir = 0; ir < g.n_r; ++ir) s += weight(g.radius(ir), vel[iv]) * row[ir];
            }
            partial[ix] = s;
        }
    });
    return pairwise_sum(partial) * g.x_volume() * g.xi_volume() * g.dr();
}

}  // namespace

ScalarField moment0(const Distribution& f) {
    const std::vector<double> ones(f.grid.n_r, 1.0);
    return weighted_moments(f, ones).n_field;
}

VectorField moment1(const Distribution& f) {
    const std::vector<double> ones(f.grid.n_r, 1.0);
    return weighted_moments(f, ones).j_field;
}

MomentFields weighted_moments(const Distribution& f, std::span<const double> shell_weight) {
    const auto& g = f.grid;
    const std::size_t nx = g.spatial_cells();
    const std::size_t nv = g.velocity_cells();
    MomentFields m;
    m.n_field.assign(nx, 0.0);
    m.j_field = VectorField(g.dim, nx);
    const double w = g.xi_volume() * g.dr();
    std::vector<double> rw(g.n_r);
    for (int ir = 0; ir < g.n_r; ++ir) rw[ir] = g.radius(ir) * shell_weight[ir];
    std::vector<std::array<double, 3>> vel(nv);
    for (std::size_t iv = 0; iv < nv; ++iv) vel[iv] = g.velocity(iv);
    parallel_for(nx, [&](std::size_t b, std::size_t e) {
        for (std::size_t ix = b; ix < e; ++ix) {
            double n = 0.0;
            std::array<double, 3> j{0, 0, 0};
            for (std::size_t iv = 0; iv < nv; ++iv) {
                const double* row = &f.values[g.index(ix, iv, 0)];
                double s = 0.0;
                for (int ir = 0; ir < g.n_r; ++ir) s += rw[ir] * row[ir];
                n += s;
                for (int a = 0; a < g.dim; ++a) j[a] += vel[iv][a] * s;
            }
            m.n_field[ix] = n * w;
            for (int a = 0; a < g.dim; ++a) m.j_field(a, ix) = j[a] * w;
        }
    });
    m.spray_mass = spray_mass(f);
    m.kinetic_energy = kinetic_energy_moment(f);
    return m;
}

MomentFields compute_moments(const Distribution& f) {
    const std::vector<double> ones(f.grid.n_r, 1.0);
    return weighted_moments(f, ones);
}

double spray_mass(const Distribution& f) {
    return phase_integral(f, [](double r, const std::array<double, 3>&) { return r * r * r; });
}

double kinetic_energy_moment(const Distribution& f) {
    const int d = f.grid.dim;
    return phase_integral(f, [d](double r, const std::array<double, 3>& v) {
        double v2 = 0.0;
        for (int a = 0; a < d; ++a) v2 += v[a] * v[a];
        return r * r * r * (1.0 + v2);
    });
}

double velocity_moment(const Distribution& f, double p) {
    const int d = f.grid.dim;
    return phase_integral(f, [d, p](double r, const std::array<double, 3>& v) {
        double v2 = 0.0;
        for (int a = 0; a < d; ++a) v2 += v[a] * v[a];
        return r * r * r * std::pow(std::sqrt(v2), p);
    });
}

std::array<double, 3> spray_momentum(const Distribution& f) {
    std::array<double, 3> out{0, 0, 0};
    for (int a = 0; a < f.grid.dim; ++a)
        out[a] = phase_integral(f, [a](double r, const std::array<double, 3>& v) { return r * r * r * v[a]; });
    return out;
}

MomentBoundReport moment_bound_check(std::span<const Distribution> f_history,
                                     std::span<const VectorField> u_history, double p,
                                     double growth_factor) {
    if (f_history.size() != u_history.size())
        throw InputError("moment_bound_check: f and u series lengths differ");
    if (!(p >= 1.0)) throw InputError("moment_bound_check: p must be >= 1");
    MomentBoundReport rep;
    if (f_history.empty()) return rep;

    const auto& g = f_history.front().grid;
    const double N = g.dim;
    const double q = N + p;
    const double m0 = velocity_moment(f_history.front(), p);
    const double finf = f_history.front().max_value();
    double u_sup = 0.0;  // L^inf in time of the L^{N+p} norm in space

    for (std::size_t t = 0; t < f_history.size(); ++t) {
        const auto& u = u_history[t];
        double s = 0.0;
        for (std::size_t i = 0; i < u.n; ++i) {
            double v2 = 0.0;
            for (int a = 0; a < u.dim; ++a) v2 += u(a, i) * u(a, i);
            s += std::pow(std::sqrt(v2), q);
        }
        u_sup = std::max(u_sup, std::pow(s * g.x_volume(), 1.0 / q));

        const double lhs = velocity_moment(f_history[t], p);
        const double rhs = std::pow(std::pow(m0, 1.0 / q) + (finf + 1.0) * u_sup, q);
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        rep.ratio.push_back(rhs > 0.0 ? lhs / rhs : 0.0);

        const auto n = moment0(f_history[t]);
        double ns = 0.0;
        const double e = q / N;
        for (double v : n) ns += std::pow(v, e);
        const double nnorm = std::pow(ns * g.x_volume(), 1.0 / e);
        const double bound = (f_history[t].max_value() + 1.0) * std::pow(lhs, N / q);
        rep.density_ratio.push_back(bound > 0.0 ? nnorm / bound : 0.0);
    }

    rep.max_ratio = *std::max_element(rep.ratio.begin(), rep.ratio.end());
    const std::size_t half = rep.ratio.size() / 2;
    bool monotone = rep.ratio.size() >= 4;
    for (std::size_t i = half + 1; i < rep.ratio.size() && monotone; ++i)
        monotone = rep.ratio[i] > rep.ratio[i - 1];
    const double first = rep.ratio.front();
    rep.unbounded_growth = monotone && first > 0.0 && rep.ratio.back() > growth_factor * first;
    return rep;
}

}  // namespace nsvb::phase
