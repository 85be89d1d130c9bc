#include "nsvb/kinetic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>

namespace nsvb::kinetic {

namespace {

void check_u(const PhaseGrid& g, const VectorField& u) {
    if (u.dim != g.dim || u.n != g.spatial_cells()) throw InputError("velocity field does not match the phase grid");
}

}  // namespace

CharacteristicMap backtrace(const PhaseGrid& g, const VectorField& u, double r, double dt) {
    check_u(g, u);
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw InputError("backtrace: dt must be non-negative");
    if (!(r > 0.0)) throw InputError("backtrace: radius must be positive");
    CharacteristicMap cm;
    cm.radius = r;
    cm.dt = dt;
    const double grow = std::exp(dt / (r * r));
    cm.factor = std::pow(grow, g.dim);
    const std::size_t nx = g.spatial_cells(), nv = g.velocity_cells();
    cm.x0.resize(nx * nv);
    cm.xi0.resize(nx * nv);
    const double disp = r * r * std::expm1(dt / (r * r));
    for (std::size_t ix = 0; ix < nx; ++ix) {
        const auto x = g.position(ix);
        for (std::size_t iv = 0; iv < nv; ++iv) {
            const auto xi = g.velocity(iv);
            auto& X = cm.x0[ix * nv + iv];
            auto& V = cm.xi0[ix * nv + iv];
            X = {0, 0, 0};
            V = {0, 0, 0};
            for (int a = 0; a < g.dim; ++a) {
                const double ua = u(a, ix);
                V[a] = ua + (xi[a] - ua) * grow;
                double xa = x[a] - ua * dt - (xi[a] - ua) * disp;
                xa = std::fmod(xa, g.length);
                if (xa < 0.0) xa += g.length;
                X[a] = xa;
            }
        }
    }
    return cm;
}

void free_transport(Distribution& f, double tau) {
    const auto& g = f.grid;
    const std::size_t nx = g.spatial_cells(), nv = g.velocity_cells();
    const int nr = g.n_r, d = g.dim, corners = 1 << d;
    std::vector<double> out(f.values.size(), 0.0);
    parallel_for(nv, [&](std::size_t b, std::size_t e) {
        for (std::size_t iv = b; iv < e; ++iv) {
            const auto xi = g.velocity(iv);
            std::array<int, 3> off{0, 0, 0};
            std::array<double, 3> w{0, 0, 0};
            for (int a = 0; a < d; ++a) {
                const double s = -xi[a] * tau / g.dx();
                off[a] = static_cast<int>(std::floor(s));
                w[a] = s - off[a];
            }
            for (std::size_t ix = 0; ix < nx; ++ix) {
                const auto idx = g.unflatten(ix, g.n_x);
                double* dst = &out[g.index(ix, iv, 0)];
                for (int c = 0; c < corners; ++c) {
                    std::array<int, 3> src{0, 0, 0};
                    double wt = 1.0;
                    for (int a = 0; a < d; ++a) {
                        const int bit = (c >> a) & 1;
                        src[a] = ((idx[a] + off[a] + bit) % g.n_x + g.n_x) % g.n_x;
                        wt *= bit ? w[a] : 1.0 - w[a];
                    }
                    if (wt == 0.0) continue;
                    const double* s = &f.values[g.index(g.flatten(src, g.n_x), iv, 0)];
                    for (int ir = 0; ir < nr; ++ir) dst[ir] += wt * s[ir];
                }
            }
        }
    });
    f.values = std::move(out);
}

namespace {

// Reweights the slice by (1 + alpha . phi) so that the listed moments of `post`
// equal `target`. phi = (1, xi_1..xi_d, |xi|^2) truncated to `nb` functions.
bool reweight(std::span<double> post, const std::vector<std::array<double, 4>>& phi_v, int stride,
              const std::array<double, 5>& target, int nb) {
    using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 5, 5>;
    using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 5, 1>;
    const std::size_t nv = phi_v.size();
    auto phi = [&](std::size_t iv, int p) { return p == 0 ? 1.0 : phi_v[iv][p - 1]; };
    // phi_v[iv] stores (xi_1, .., xi_d, |xi|^2) packed; map basis index to it.
    Mat A = Mat::Zero(nb, nb);
    Vec rhs = Vec::Zero(nb);
    for (std::size_t iv = 0; iv < nv; ++iv) {
        const double fv = post[iv * stride];
        if (fv == 0.0) continue;
        for (int p = 0; p < nb; ++p) {
            rhs(p) += fv * phi(iv, p);
            for (int q = 0; q < nb; ++q) A(p, q) += fv * phi(iv, p) * phi(iv, q);
        }
    }
    for (int p = 0; p < nb; ++p) rhs(p) = target[p] - rhs(p);
    Eigen::FullPivLU<Mat> lu(A);
    lu.setThreshold(1e-11);
    if (!lu.isInvertible()) return false;
    const Vec alpha = lu.solve(rhs);
    if (!alpha.allFinite()) return false;
    std::vector<double> scale(nv, 1.0);
    for (std::size_t iv = 0; iv < nv; ++iv) {
        if (post[iv * stride] == 0.0) continue;
        double s = 1.0;
        for (int p = 0; p < nb; ++p) s += alpha(p) * phi(iv, p);
        if (s < 0.0) return false;
        scale[iv] = s;
    }
    for (std::size_t iv = 0; iv < nv; ++iv) post[iv * stride] *= scale[iv];
    return true;
}

}  // namespace

void velocity_drag(Distribution& f, const VectorField& u, double h, const KineticParams& params, AdvectStats* stats) {
    const auto& g = f.grid;
    check_u(g, u);
    const std::size_t nx = g.spatial_cells(), nv = g.velocity_cells();
    const int nr = g.n_r, d = g.dim, corners = 1 << d;
    const std::size_t stride = static_cast<std::size_t>(nr);

    std::vector<std::array<double, 3>> vel(nv);
    for (std::size_t iv = 0; iv < nv; ++iv) vel[iv] = g.velocity(iv);
    // Packed basis values: the d velocity components, then |xi|^2 at slot d.
    std::vector<std::array<double, 4>> phi(nv);
    for (std::size_t iv = 0; iv < nv; ++iv) {
        double v2 = 0.0;
        phi[iv] = {0, 0, 0, 0};
        for (int a = 0; a < d; ++a) {
            phi[iv][a] = vel[iv][a];
            v2 += vel[iv][a] * vel[iv][a];
        }
        phi[iv][d] = v2;
    }

    std::atomic<long> n_slices{0}, n_lin{0}, n_mass{0}, n_unfixed{0};
    std::vector<double> out(f.values.size(), 0.0);
    parallel_for(nx, [&](std::size_t b, std::size_t e) {
        for (std::size_t ix = b; ix < e; ++ix) {
            std::array<double, 3> ux{0, 0, 0};
            for (int a = 0; a < d; ++a) ux[a] = u(a, ix);
            double u2 = 0.0;
            for (int a = 0; a < d; ++a) u2 += ux[a] * ux[a];
            for (int ir = 0; ir < nr; ++ir) {
                const double r = g.radius(ir);
                const double grow = std::exp(h / (r * r));
                const double jac = std::pow(grow, d);
                const double* src = &f.values[g.index(ix, 0, ir)];
                double* dst = &out[g.index(ix, 0, ir)];
                for (std::size_t iv = 0; iv < nv; ++iv) {
                    std::array<int, 3> i0{0, 0, 0};
                    std::array<double, 3> w{0, 0, 0};
                    for (int a = 0; a < d; ++a) {
                        const double foot = ux[a] + (vel[iv][a] - ux[a]) * grow;
                        const double p = (foot + g.xi_max) / g.dxi() - 0.5;
                        const double fl = std::floor(p);
                        i0[a] = static_cast<int>(std::clamp(fl, -2.0, static_cast<double>(g.n_xi + 1)));
                        w[a] = p - fl;
                    }
                    double acc = 0.0;
                    for (int c = 0; c < corners; ++c) {
                        std::array<int, 3> s{0, 0, 0};
                        double wt = 1.0;
                        bool inside = true;
                        for (int a = 0; a < d; ++a) {
                            const int bit = (c >> a) & 1;
                            s[a] = i0[a] + bit;
                            if (s[a] < 0 || s[a] >= g.n_xi) inside = false;
                            wt *= bit ? w[a] : 1.0 - w[a];
                        }
                        if (!inside || wt == 0.0) continue;
                        acc += wt * src[g.flatten(s, g.n_xi) * stride];
                    }
                    dst[iv * stride] = jac * acc;
                }
                if (!params.moment_fix) continue;

                // Exact moments of the pushed-forward slice.
                std::array<double, 5> pre{0, 0, 0, 0, 0};
                for (std::size_t iv = 0; iv < nv; ++iv) {
                    const double fv = src[iv * stride];
                    if (fv == 0.0) continue;
                    pre[0] += fv;
                    for (int a = 0; a <= d; ++a) pre[a + 1] += fv * phi[iv][a];
                }
                if (pre[0] == 0.0) continue;
                const double c = 1.0 / grow;
                std::array<double, 5> target{0, 0, 0, 0, 0};
                target[0] = pre[0];
                double uM1 = 0.0;
                for (int a = 0; a < d; ++a) {
                    target[a + 1] = ux[a] * pre[0] * (1.0 - c) + c * pre[a + 1];
                    uM1 += ux[a] * pre[a + 1];
                }
                target[d + 1] = u2 * pre[0] * (1.0 - c) * (1.0 - c) + 2.0 * c * (1.0 - c) * uM1 + c * c * pre[d + 1];

                n_slices.fetch_add(1, std::memory_order_relaxed);
                std::span<double> post(dst, (nv - 1) * stride + 1);
                if (reweight(post, phi, nr, target, d + 2)) continue;
                if (reweight(post, phi, nr, target, d + 1)) {
                    n_lin.fetch_add(1, std::memory_order_relaxed);
                    continue;
                }
                if (reweight(post, phi, nr, target, 1)) {
                    n_mass.fetch_add(1, std::memory_order_relaxed);
                    continue;
                }
                n_unfixed.fetch_add(1, std::memory_order_relaxed);
            }
        }
    });
    f.values = std::move(out);
    if (stats) {
        stats->slices += n_slices.load();
        stats->fallback_linear += n_lin.load();
        stats->fallback_mass += n_mass.load();
        stats->unfixed += n_unfixed.load();
    }
}

void check_support(const Distribution& f, const KineticParams& params) {
    const auto& g = f.grid;
    const double thresh = params.guard_tol * f.max_value();
    const std::size_t nx = g.spatial_cells(), nv = g.velocity_cells();
    const int band = std::min(params.guard_cells, g.n_xi / 2);
    for (std::size_t iv = 0; iv < nv; ++iv) {
        const auto idx = g.unflatten(iv, g.n_xi);
        bool edge = false;
        for (int a = 0; a < g.dim; ++a)
            if (idx[a] < band || idx[a] >= g.n_xi - band) edge = true;
        if (!edge) continue;
        for (std::size_t ix = 0; ix < nx; ++ix)
            for (int ir = 0; ir < g.n_r; ++ir)
                if (f.at(ix, iv, ir) > thresh)
                    throw SupportViolation("droplet density reached the velocity guard band (xi cell " +
                                           std::to_string(iv) + ")");
    }
}

Distribution advect_step(const Distribution& f, const VectorField& u, double dt, const KineticParams& params,
                         AdvectStats* stats) {
    if (!(dt > 0.0)) throw InputError("advect_step: dt must be positive");
    check_u(f.grid, u);
    Distribution out = f;
    free_transport(out, 0.5 * dt);
    velocity_drag(out, u, dt, params, stats);
    free_transport(out, 0.5 * dt);
    check_support(out, params);
    return out;
}

Distribution fragmentation_substep(const Distribution& f, const kernel::BreakageKernel& k, double dt,
                                   kernel::GainRule rule) {
    kernel::check_matches_grid(k, f.grid);
    if (k.nu == 0.0 || dt == 0.0) return f;
    const kernel::GainMatrix gain(k, f.grid, rule);
    Distribution out(f.grid);
    gain.apply(f.values, out.values);
    const double keep = std::exp(-k.nu * dt);
    const double move = -std::expm1(-k.nu * dt);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = keep * f.values[i] + move * out.values[i];
    return out;
}

double drag_power(const Distribution& f, const VectorField& u) {
    const auto& g = f.grid;
    check_u(g, u);
    const std::size_t nx = g.spatial_cells(), nv = g.velocity_cells();
    std::vector<double> partial(nx, 0.0);
    parallel_for(nx, [&](std::size_t b, std::size_t e) {
        for (std::size_t ix = b; ix < e; ++ix) {
            double s = 0.0;
            for (std::size_t iv = 0; iv < nv; ++iv) {
                const auto xi = g.velocity(iv);
                double w = 0.0;
                for (int a = 0; a < g.dim; ++a) w += (u(a, ix) - xi[a]) * xi[a];
                for (int ir = 0; ir < g.n_r; ++ir) s += 2.0 * g.radius(ir) * w * f.at(ix, iv, ir);
            }
            partial[ix] = s;
        }
    });
    return pairwise_sum(partial) * g.x_volume() * g.xi_volume() * g.dr();
}

double kinetic_energy_balance_residual(const Distribution& before, const Distribution& after, const VectorField& u,
                                       double dt) {
    const double k0 = phase::kinetic_energy_moment(before);
    const double k1 = phase::kinetic_energy_moment(after);
    const double rhs = 0.5 * dt * (drag_power(before, u) + drag_power(after, u));
    const double mismatch = std::abs(k1 - k0 - rhs);
    if (k0 == 0.0) return mismatch;
    return mismatch / k0;
}

LipschitzProbe lipschitz_probe(const Distribution& f0, const VectorField& u1, const VectorField& u2, double dt,
                               int n_steps, const KineticParams& params) {
    if (u1.data.size() != u2.data.size()) throw InputError("lipschitz_probe: velocity fields differ in shape");
    LipschitzProbe res;
    double du2 = 0.0;
    for (std::size_t i = 0; i < u1.data.size(); ++i) du2 += (u1.data[i] - u2.data[i]) * (u1.data[i] - u2.data[i]);
    res.denominator = std::sqrt(du2 * f0.grid.x_volume() * dt * n_steps);
    Distribution a = f0, b = f0;
    for (int s = 0; s < n_steps; ++s) {
        a = advect_step(a, u1, dt, params);
        b = advect_step(b, u2, dt, params);
        const auto na = phase::moment0(a), nb = phase::moment0(b);
        for (std::size_t i = 0; i < na.size(); ++i) res.numerator = std::max(res.numerator, std::abs(na[i] - nb[i]));
    }
    if (res.denominator == 0.0) {
        res.undefined = true;
        res.ratio = 0.0;
        return res;
    }
    res.ratio = res.numerator / res.denominator;
    return res;
}

}  // namespace nsvb::kinetic
