#include "nsvb/oracle.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace nsvb::oracle {

using spectral::cplx;

MonolithicSystem::MonolithicSystem(const coupling::SimParams& params, const spectral::Basis& basis,
                                   const phase::PhaseGrid& grid)
    : params_(params), basis_(basis), grid_(grid) {
    n_rho_ = grid.spatial_cells();
    n_u_ = 2 * basis.size() * static_cast<std::size_t>(basis.dim());

    // Gain weights from the kernel law, rebuilt here from the quadrature rule.
    const int nr = grid.n_r;
    const double dr = grid.dr();
    gain_.assign(static_cast<std::size_t>(nr) * nr, 0.0);
    const auto& k = params.kernel;
    if (k.nu != 0.0) {
        for (int i = 0; i < nr; ++i) {
            const double r = grid.radius(i);
            for (int j = i + 1; j < nr; ++j) gain_[i * nr + j] += kernel::eval_kernel(k, r, grid.radius(j)) * dr;
            const double half = kernel::eval_kernel(k, r, r + 0.25 * dr) * 0.5 * dr;
            if (i + 1 < nr) {
                gain_[i * nr + i] += 0.75 * half;
                gain_[i * nr + i + 1] += 0.25 * half;
            } else {
                gain_[i * nr + i] += half;
            }
        }
        if (params.kinetic.gain_rule == kernel::GainRule::mass_conservative) {
            for (int j = 0; j < nr; ++j) {
                double m = 0.0;
                for (int i = 0; i < nr; ++i) m += std::pow(grid.radius(i), 3) * gain_[i * nr + j];
                if (m > 0.0)
                    for (int i = 0; i < nr; ++i) gain_[i * nr + j] *= std::pow(grid.radius(j), 3) / m;
            }
        }
    }
}

std::vector<double> MonolithicSystem::pack(const coupling::CoupledState& s) const {
    std::vector<double> y;
    y.reserve(n_rho_ + n_u_ + f_size());
    y.insert(y.end(), s.fluid.rho.begin(), s.fluid.rho.end());
    for (int c = 0; c < basis_.dim(); ++c)
        for (Eigen::Index m = 0; m < s.fluid.u.rows(); ++m) {
            y.push_back(s.fluid.u(m, c).real());
            y.push_back(s.fluid.u(m, c).imag());
        }
    y.insert(y.end(), s.f.values.begin(), s.f.values.end());
    return y;
}

coupling::CoupledState MonolithicSystem::unpack(const std::vector<double>& y, double t) const {
    coupling::CoupledState s;
    s.fluid.time = t;
    s.time = t;
    s.fluid.rho.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_rho_));
    const auto m = static_cast<Eigen::Index>(basis_.size());
    s.fluid.u = fluid::Coeffs(m, basis_.dim());
    std::size_t p = n_rho_;
    for (int c = 0; c < basis_.dim(); ++c)
        for (Eigen::Index i = 0; i < m; ++i, p += 2) s.fluid.u(i, c) = cplx(y[p], y[p + 1]);
    s.f = phase::Distribution(grid_);
    std::copy(y.begin() + static_cast<std::ptrdiff_t>(n_rho_ + n_u_), y.end(), s.f.values.begin());
    s.moments = phase::compute_moments(s.f);
    return s;
}

void MonolithicSystem::rhs(double t, const std::vector<double>& y, std::vector<double>& dy) const {
    const auto s = unpack(y, t);
    const auto& g = grid_;
    const int d = g.dim, nr = g.n_r, nxi = g.n_xi, nx = g.n_x;
    const auto& fp = params_.fluid;
    dy.assign(y.size(), 0.0);

    // Fluid block.
    const auto n0 = nested_moment0(s.f);
    const auto j1 = nested_moment1(s.f);
    const auto drho = dense_continuity_rhs(s.fluid.rho, s.fluid.u, fp, basis_);
    const fluid::Coeffs N = dense_momentum_rhs(s.fluid.rho, s.fluid.u, n0, j1, fp, basis_);
    const Eigen::MatrixXcd G = dense_gram(s.fluid.rho, basis_);
    const Eigen::MatrixXcd Gd = dense_gram(drho, basis_);
    const fluid::Coeffs du = G.ldlt().solve(N - Gd * s.fluid.u);
    std::copy(drho.begin(), drho.end(), dy.begin());
    std::size_t p = n_rho_;
    for (int c = 0; c < d; ++c)
        for (Eigen::Index i = 0; i < du.rows(); ++i, p += 2) {
            dy[p] = du(i, c).real();
            dy[p + 1] = du(i, c).imag();
        }

    // Gas velocity at the nodes, summed mode by mode.
    const std::size_t ncell = g.spatial_cells(), nv = g.velocity_cells();
    phase::VectorField u(d, ncell);
    for (std::size_t ix = 0; ix < ncell; ++ix) {
        const auto x = g.position(ix);
        for (int c = 0; c < d; ++c) {
            cplx v = 0.0;
            for (std::size_t m = 0; m < basis_.size(); ++m) {
                const auto kap = basis_.kappa(m);
                double ph = 0.0;
                for (int a = 0; a < d; ++a) ph += kap[a] * x[a];
                v += s.fluid.u(static_cast<Eigen::Index>(m), c) * std::polar(1.0, ph);
            }
            u(c, ix) = v.real() / basis_.norm();
        }
    }

    const double* f = &y[n_rho_ + n_u_];
    double* df = &dy[n_rho_ + n_u_];
    auto F = [&](std::size_t ix, std::size_t iv, int ir) { return f[g.index(ix, iv, ir)]; };
    const double dx = g.dx(), dxi = g.dxi();

    std::vector<double> lv(nv);
    for (std::size_t ix = 0; ix < ncell; ++ix) {
        const auto xidx = g.unflatten(ix, nx);
        for (int ir = 0; ir < nr; ++ir) {
            const double r = g.radius(ir), r2 = r * r;
            // Drag in xi, upwind, with the divergence factor d / r^2.
            for (std::size_t iv = 0; iv < nv; ++iv) {
                const auto vidx = g.unflatten(iv, nxi);
                const auto xi = g.velocity(iv);
                double rate = d / r2 * F(ix, iv, ir);
                for (int a = 0; a < d; ++a) {
                    const double adv = (u(a, ix) - xi[a]) / r2;
                    auto nb = vidx;
                    nb[a] += adv > 0.0 ? -1 : 1;
                    const double fn = (nb[a] < 0 || nb[a] >= nxi) ? 0.0 : F(ix, g.flatten(nb, nxi), ir);
                    const double diff = adv > 0.0 ? F(ix, iv, ir) - fn : fn - F(ix, iv, ir);
                    rate -= adv * diff / dxi;
                }
                lv[iv] = rate;
            }
            // Moment correction: restore the exact rates of (1, xi, |xi|^2).
            if (params_.kinetic.moment_fix) {
                const int nb = d + 2;
                Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nb, nb);
                Eigen::VectorXd R = Eigen::VectorXd::Zero(nb), M = Eigen::VectorXd::Zero(nb);
                std::vector<std::array<double, 5>> phi(nv);
                for (std::size_t iv = 0; iv < nv; ++iv) {
                    const auto xi = g.velocity(iv);
                    phi[iv] = {1.0, 0, 0, 0, 0};
                    double v2 = 0.0;
                    for (int a = 0; a < d; ++a) {
                        phi[iv][a + 1] = xi[a];
                        v2 += xi[a] * xi[a];
                    }
                    phi[iv][d + 1] = v2;
                    const double fv = F(ix, iv, ir);
                    for (int a = 0; a < nb; ++a) {
                        M(a) += fv * phi[iv][a];
                        R(a) += lv[iv] * phi[iv][a];
                        for (int b = 0; b < nb; ++b) A(a, b) += fv * phi[iv][a] * phi[iv][b];
                    }
                }
                if (M(0) > 0.0) {
                    Eigen::VectorXd T = Eigen::VectorXd::Zero(nb);
                    double uM1 = 0.0;
                    for (int a = 0; a < d; ++a) {
                        T(a + 1) = (u(a, ix) * M(0) - M(a + 1)) / r2;
                        uM1 += u(a, ix) * M(a + 1);
                    }
                    T(d + 1) = 2.0 * (uM1 - M(d + 1)) / r2;
                    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
                    lu.setThreshold(1e-11);
                    if (lu.isInvertible()) {
                        const Eigen::VectorXd beta = lu.solve(T - R);
                        for (std::size_t iv = 0; iv < nv; ++iv) {
                            double s2 = 0.0;
                            for (int a = 0; a < nb; ++a) s2 += beta(a) * phi[iv][a];
                            lv[iv] += F(ix, iv, ir) * s2;
                        }
                    }
                }
            }
            for (std::size_t iv = 0; iv < nv; ++iv) df[g.index(ix, iv, ir)] = lv[iv];
        }

        // Free transport in x, upwind, periodic.
        for (std::size_t iv = 0; iv < nv; ++iv) {
            const auto xi = g.velocity(iv);
            for (int a = 0; a < d; ++a) {
                if (xi[a] == 0.0) continue;
                auto nbx = xidx;
                nbx[a] = (nbx[a] + (xi[a] > 0.0 ? -1 : 1) + nx) % nx;
                const std::size_t jx = g.flatten(nbx, nx);
                for (int ir = 0; ir < nr; ++ir) {
                    const double diff = xi[a] > 0.0 ? F(ix, iv, ir) - F(jx, iv, ir) : F(jx, iv, ir) - F(ix, iv, ir);
                    df[g.index(ix, iv, ir)] -= xi[a] * diff / dx;
                }
            }
            // Fragmentation.
            const double nu = params_.kernel.nu;
            if (nu != 0.0) {
                for (int i = 0; i < nr; ++i) {
                    double gain = 0.0;
                    for (int jr = 0; jr < nr; ++jr) gain += gain_[i * nr + jr] * F(ix, iv, jr);
                    df[g.index(ix, iv, i)] += nu * (gain - F(ix, iv, i));
                }
            }
        }
    }
}

coupling::CoupledState monolithic_trajectory(const coupling::CoupledState& s, const coupling::SimParams& params,
                                             const spectral::Basis& basis, double t_end, const OdeOptions& opt,
                                             OdeStats* stats) {
    const MonolithicSystem sys(params, basis, s.f.grid);
    const auto y = integrate([&](double t, const std::vector<double>& yy, std::vector<double>& dy) { sys.rhs(t, yy, dy); },
                             sys.pack(s), s.time, t_end, opt, stats);
    auto out = sys.unpack(y, t_end);
    out.step = s.step;
    return out;
}

}  // namespace nsvb::oracle
