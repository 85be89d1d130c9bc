#include "nsvb/oracle.hpp"

#include <cmath>

namespace nsvb::oracle {

using spectral::cplx;

namespace {

using Wave = std::array<int, 3>;

// A trigonometric polynomial sum_k c_k exp(i kappa_k . x).
struct TrigPoly {
    std::vector<Wave> k;
    std::vector<cplx> c;
};

std::vector<Wave> lattice(int dim, int n) {
    std::vector<Wave> out;
    const std::size_t total = ipow(static_cast<std::size_t>(n), dim);
    for (std::size_t flat = 0; flat < total; ++flat) {
        Wave w{0, 0, 0};
        std::size_t r = flat;
        for (int a = dim - 1; a >= 0; --a) {
            w[a] = static_cast<int>(r % static_cast<std::size_t>(n));
            r /= static_cast<std::size_t>(n);
        }
        out.push_back(w);
    }
    return out;
}

std::array<double, 3> node(const Wave& idx, int dim, int n, double L) {
    std::array<double, 3> x{0, 0, 0};
    for (int a = 0; a < dim; ++a) x[a] = idx[a] * L / n;
    return x;
}

double phase_of(const Wave& k, const std::array<double, 3>& x, int dim, double L) {
    double p = 0.0;
    for (int a = 0; a < dim; ++a) p += 2.0 * kPi * k[a] / L * x[a];
    return p;
}

cplx eval(const TrigPoly& p, const std::array<double, 3>& x, int dim, double L) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < p.k.size(); ++i) s += p.c[i] * std::polar(1.0, phase_of(p.k[i], x, dim, L));
    return s;
}

// d/dx_a of p.
TrigPoly derive(const TrigPoly& p, int a, double L) {
    TrigPoly q = p;
    for (std::size_t i = 0; i < q.k.size(); ++i) q.c[i] *= cplx(0.0, 2.0 * kPi * q.k[i][a] / L);
    return q;
}

// Interpolant of nodal samples with |k_a| < n/2 by explicit DFT sums.
TrigPoly interpolant(int dim, int n, double L, std::span<const double> samples) {
    const auto nodes = lattice(dim, n);
    TrigPoly p;
    const double inv = 1.0 / static_cast<double>(nodes.size());
    for (const auto& s : nodes) {
        Wave k{0, 0, 0};
        bool nyquist = false;
        for (int a = 0; a < dim; ++a) {
            k[a] = s[a] <= n / 2 ? s[a] : s[a] - n;
            if (2 * k[a] == n) nyquist = true;
        }
        if (nyquist) continue;
        cplx c = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            c += samples[i] * std::polar(1.0, -phase_of(k, node(nodes[i], dim, n, L), dim, L));
        p.k.push_back(k);
        p.c.push_back(c * inv);
    }
    return p;
}

TrigPoly velocity_poly(const fluid::Coeffs& u, int c, const spectral::Basis& b) {
    TrigPoly p;
    for (std::size_t m = 0; m < b.size(); ++m) {
        p.k.push_back(b.mode(m));
        p.c.push_back(u(static_cast<Eigen::Index>(m), c) / b.norm());
    }
    return p;
}

// Uniform quadrature grid fine enough to integrate the products exactly.
struct Fine {
    int dim;
    int M;
    double L;
    std::vector<std::array<double, 3>> pts;
    double w;
};

Fine fine_grid(const spectral::Basis& b) {
    Fine f{b.dim(), b.n_x() + 4 * b.cutoff() + 2, b.length(), {}, 0.0};
    for (const auto& idx : lattice(f.dim, f.M)) f.pts.push_back(node(idx, f.dim, f.M, f.L));
    f.w = std::pow(f.L / f.M, f.dim);
    return f;
}

std::vector<double> sample(const TrigPoly& p, const Fine& g) {
    std::vector<double> v(g.pts.size());
    for (std::size_t q = 0; q < v.size(); ++q) v[q] = eval(p, g.pts[q], g.dim, g.L).real();
    return v;
}

// <g, e_l> on the fine grid.
cplx inner(const std::vector<double>& g, const Fine& fg, const Wave& l, double norm) {
    cplx s = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) s += g[q] * std::polar(1.0, -phase_of(l, fg.pts[q], fg.dim, fg.L));
    return s * fg.w / norm;
}

}  // namespace

std::vector<cplx> direct_dft(int dim, int n, std::span<const double> samples) {
    const auto p = interpolant(dim, n, 2.0 * kPi, samples);
    std::vector<cplx> out(ipow(static_cast<std::size_t>(n), dim), 0.0);
    for (std::size_t i = 0; i < p.k.size(); ++i) {
        std::size_t s = 0;
        for (int a = 0; a < dim; ++a) s = s * n + static_cast<std::size_t>((p.k[i][a] + n) % n);
        out[s] = p.c[i];
    }
    return out;
}

Eigen::MatrixXcd dense_gram(std::span<const double> rho, const spectral::Basis& b) {
    const int d = b.dim(), n = b.n_x();
    const auto nodes = lattice(d, n);
    const double dv = std::pow(b.length() / n, d) / b.volume();
    const auto m = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(m, m);
    for (Eigen::Index l = 0; l < m; ++l)
        for (Eigen::Index k = 0; k < m; ++k) {
            cplx s = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                const auto x = node(nodes[i], d, n, b.length());
                s += rho[i] * std::polar(1.0, phase_of(b.mode(k), x, d, b.length()) -
                                                  phase_of(b.mode(l), x, d, b.length()));
            }
            G(l, k) = s * dv;
        }
    return G;
}

fluid::Coeffs dense_momentum_rhs(std::span<const double> rho, const fluid::Coeffs& u, const phase::ScalarField& nf,
                                 const phase::VectorField& j, const fluid::FluidParams& params,
                                 const spectral::Basis& b) {
    const int d = b.dim(), n = b.n_x();
    const double L = b.length(), nrm = b.norm();
    const Fine fg = fine_grid(b);

    const auto rp = interpolant(d, n, L, rho);
    const auto pp = interpolant(d, n, L, fluid::pressure(rho, params));
    const auto rs = sample(rp, fg);
    std::vector<std::vector<double>> us(d), grad_r(d), grad_p(d);
    std::vector<std::vector<std::vector<double>>> grad_u(d, std::vector<std::vector<double>>(d));
    for (int a = 0; a < d; ++a) {
        us[a] = sample(velocity_poly(u, a, b), fg);
        grad_r[a] = sample(derive(rp, a, L), fg);
        grad_p[a] = sample(derive(pp, a, L), fg);
        for (int c = 0; c < d; ++c) grad_u[c][a] = sample(derive(velocity_poly(u, c, b), a, L), fg);
    }
    std::vector<double> div(fg.pts.size(), 0.0);
    for (int a = 0; a < d; ++a)
        for (std::size_t q = 0; q < div.size(); ++q) div[q] += grad_u[a][a][q];

    const auto m = static_cast<Eigen::Index>(b.size());
    fluid::Coeffs out = fluid::Coeffs::Zero(m, d);
    std::vector<double> g(fg.pts.size());
    for (Eigen::Index l = 0; l < m; ++l) {
        const auto& kl = b.mode(static_cast<std::size_t>(l));
        const auto kap = b.kappa(static_cast<std::size_t>(l));
        for (int c = 0; c < d; ++c) {
            // Pressure and eps terms tested directly against e_l.
            for (std::size_t q = 0; q < g.size(); ++q) {
                double gr = 0.0;
                for (int a = 0; a < d; ++a) gr += grad_r[a][q] * grad_u[c][a][q];
                g[q] = -grad_p[c][q] - params.eps * gr;
            }
            cplx v = inner(g, fg, kl, nrm);
            // Flux terms moved onto the test function: <T, d_b e_l> = -i kappa_b <T, e_l>.
            for (int bb = 0; bb < d; ++bb) {
                for (std::size_t q = 0; q < g.size(); ++q) g[q] = rs[q] * us[c][q] * us[bb][q];
                v += cplx(0.0, -kap[bb]) * inner(g, fg, kl, nrm);
                for (std::size_t q = 0; q < g.size(); ++q) g[q] = params.mu * grad_u[c][bb][q];
                v -= cplx(0.0, -kap[bb]) * inner(g, fg, kl, nrm);
            }
            for (std::size_t q = 0; q < g.size(); ++q) g[q] = params.lambda * div[q];
            v -= cplx(0.0, -kap[c]) * inner(g, fg, kl, nrm);
            out(l, c) = v;
        }
    }

    // Drag by the collocation sum on the n grid.
    const auto nodes = lattice(d, n);
    const double dv = std::pow(L / n, d) / nrm;
    for (int c = 0; c < d; ++c) {
        const auto up = velocity_poly(u, c, b);
        std::vector<double> src(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i)
            src[i] = j(c, i) - nf[i] * eval(up, node(nodes[i], d, n, L), d, L).real();
        for (Eigen::Index l = 0; l < m; ++l) {
            cplx s = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i)
                s += src[i] * std::polar(1.0, -phase_of(b.mode(static_cast<std::size_t>(l)),
                                                         node(nodes[i], d, n, L), d, L));
            out(l, c) += s * dv;
        }
    }
    return out;
}

std::vector<double> dense_continuity_rhs(std::span<const double> rho, const fluid::Coeffs& u,
                                         const fluid::FluidParams& params, const spectral::Basis& b) {
    const int d = b.dim(), n = b.n_x();
    const double L = b.length();
    const Fine fg = fine_grid(b);
    const auto rp = interpolant(d, n, L, rho);
    const auto rs = sample(rp, fg);
    std::vector<std::vector<double>> flux(d);
    for (int a = 0; a < d; ++a) {
        flux[a] = sample(velocity_poly(u, a, b), fg);
        for (std::size_t q = 0; q < rs.size(); ++q) flux[a][q] *= rs[q];
    }
    // Spectral representation of d rho/dt restricted to the modes of rho.
    TrigPoly rate;
    const double vol = b.volume();
    for (std::size_t i = 0; i < rp.k.size(); ++i) {
        const auto& k = rp.k[i];
        cplx v = 0.0;
        double k2 = 0.0;
        for (int a = 0; a < d; ++a) {
            const double ka = 2.0 * kPi * k[a] / L;
            k2 += ka * ka;
            cplx fh = 0.0;
            for (std::size_t q = 0; q < rs.size(); ++q) fh += flux[a][q] * std::polar(1.0, -phase_of(k, fg.pts[q], d, L));
            fh *= fg.w / vol;
            v -= cplx(0.0, ka) * fh;
        }
        v -= params.eps * k2 * rp.c[i];
        rate.k.push_back(k);
        rate.c.push_back(v);
    }
    const auto nodes = lattice(d, n);
    std::vector<double> out(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = eval(rate, node(nodes[i], d, n, L), d, L).real();
    return out;
}

}  // namespace nsvb::oracle
