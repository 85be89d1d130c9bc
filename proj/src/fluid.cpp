#include "nsvb/fluid.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace nsvb::fluid {

using spectral::Basis;

double FluidParams::beta_value() const { return beta > 0.0 ? beta : std::max(gamma, 4.0) + 1.0; }

void FluidParams::validate() const {
    if (!std::isfinite(gamma) || !(gamma > 1.0)) throw ConfigError("gamma", "the pressure law needs gamma > 1");
    const double b = beta_value();
    if (!std::isfinite(b) || !(b > std::max(gamma, 4.0))) throw ConfigError("beta", "beta must exceed max(gamma, 4)");
    if (!std::isfinite(mu) || !(mu > 0.0)) throw ConfigError("mu", "viscosity mu must be positive");
    if (!std::isfinite(lambda) || !(lambda + mu / 3.0 >= 0.0))
        throw ConfigError("lambda", "lambda + mu/3 must be non-negative");
    if (!std::isfinite(eps) || eps < 0.0) throw ConfigError("eps", "eps must be non-negative");
    if (!std::isfinite(delta) || delta < 0.0) throw ConfigError("delta", "delta must be non-negative");
    if (!(rho_floor > 0.0)) throw ConfigError("rho_floor", "rho_floor must be positive");
    if (!(tol_picard > 0.0)) throw ConfigError("tol_picard", "tolerance must be positive");
    if (max_iter < 1) throw ConfigError("max_iter", "max_iter must be at least 1");
}

FluidState make_state(const Basis& basis, std::vector<double> rho) {
    FluidState s;
    s.rho = std::move(rho);
    s.u = Coeffs::Zero(static_cast<Eigen::Index>(basis.size()), basis.dim());
    return s;
}

namespace {

// kappa_a at every slot of an n^d FFT array.
std::vector<double> axis_wavenumbers(int dim, int n, double length, int a) {
    const std::size_t total = ipow(static_cast<std::size_t>(n), dim);
    std::vector<double> kv(total);
    std::size_t stride = ipow(static_cast<std::size_t>(n), dim - 1 - a);
    for (std::size_t i = 0; i < total; ++i) {
        const int idx = static_cast<int>((i / stride) % static_cast<std::size_t>(n));
        kv[i] = 2.0 * kPi * spectral::wavenumber(idx, n) / length;
    }
    return kv;
}

std::vector<double> squared_wavenumbers(int dim, int n, double length) {
    std::vector<double> k2(ipow(static_cast<std::size_t>(n), dim), 0.0);
    for (int a = 0; a < dim; ++a) {
        const auto kv = axis_wavenumbers(dim, n, length, a);
        for (std::size_t i = 0; i < k2.size(); ++i) k2[i] += kv[i] * kv[i];
    }
    return k2;
}

std::vector<cplx> derivative(std::span<const cplx> c, std::span<const double> kv) {
    std::vector<cplx> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = cplx(0.0, kv[i]) * c[i];
    return out;
}

std::vector<cplx> column(const Coeffs& u, int c) {
    return std::vector<cplx>(u.col(c).data(), u.col(c).data() + u.rows());
}

double cell_volume(const Basis& b) { return std::pow(b.length() / b.n_x(), b.dim()); }

void check_positive(std::span<const double> rho, double floor, const char* where) {
    for (double v : rho) {
        if (!std::isfinite(v)) throw PositivityError(std::string(where) + ": non-finite density");
        if (v <= floor) throw PositivityError(std::string(where) + ": density reached " + std::to_string(v));
    }
}

}  // namespace

std::vector<double> pressure(std::span<const double> rho, const FluidParams& params) {
    const double b = params.beta_value();
    std::vector<double> p(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!(rho[i] > 0.0)) throw PositivityError("pressure: non-positive density");
        p[i] = std::pow(rho[i], params.gamma) + (params.delta != 0.0 ? params.delta * std::pow(rho[i], b) : 0.0);
    }
    return p;
}

std::vector<double> continuity_advance(const Basis& basis, const FluidParams& params, std::span<const double> rho,
                                       const Coeffs& u, double dt) {
    if (!(dt > 0.0)) throw InputError("continuity: dt must be positive");
    const int d = basis.dim(), n = basis.n_x(), np = basis.n_pad();
    const double L = basis.length();

    std::vector<std::vector<double>> u_pad(d);
    double umax = 0.0;
    for (int c = 0; c < d; ++c) {
        u_pad[c] = basis.synthesize(column(u, c), np);
        for (double v : u_pad[c]) umax = std::max(umax, std::abs(v));
    }
    std::vector<std::vector<double>> kv(d);
    for (int a = 0; a < d; ++a) kv[a] = axis_wavenumbers(d, n, L, a);
    const auto k2 = squared_wavenumbers(d, n, L);

    const bool moving = umax > 0.0;
    auto advection = [&](const std::vector<cplx>& rh) {
        std::vector<cplx> out(rh.size(), 0.0);
        if (!moving) return out;
        const auto rho_pad = spectral::samples(d, np, spectral::resize(d, n, rh, np));
        std::vector<double> flux(rho_pad.size());
        for (int a = 0; a < d; ++a) {
            for (std::size_t i = 0; i < flux.size(); ++i) flux[i] = rho_pad[i] * u_pad[a][i];
            const auto fh = spectral::resize(d, np, spectral::coefficients(d, np, flux), n);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] -= cplx(0.0, kv[a][i]) * fh[i];
        }
        return out;
    };

    const double kmax = 2.0 * kPi * (n / 2) / L;
    const int n_sub = std::max(1, static_cast<int>(std::ceil(kmax * umax * dt / 1.0)));
    const double h = dt / n_sub;
    std::vector<double> e_half(k2.size()), e_full(k2.size());
    for (std::size_t i = 0; i < k2.size(); ++i) {
        e_half[i] = std::exp(-params.eps * k2[i] * 0.5 * h);
        e_full[i] = std::exp(-params.eps * k2[i] * h);
    }

    auto v = spectral::coefficients(d, n, rho);
    spectral::drop_nyquist(d, n, v);
    const std::size_t sz = v.size();
    std::vector<cplx> tmp(sz);
    for (int s = 0; s < n_sub; ++s) {
        const auto k1 = advection(v);
        for (std::size_t i = 0; i < sz; ++i) tmp[i] = e_half[i] * (v[i] + 0.5 * h * k1[i]);
        const auto k2v = advection(tmp);
        for (std::size_t i = 0; i < sz; ++i) tmp[i] = e_half[i] * v[i] + 0.5 * h * k2v[i];
        const auto k3 = advection(tmp);
        for (std::size_t i = 0; i < sz; ++i) tmp[i] = e_full[i] * v[i] + h * e_half[i] * k3[i];
        const auto k4 = advection(tmp);
        for (std::size_t i = 0; i < sz; ++i)
            v[i] = e_full[i] * v[i] +
                   h / 6.0 * (e_full[i] * k1[i] + 2.0 * e_half[i] * (k2v[i] + k3[i]) + k4[i]);
    }
    auto out = spectral::samples(d, n, v);
    check_positive(out, params.rho_floor, "continuity");
    return out;
}

std::vector<double> continuity_step(const FluidState& state, const Basis& basis, const FluidParams& params,
                                    double dt) {
    return continuity_advance(basis, params, state.rho, state.u, dt);
}

Eigen::MatrixXcd gram_matrix(std::span<const double> weight, const Basis& basis) {
    const int d = basis.dim(), n = basis.n_x();
    const auto wh = spectral::coefficients(d, n, weight);
    const auto m = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd G(m, m);
    for (Eigen::Index l = 0; l < m; ++l) {
        const auto& kl = basis.mode(static_cast<std::size_t>(l));
        for (Eigen::Index k = 0; k < m; ++k) {
            const auto& kk = basis.mode(static_cast<std::size_t>(k));
            std::size_t s = 0;
            for (int a = 0; a < d; ++a) s = s * n + static_cast<std::size_t>(((kl[a] - kk[a]) % n + n) % n);
            G(l, k) = wh[s];
        }
    }
    return G;
}

MassMatrix mass_matrix_build(std::span<const double> rho, const Basis& basis) {
    MassMatrix mm;
    mm.min_rho = *std::min_element(rho.begin(), rho.end());
    if (!(mm.min_rho > 0.0)) throw PositivityError("mass matrix: density must be positive");
    mm.matrix = gram_matrix(rho, basis);
    mm.ldlt.compute(mm.matrix);
    if (mm.ldlt.info() != Eigen::Success || !mm.ldlt.isPositive())
        throw SingularityError("mass matrix: factorization failed");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mm.matrix, Eigen::EigenvaluesOnly);
    mm.min_eigenvalue = es.eigenvalues().minCoeff();
    mm.max_eigenvalue = es.eigenvalues().maxCoeff();
    if (!(mm.min_eigenvalue > 0.0)) throw SingularityError("mass matrix: non-positive eigenvalue");
    return mm;
}

Coeffs nonlinear_rhs(std::span<const double> rho, const Coeffs& u, const FluidParams& params, const Basis& basis) {
    const int d = basis.dim(), n = basis.n_x(), np = basis.n_pad();
    const double L = basis.length(), s = basis.norm();
    const auto m = basis.size();
    Coeffs out = Coeffs::Zero(static_cast<Eigen::Index>(m), d);

    std::vector<std::array<double, 3>> kap(m);
    for (std::size_t i = 0; i < m; ++i) kap[i] = basis.kappa(i);

    // Pressure gradient from collocation values.
    const auto ph = spectral::coefficients(d, n, pressure(rho, params));
    for (std::size_t i = 0; i < m; ++i) {
        const cplx pk = ph[basis.slot(i, n)] * s;
        for (int c = 0; c < d; ++c) out(static_cast<Eigen::Index>(i), c) -= cplx(0.0, kap[i][c]) * pk;
    }

    if (u.cwiseAbs().maxCoeff() == 0.0) return out;

    auto rh = spectral::coefficients(d, n, rho);
    spectral::drop_nyquist(d, n, rh);
    const auto rho_pad = spectral::samples(d, np, spectral::resize(d, n, rh, np));
    std::vector<std::vector<double>> u_pad(d);
    for (int c = 0; c < d; ++c) u_pad[c] = basis.synthesize(column(u, c), np);

    // Convective flux -div(rho u (x) u).
    std::vector<double> t(rho_pad.size());
    for (int a = 0; a < d; ++a) {
        for (int b = a; b < d; ++b) {
            for (std::size_t i = 0; i < t.size(); ++i) t[i] = rho_pad[i] * u_pad[a][i] * u_pad[b][i];
            const auto th = spectral::coefficients(d, np, t);
            for (std::size_t i = 0; i < m; ++i) {
                const cplx tk = th[basis.slot(i, np)] * s;
                out(static_cast<Eigen::Index>(i), a) -= cplx(0.0, kap[i][b]) * tk;
                if (b != a) out(static_cast<Eigen::Index>(i), b) -= cplx(0.0, kap[i][a]) * tk;
            }
        }
    }

    // eps (grad rho . grad) u with the sign that closes the energy identity.
    if (params.eps != 0.0) {
        const double sign = params.inject_eps_sign_flip ? 1.0 : -1.0;
        std::vector<std::vector<double>> grad_rho(d);
        for (int a = 0; a < d; ++a) {
            const auto kv = axis_wavenumbers(d, n, L, a);
            grad_rho[a] = spectral::samples(d, np, spectral::resize(d, n, derivative(rh, kv), np));
        }
        std::vector<std::vector<double>> kv_pad(d);
        for (int a = 0; a < d; ++a) kv_pad[a] = axis_wavenumbers(d, np, L, a);
        std::vector<double> g(rho_pad.size());
        for (int c = 0; c < d; ++c) {
            const auto uh = basis.to_spectrum(column(u, c), np);
            std::fill(g.begin(), g.end(), 0.0);
            for (int a = 0; a < d; ++a) {
                const auto du = spectral::samples(d, np, derivative(uh, kv_pad[a]));
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += grad_rho[a][i] * du[i];
            }
            const auto pg = basis.project(g, np);
            for (std::size_t i = 0; i < m; ++i) out(static_cast<Eigen::Index>(i), c) += sign * params.eps * pg[i];
        }
    }
    return out;
}

Coeffs viscous_rhs(const Coeffs& u, const FluidParams& params, const Basis& basis) {
    const int d = basis.dim();
    Coeffs out = Coeffs::Zero(u.rows(), d);
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        const auto kv = basis.kappa(static_cast<std::size_t>(i));
        const double k2 = basis.kappa2(static_cast<std::size_t>(i));
        cplx kdotu = 0.0;
        for (int c = 0; c < d; ++c) kdotu += kv[c] * u(i, c);
        for (int c = 0; c < d; ++c) out(i, c) = -params.mu * k2 * u(i, c) - params.lambda * kv[c] * kdotu;
    }
    return out;
}

Coeffs drag_rhs(const phase::ScalarField& nf, const phase::VectorField& j, const Coeffs& u, const Basis& basis) {
    const int d = basis.dim(), n = basis.n_x();
    Coeffs out(static_cast<Eigen::Index>(basis.size()), d);
    std::vector<double> g(nf.size());
    for (int c = 0; c < d; ++c) {
        const auto uc = basis.synthesize(column(u, c), n);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = j(c, i) - nf[i] * uc[i];
        const auto pg = basis.project(g, n);
        for (std::size_t i = 0; i < pg.size(); ++i) out(static_cast<Eigen::Index>(i), c) = pg[i];
    }
    return out;
}

Coeffs momentum_rhs(const FluidState& state, const phase::ScalarField& nf, const phase::VectorField& j,
                    const FluidParams& params, const Basis& basis) {
    return nonlinear_rhs(state.rho, state.u, params, basis) + viscous_rhs(state.u, params, basis) +
           drag_rhs(nf, j, state.u, basis);
}

DragSource DragSource::frozen(const phase::ScalarField& nf, const phase::VectorField& j) {
    return DragSource{nf, nf, j, j};
}

DragSource DragSource::none(const Basis& basis) {
    const std::size_t cells = ipow(static_cast<std::size_t>(basis.n_x()), basis.dim());
    phase::ScalarField z(cells, 0.0);
    phase::VectorField jz(basis.dim(), cells);
    return DragSource{z, z, jz, jz};
}

MomentumStepResult momentum_step(const FluidState& state, const DragSource& drag, const FluidParams& params,
                                 const Basis& basis, double dt) {
    if (!(dt > 0.0)) throw InputError("momentum_step: dt must be positive");
    const int d = basis.dim();
    const auto m = static_cast<Eigen::Index>(basis.size());
    const Eigen::Index md = m * d;

    const Coeffs& u0 = state.u;
    const Coeffs mu0 = gram_matrix(state.rho, basis) * u0;
    const Coeffs explicit_part = 0.5 * viscous_rhs(u0, params, basis) + 0.5 * drag_rhs(drag.n_a, drag.j_a, u0, basis) +
                                 0.5 * drag_rhs(drag.n_b, drag.j_b, Coeffs::Zero(m, d), basis);

    // Implicit half of the viscous operator, block structure over components.
    Eigen::MatrixXcd visc = Eigen::MatrixXcd::Zero(md, md);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto kv = basis.kappa(static_cast<std::size_t>(i));
        const double k2 = basis.kappa2(static_cast<std::size_t>(i));
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                visc(a * m + i, b * m + i) = 0.5 * dt * ((a == b ? params.mu * k2 : 0.0) + params.lambda * kv[a] * kv[b]);
    }

    MomentumStepResult res;
    Coeffs u = u0;
    std::vector<double> rho_new;
    std::vector<double> w(state.rho.size());
    for (int it = 1; it <= params.max_iter; ++it) {
        const Coeffs u_mid = 0.5 * (u0 + u);
        rho_new = continuity_advance(basis, params, state.rho, u_mid, dt);
        std::vector<double> rho_mid(rho_new.size());
        for (std::size_t i = 0; i < rho_mid.size(); ++i) rho_mid[i] = 0.5 * (state.rho[i] + rho_new[i]);

        const Coeffs rhs = mu0 + dt * (nonlinear_rhs(rho_mid, u_mid, params, basis) + explicit_part);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = rho_new[i] + 0.5 * dt * drag.n_b[i];
        const Eigen::MatrixXcd G = gram_matrix(w, basis);
        Eigen::MatrixXcd A = visc;
        for (int c = 0; c < d; ++c) A.block(c * m, c * m, m, m) += G;
        Eigen::LDLT<Eigen::MatrixXcd> ldlt(A);
        if (ldlt.info() != Eigen::Success) throw SingularityError("momentum_step: system factorization failed");
        const Eigen::VectorXcd sol = ldlt.solve(Eigen::Map<const Eigen::VectorXcd>(rhs.data(), md));
        Coeffs u_new = Eigen::Map<const Coeffs>(sol.data(), m, d);
        if (!u_new.allFinite()) throw ConvergenceError("momentum_step: non-finite Picard iterate", it);

        const double change = (u_new - u).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, u_new.cwiseAbs().maxCoeff());
        u = std::move(u_new);
        res.iterations = it;
        res.last_update = change;
        if (change <= params.tol_picard * scale) {
            res.state.time = state.time + dt;
            res.state.rho = continuity_advance(basis, params, state.rho, 0.5 * (u0 + u), dt);
            res.state.u = u;
            return res;
        }
    }
    throw ConvergenceError("momentum_step: Picard iteration did not converge (last update " +
                               std::to_string(res.last_update) + ")",
                           params.max_iter);
}

phase::VectorField velocity_samples(const Coeffs& u, const Basis& basis, int n) {
    const std::size_t cells = ipow(static_cast<std::size_t>(n), basis.dim());
    phase::VectorField v(basis.dim(), cells);
    for (int c = 0; c < basis.dim(); ++c) {
        const auto s = basis.synthesize(column(u, c), n);
        std::copy(s.begin(), s.end(), v.data.begin() + static_cast<std::ptrdiff_t>(c * cells));
    }
    return v;
}

double fluid_mass(std::span<const double> rho, const Basis& basis) { return pairwise_sum(rho) * cell_volume(basis); }

std::array<double, 3> fluid_momentum(const FluidState& s, const Basis& basis) {
    const auto v = velocity_samples(s.u, basis, basis.n_x());
    std::array<double, 3> p{0, 0, 0};
    std::vector<double> t(s.rho.size());
    for (int c = 0; c < basis.dim(); ++c) {
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = s.rho[i] * v(c, i);
        p[c] = pairwise_sum(t) * cell_volume(basis);
    }
    return p;
}

double kinetic_energy(const FluidState& s, const Basis& basis) {
    const auto v = velocity_samples(s.u, basis, basis.n_x());
    std::vector<double> t(s.rho.size(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        double v2 = 0.0;
        for (int c = 0; c < basis.dim(); ++c) v2 += v(c, i) * v(c, i);
        t[i] = 0.5 * s.rho[i] * v2;
    }
    return pairwise_sum(t) * cell_volume(basis);
}

double internal_energy(std::span<const double> rho, const FluidParams& params, const Basis& basis) {
    const double g = params.gamma, b = params.beta_value();
    std::vector<double> t(rho.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = std::pow(rho[i], g) / (g - 1.0);
        if (params.delta != 0.0) t[i] += params.delta * std::pow(rho[i], b) / (b - 1.0);
    }
    return pairwise_sum(t) * cell_volume(basis);
}

DissipationRates dissipation_rates(std::span<const double> rho, const Coeffs& u, const FluidParams& params,
                                   const Basis& basis) {
    DissipationRates r;
    const int d = basis.dim();
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        const auto kv = basis.kappa(static_cast<std::size_t>(i));
        const double k2 = basis.kappa2(static_cast<std::size_t>(i));
        cplx div = 0.0;
        for (int c = 0; c < d; ++c) {
            r.viscous_mu += k2 * std::norm(u(i, c));
            div += kv[c] * u(i, c);
        }
        r.viscous_lambda += std::norm(div);
    }
    r.viscous_mu *= params.mu;
    r.viscous_lambda *= params.lambda;

    if (params.eps != 0.0) {
        const int n = basis.n_x();
        auto rh = spectral::coefficients(d, n, rho);
        spectral::drop_nyquist(d, n, rh);
        std::vector<double> g2(rho.size(), 0.0);
        for (int a = 0; a < d; ++a) {
            const auto kv = axis_wavenumbers(d, n, basis.length(), a);
            const auto ga = spectral::samples(d, n, derivative(rh, kv));
            for (std::size_t i = 0; i < g2.size(); ++i) g2[i] += ga[i] * ga[i];
        }
        const double g = params.gamma, b = params.beta_value();
        for (std::size_t i = 0; i < g2.size(); ++i) {
            double w = g * std::pow(rho[i], g - 2.0);
            if (params.delta != 0.0) w += params.delta * b * std::pow(rho[i], b - 2.0);
            g2[i] *= w;
        }
        r.eps_density = params.eps * pairwise_sum(g2) * cell_volume(basis);
    }
    return r;
}

double max_divergence(const Coeffs& u, const Basis& basis) {
    const int d = basis.dim();
    std::vector<cplx> div(basis.size(), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto kv = basis.kappa(i);
        for (int c = 0; c < d; ++c) div[i] += cplx(0.0, kv[c]) * u(static_cast<Eigen::Index>(i), c);
    }
    const auto s = basis.synthesize(div, basis.n_pad());
    double mx = 0.0;
    for (double v : s) mx = std::max(mx, std::abs(v));
    return mx;
}

DensityBoundsReport density_bounds_check(std::span<const FluidState> history, const Basis& basis) {
    DensityBoundsReport rep;
    if (history.empty()) return rep;
    const auto& first = history.front().rho;
    rep.rho_lower = *std::min_element(first.begin(), first.end());
    rep.rho_upper = *std::max_element(first.begin(), first.end());
    rep.lower_margin = std::numeric_limits<double>::infinity();
    rep.upper_margin = std::numeric_limits<double>::infinity();
    double D = 0.0;
    double prev_div = max_divergence(history.front().u, basis);
    for (std::size_t t = 0; t < history.size(); ++t) {
        if (t > 0) {
            const double cur = max_divergence(history[t].u, basis);
            D += 0.5 * (history[t].time - history[t - 1].time) * (prev_div + cur);
            prev_div = cur;
        }
        rep.divergence_integral.push_back(D);
        // The first snapshot defines the bounds; margins are measured after it.
        if (t == 0 && history.size() > 1) continue;
        const auto& r = history[t].rho;
        const double lo = *std::min_element(r.begin(), r.end());
        const double hi = *std::max_element(r.begin(), r.end());
        rep.lower_margin = std::min(rep.lower_margin, lo - rep.rho_lower * std::exp(-D));
        rep.upper_margin = std::min(rep.upper_margin, rep.rho_upper * std::exp(D) - hi);
    }
    const double slack = 1e-12 * rep.rho_upper;
    rep.passed = rep.lower_margin >= -slack && rep.upper_margin >= -slack;
    return rep;
}

}  // namespace nsvb::fluid
