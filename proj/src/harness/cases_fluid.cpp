// Fluid oracles: exact heat and transport solutions, single-mode symbols,
// dense direct-quadrature Galerkin assembly, the linear drag ODE and the
// acoustic dispersion relation.
#include "oracle_cases.hpp"

#include "nsvb/harness/run.hpp"
#include "nsvb/harness/scenario.hpp"

#include <Eigen/Eigenvalues>

namespace nsvb::harness::cases {

namespace {

using spectral::cplx;

// rho = 1 + sum_k a_k cos(k x + phi_k) for k = 1..kmax, on an n-point axis.
std::vector<double> band_limited_1d(int n, int kmax, double amp, std::mt19937_64& rng, std::vector<cplx>* hat) {
    std::uniform_real_distribution<double> U(0.0, 2.0 * kPi);
    std::vector<double> rho(n, 1.0);
    if (hat) hat->assign(n, 0.0);
    if (hat) (*hat)[0] = 1.0;
    for (int k = 1; k <= kmax; ++k) {
        const double a = amp / k, ph = U(rng);
        for (int i = 0; i < n; ++i) rho[i] += a * std::cos(k * 2.0 * kPi * i / n + ph);
        if (hat) {
            (*hat)[k] = 0.5 * a * std::polar(1.0, ph);
            (*hat)[n - k] = 0.5 * a * std::polar(1.0, -ph);
        }
    }
    return rho;
}

OracleOutcome pressure_pointwise(const SimConfig& cfg) {
    std::mt19937_64 rng(cfg.seed + 20);
    const auto rho = band_limited_1d(64, 5, 0.3, rng, nullptr);
    const auto p = fluid::pressure(rho, cfg.fluid);
    const double beta = cfg.fluid.beta_value();
    double err = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double ref = std::pow(rho[i], cfg.fluid.gamma) + cfg.fluid.delta * std::pow(rho[i], beta);
        err = std::max(err, std::abs(p[i] - ref) / ref);
    }
    return at_most(err, 4e-16);
}

OracleOutcome heat_kernel_decay(const SimConfig&) {
    const int n = 16;
    const spectral::Basis b(1, 4, 2.0 * kPi, n);
    fluid::FluidParams p;
    p.eps = 0.05;
    std::mt19937_64 rng(21);
    std::vector<cplx> hat;
    const auto rho = band_limited_1d(n, n / 2 - 1, 0.1, rng, &hat);
    const double dt = 0.1;
    const fluid::Coeffs u = fluid::Coeffs::Zero(static_cast<Eigen::Index>(b.size()), 1);
    const auto out = fluid::continuity_advance(b, p, rho, u, dt);
    const auto c = spectral::coefficients(1, n, out);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
        const int k = spectral::wavenumber(i, n);
        err = std::max(err, std::abs(c[i] - hat[i] * std::exp(-p.eps * k * k * dt)));
    }
    return at_most(err, 1e-12, "max over modes of |rho_k(dt) - exp(-eps k^2 dt) rho_k(0)|");
}

OracleOutcome translation_constant_u(const SimConfig&) {
    const int n = 16;
    const spectral::Basis b(1, 4, 2.0 * kPi, n);
    fluid::FluidParams p;
    std::mt19937_64 rng(22);
    std::vector<cplx> hat;
    auto rho = band_limited_1d(n, n / 2 - 1, 0.1, rng, &hat);
    const double U = 0.7, dt = 2e-3;
    const int steps = 50;
    fluid::Coeffs u = fluid::Coeffs::Zero(static_cast<Eigen::Index>(b.size()), 1);
    u(static_cast<Eigen::Index>(zero_mode(b)), 0) = U * b.norm();
    for (int s = 0; s < steps; ++s) rho = fluid::continuity_advance(b, p, rho, u, dt);
    // The interpolant shifted by U t, evaluated at the nodes.
    const double t = steps * dt;
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = 2.0 * kPi * i / n;
        cplx v = 0.0;
        for (int j = 0; j < n; ++j) v += hat[j] * std::polar(1.0, spectral::wavenumber(j, n) * (x - U * t));
        err = std::max(err, std::abs(rho[i] - v.real()));
    }
    return at_most(err, 1e-10, fmt("translation by %.3f", U * t));
}

OracleOutcome density_bounds_coupled(const SimConfig& cfg) {
    SimConfig c = cfg;
    if (c.fluid.eps <= 0.0) c.fluid.eps = 0.01;
    c.t_end = std::min(c.t_end, 50 * c.dt);
    const auto rep = run_simulation(c);
    const auto* inv = rep.invariant("density_bounds");
    if (!rep.completed || !inv) return at_least(-1.0, 0.0, "run failed: " + rep.error);
    auto o = at_least(inv->value, 0.0, inv->detail);
    o.passed = inv->passed && inv->value > 0.0;
    return o;
}

double inverse_difference_norm(const spectral::Basis& b, const std::vector<double>& r1, const std::vector<double>& r2) {
    const auto m1 = fluid::mass_matrix_build(r1, b), m2 = fluid::mass_matrix_build(r2, b);
    const Eigen::MatrixXcd d = m1.matrix.inverse() - m2.matrix.inverse();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

OracleOutcome mass_matrix_lipschitz(const SimConfig& cfg) {
    const int n = 16;
    const spectral::Basis b(1, 3, 2.0 * kPi, n);
    std::mt19937_64 rng(cfg.seed + 23);
    const auto r1 = random_density(1, n, 0.2, rng);
    auto dir = random_density(1, n, 1.0, rng);
    for (double& v : dir) v -= 1.0;
    std::vector<double> C;
    for (double eta : {0.1, 0.05, 0.025}) {
        std::vector<double> r2(r1);
        double l1 = 0.0;
        for (int i = 0; i < n; ++i) {
            r2[i] += eta * dir[i];
            l1 += std::abs(eta * dir[i]) * b.length() / n;
        }
        C.push_back(inverse_difference_norm(b, r1, r2) / l1);
    }
    const double drift = std::max(std::abs(C[1] / C[0] - 1.0), std::abs(C[2] / C[1] - 1.0));
    return at_most(drift, 0.2, fmt("C = %.4f %.4f %.4f", C[0], C[1], C[2]));
}

OracleOutcome momentum_rhs_single_mode(const SimConfig&) {
    const int n = 8, K = 2;
    const spectral::Basis b(2, K, 2.0 * kPi, n);
    fluid::FluidParams p;
    p.mu = 0.1;
    p.lambda = 0.05;
    p.eps = 0.02;
    p.delta = 0.01;
    const double rho0 = 1.3, n0 = 0.3;
    auto st = fluid::make_state(b, std::vector<double>(n * n, rho0));
    std::size_t m = 0;
    for (std::size_t i = 0; i < b.size(); ++i)
        if (b.mode(i) == std::array<int, 3>{K, 1, 0}) m = i;
    const cplx a(0.3, -0.1), c(-0.2, 0.25);
    st.u(static_cast<Eigen::Index>(m), 0) = a;
    st.u(static_cast<Eigen::Index>(m), 1) = c;
    st.u(static_cast<Eigen::Index>(b.mirror(m)), 0) = std::conj(a);
    st.u(static_cast<Eigen::Index>(b.mirror(m)), 1) = std::conj(c);
    const phase::ScalarField nf(n * n, n0);
    const phase::VectorField j(2, n * n, 0.0);
    const auto rhs = fluid::momentum_rhs(st, nf, j, p, b);
    fluid::Coeffs expect = fluid::Coeffs::Zero(rhs.rows(), 2);
    for (std::size_t q : {m, b.mirror(m)}) {
        const auto kap = b.kappa(q);
        const auto Q = static_cast<Eigen::Index>(q);
        const cplx kdotu = kap[0] * st.u(Q, 0) + kap[1] * st.u(Q, 1);
        for (int comp = 0; comp < 2; ++comp)
            expect(Q, comp) = -p.mu * b.kappa2(q) * st.u(Q, comp) - p.lambda * kap[comp] * kdotu - n0 * st.u(Q, comp);
    }
    const double err = (rhs - expect).cwiseAbs().maxCoeff() / expect.cwiseAbs().maxCoeff();
    return at_most(err, 1e-12, "mode (K, 1) in d = 2");
}

double galerkin_error(const SimConfig& cfg, int dim, int n, int K) {
    const spectral::Basis b(dim, K, cfg.grid.length, n);
    std::mt19937_64 rng(cfg.seed + 24 + dim);
    auto g = cfg.grid;
    g.dim = dim;
    g.n_x = n;
    if (dim > 1) {
        g.n_xi = std::min(g.n_xi, 8);
        g.n_r = std::min(g.n_r, 4);
    }
    const auto f = smooth_distribution(g, rng, 0.4);
    auto st = fluid::make_state(b, random_density(dim, n, dim > 1 ? 0.1 : 0.2, rng));
    st.u = random_velocity(b, 0.3, rng);
    const auto nf = phase::moment0(f);
    const auto j = phase::moment1(f);
    const auto fast = fluid::momentum_rhs(st, nf, j, cfg.fluid, b);
    const auto ref = oracle::dense_momentum_rhs(st.rho, st.u, nf, j, cfg.fluid, b);
    return (fast - ref).cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff());
}

OracleOutcome momentum_rhs_dense_galerkin(const SimConfig& cfg) {
    const int K = std::min(cfg.K, 3);
    const double e1 = galerkin_error(cfg, cfg.grid.dim, cfg.grid.n_x, K);
    const double e2 = galerkin_error(cfg, 2, std::max(4 * std::min(K, 2), 8), std::min(K, 2));
    return at_most(std::max(e1, e2), 1e-10, fmt("configured grid %.2e, d = 2 %.2e", e1, e2));
}

OracleOutcome pure_drag_relaxation(const SimConfig&) {
    const int n = 8;
    const spectral::Basis b(1, 2, 2.0 * kPi, n);
    fluid::FluidParams p;
    const double rho0 = 1.2, n0 = 0.6, target = 0.8, dt = 1e-3;
    auto st = fluid::make_state(b, std::vector<double>(n, rho0));
    const phase::ScalarField nf(n, n0);
    const phase::VectorField j(1, n, n0 * target);
    const auto drag = fluid::DragSource::frozen(nf, j);
    const auto z = static_cast<Eigen::Index>(zero_mode(b));
    double worst = 0.0;
    for (int s = 1; s <= 500; ++s) {
        st = fluid::momentum_step(st, drag, p, b, dt).state;
        const double u = st.u(z, 0).real() / b.norm();
        const double exact = target * (1.0 - std::exp(-n0 / rho0 * s * dt));
        worst = std::max(worst, std::abs(u - exact));
    }
    return at_most(worst, 1e-8, "u(t) against j/n + (u0 - j/n) exp(-n t / rho)");
}

OracleOutcome acoustic_frequency(const SimConfig&) {
    const SimConfig c = builtin_scenario("acoustic");
    const auto b = c.basis();
    auto p = c.fluid;
    p.eps = 0.0;
    p.delta = 0.0;
    p.lambda = 0.0;
    auto st = initial_state(c).fluid;
    const int n = c.grid.n_x;
    const auto drag = fluid::DragSource::none(b);
    double rho_bar = 0.0;
    for (double v : st.rho) rho_bar += v / n;
    std::vector<double> t{0.0}, a{spectral::coefficients(1, n, st.rho)[1].real()};
    const long steps = c.step_count();
    for (long s = 1; s <= steps; ++s) {
        st = fluid::momentum_step(st, drag, p, b, c.dt).state;
        t.push_back(s * c.dt);
        a.push_back(spectral::coefficients(1, n, st.rho)[1].real());
    }
    std::vector<double> zeros;
    for (std::size_t i = 1; i < a.size(); ++i)
        if ((a[i - 1] > 0.0) != (a[i] > 0.0)) zeros.push_back(t[i - 1] + (t[i] - t[i - 1]) * a[i - 1] / (a[i - 1] - a[i]));
    if (zeros.size() < 2) return at_most(1.0, 1e-3, "fewer than two zero crossings in one period");
    const double omega = kPi / (zeros[1] - zeros[0]);
    const double theory = p.gamma * std::pow(rho_bar, p.gamma - 1.0);
    return at_most(std::abs(omega * omega / theory - 1.0), 1e-3,
                   fmt("omega^2 = %.10f, linear theory %.10f", omega * omega, theory));
}

OracleOutcome mass_matrix_dense(const SimConfig& cfg) {
    const auto b = spectral::Basis(cfg.grid.dim, std::min(cfg.K, 3), cfg.grid.length, cfg.grid.n_x);
    std::mt19937_64 rng(cfg.seed + 25);
    const auto rho = random_density(cfg.grid.dim, cfg.grid.n_x, 0.2, rng);
    const auto G = fluid::gram_matrix(rho, b);
    const auto D = oracle::dense_gram(rho, b);
    return at_most((G - D).cwiseAbs().maxCoeff(), 1e-12, "collocation Gram matrix against direct sums");
}

OracleOutcome mass_matrix_bounds(const SimConfig& cfg) {
    const auto b = spectral::Basis(cfg.grid.dim, std::min(cfg.K, 3), cfg.grid.length, cfg.grid.n_x);
    std::mt19937_64 rng(cfg.seed + 26);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho = random_density(cfg.grid.dim, cfg.grid.n_x, cfg.grid.dim > 1 ? 0.1 : 0.3, rng);
        const auto mm = fluid::mass_matrix_build(rho, b);
        worst = std::max(worst, mm.min_rho - mm.min_eigenvalue);
    }
    const std::vector<double> flat(ipow(static_cast<std::size_t>(b.n_x()), b.dim()), 1.7);
    const auto mc = fluid::mass_matrix_build(flat, b);
    const double sat = std::abs(mc.inverse_norm() - 1.0 / 1.7);
    auto o = at_most(worst, 1e-10, fmt("worst min rho - lambda_min %.2e, constant density saturation %.2e", worst, sat));
    o.passed = o.passed && sat <= 1e-12;
    return o;
}

}  // namespace

std::vector<OracleCase> fluid_cases() {
    return {
        {"fluid.pressure_pointwise", "fluid", "pressure law against pointwise evaluation", pressure_pointwise},
        {"fluid.heat_kernel_decay", "fluid", "mode decay exp(-eps k^2 dt) at u = 0", heat_kernel_decay},
        {"fluid.translation_constant_u", "fluid", "transport by constant u translates the interpolant",
         translation_constant_u},
        {"fluid.density_bounds_coupled", "fluid", "density bounds with positive margin on a coupled run",
         density_bounds_coupled},
        {"fluid.mass_matrix_lipschitz", "fluid", "inverse mass matrix Lipschitz in rho, constant stable",
         mass_matrix_lipschitz},
        {"fluid.momentum_rhs_single_mode", "fluid", "single-mode symbol of viscosity and drag",
         momentum_rhs_single_mode},
        {"fluid.momentum_rhs_dense_galerkin", "fluid", "momentum right-hand side against dense quadrature",
         momentum_rhs_dense_galerkin},
        {"fluid.pure_drag_relaxation", "fluid", "velocity relaxation against the linear drag ODE",
         pure_drag_relaxation},
        {"fluid.acoustic_frequency", "fluid", "acoustic mode frequency against the linear dispersion relation",
         acoustic_frequency},
        {"fluid.mass_matrix_dense", "fluid", "Gram matrix against direct sums", mass_matrix_dense},
        {"fluid.mass_matrix_bounds", "fluid", "eigenvalue bound and constant-density saturation",
         mass_matrix_bounds},
    };
}

}  // namespace nsvb::harness::cases
