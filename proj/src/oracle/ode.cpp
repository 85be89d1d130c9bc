#include "nsvb/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace nsvb::oracle {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

}  // namespace

std::vector<double> integrate(const OdeRhs& rhs, std::vector<double> y, double t0, double t1, const OdeOptions& opt,
                              OdeStats* stats) {
    const std::size_t n = y.size();
    if (t1 == t0 || n == 0) return y;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n);

    auto err_norm = [&](const std::vector<double>& yn, const std::vector<double>& e) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(yn[i]));
            s += (e[i] / sc) * (e[i] / sc);
        }
        return std::sqrt(s / static_cast<double>(n));
    };

    double t = t0;
    rhs(t, y, k1);
    double h = opt.h0;
    if (h <= 0.0) {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1 += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / n);
        d1 = std::sqrt(d1 / n);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    }
    h = std::min(h, std::abs(t1 - t0));

    double err_prev = 1e-4;
    long steps = 0;
    std::vector<double> e(n);
    while (dir * (t1 - t) > 0.0) {
        if (++steps > opt.max_steps) throw ConvergenceError("ode oracle: step budget exhausted", static_cast<int>(steps));
        if (h < 1e-15 * std::max(1.0, std::abs(t))) throw ConvergenceError("ode oracle: step size underflow", 0);
        const bool last = h >= std::abs(t1 - t);
        if (last) h = std::abs(t1 - t);
        const double hs = dir * h;

        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
        rhs(t + c2 * hs, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * hs, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * hs, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * hs, tmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + hs, tmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            y5[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + hs, y5, k7);
        for (std::size_t i = 0; i < n; ++i)
            e[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double err = err_norm(y5, e);

        if (err <= 1.0 && std::isfinite(err)) {
            t = last ? t1 : t + hs;
            y.swap(y5);
            k1.swap(k7);
            if (stats) ++stats->accepted;
            const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
            h *= std::clamp(fac, 0.2, 5.0);
            err_prev = std::max(err, 1e-4);
        } else {
            if (stats) ++stats->rejected;
            h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.1;
        }
    }
    return y;
}

}  // namespace nsvb::oracle
