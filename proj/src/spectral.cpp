#include "nsvb/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

namespace nsvb::spectral {

namespace {

// FFTW planning is not thread-safe; execution through the new-array interface is.
std::mutex g_plan_mutex;

fftw_plan cached_plan(int dim, int n, int sign) {
    static std::map<std::tuple<int, int, int>, fftw_plan> plans;
    std::lock_guard lock(g_plan_mutex);
    auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    const std::size_t total = ipow(static_cast<std::size_t>(n), dim);
    fftw_complex* buf = fftw_alloc_complex(total);
    int dims[3] = {n, n, n};
    // ESTIMATE keeps the algorithm choice deterministic from run to run.
    fftw_plan p = fftw_plan_dft(dim, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw Error("fftw: failed to create plan");
    plans.emplace(key, p);
    return p;
}

void run(int dim, int n, int sign, std::span<const cplx> in, std::span<cplx> out) {
    const std::size_t total = ipow(static_cast<std::size_t>(n), dim);
    if (in.size() != total || out.size() != total) throw InputError("fft: buffer size does not match grid");
    if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
    auto* p = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(cached_plan(dim, n, sign), p, p);
}

std::array<int, 3> unflat(std::size_t flat, int dim, int n) {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % static_cast<std::size_t>(n));
        flat /= static_cast<std::size_t>(n);
    }
    return idx;
}

std::size_t flat_slot(const std::array<int, 3>& k, int dim, int n) {
    std::size_t s = 0;
    for (int a = 0; a < dim; ++a) s = s * static_cast<std::size_t>(n) + static_cast<std::size_t>(fft_slot(k[a], n));
    return s;
}

}  // namespace

void fft_forward(int dim, int n, std::span<const cplx> in, std::span<cplx> out) { run(dim, n, FFTW_FORWARD, in, out); }

void fft_backward(int dim, int n, std::span<const cplx> in, std::span<cplx> out) { run(dim, n, FFTW_BACKWARD, in, out); }

std::vector<cplx> coefficients(int dim, int n, std::span<const double> g) {
    std::vector<cplx> c(g.begin(), g.end());
    fft_forward(dim, n, c, c);
    const double inv = 1.0 / static_cast<double>(c.size());
    for (auto& v : c) v *= inv;
    return c;
}

std::vector<double> samples(int dim, int n, std::span<const cplx> coeffs) {
    std::vector<cplx> c(coeffs.begin(), coeffs.end());
    fft_backward(dim, n, c, c);
    std::vector<double> g(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) g[i] = c[i].real();
    return g;
}

void drop_nyquist(int dim, int n, std::span<cplx> coeffs) {
    if (n % 2 != 0) return;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const auto idx = unflat(i, dim, n);
        for (int a = 0; a < dim; ++a)
            if (idx[a] == n / 2) {
                coeffs[i] = 0.0;
                break;
            }
    }
}

std::vector<cplx> resize(int dim, int n_from, std::span<const cplx> coeffs, int n_to) {
    std::vector<cplx> out(ipow(static_cast<std::size_t>(n_to), dim), 0.0);
    const int lim = (std::min(n_from, n_to) - 1) / 2;  // strict interior of both grids
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const auto idx = unflat(i, dim, n_from);
        std::array<int, 3> k{0, 0, 0};
        bool keep = true;
        for (int a = 0; a < dim; ++a) {
            k[a] = wavenumber(idx[a], n_from);
            if (std::abs(k[a]) > lim || (n_from % 2 == 0 && idx[a] == n_from / 2)) keep = false;
        }
        if (keep) out[flat_slot(k, dim, n_to)] = coeffs[i];
    }
    return out;
}

int padded_size(int n_x, int K) {
    int n = std::max({(3 * n_x + 1) / 2, n_x / 2 + 3 * K + 1, n_x + K});
    return n + (n % 2);
}

Basis::Basis(int dim, int K, double length, int n_x)
    : dim_(dim), K_(K), length_(length), n_x_(n_x), n_pad_(padded_size(n_x, K)) {
    if (dim < 1 || dim > 3) throw InputError("basis: dim must be 1, 2 or 3");
    if (K < 0) throw InputError("basis: K must be non-negative");
    if (n_x < 4 * K || n_x < 2) throw InputError("basis: n_x must be at least 4K");
    const int side = 2 * K + 1;
    const std::size_t count = ipow(static_cast<std::size_t>(side), dim);
    modes_.resize(count);
    for (std::size_t m = 0; m < count; ++m) {
        const auto idx = unflat(m, dim, side);
        std::array<int, 3> k{0, 0, 0};
        for (int a = 0; a < dim; ++a) k[a] = idx[a] - K;
        modes_[m] = k;
    }
}

std::array<double, 3> Basis::kappa(std::size_t m) const {
    std::array<double, 3> kv{0, 0, 0};
    for (int a = 0; a < dim_; ++a) kv[a] = 2.0 * kPi * modes_[m][a] / length_;
    return kv;
}

double Basis::kappa2(std::size_t m) const {
    const auto kv = kappa(m);
    return kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
}

std::size_t Basis::slot(std::size_t m, int n) const { return flat_slot(modes_[m], dim_, n); }

double Basis::volume() const { return std::pow(length_, dim_); }

std::vector<cplx> Basis::project(std::span<const double> g, int n) const {
    return project_spectrum(coefficients(dim_, n, g), n);
}

std::vector<cplx> Basis::project_spectrum(std::span<const cplx> ghat, int n) const {
    std::vector<cplx> c(size());
    const double s = norm();
    for (std::size_t m = 0; m < size(); ++m) c[m] = ghat[slot(m, n)] * s;
    return c;
}

std::vector<cplx> Basis::to_spectrum(std::span<const cplx> c, int n) const {
    std::vector<cplx> ghat(ipow(static_cast<std::size_t>(n), dim_), 0.0);
    const double s = 1.0 / norm();
    for (std::size_t m = 0; m < size(); ++m) ghat[slot(m, n)] += c[m] * s;
    return ghat;
}

std::vector<double> Basis::synthesize(std::span<const cplx> c, int n) const {
    return samples(dim_, n, to_spectrum(c, n));
}

}  // namespace nsvb::spectral
