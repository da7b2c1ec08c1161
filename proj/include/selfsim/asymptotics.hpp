#pragma once

#include <complex>
#include <limits>
#include <vector>

#include "selfsim/gammafn.hpp"
#include "selfsim/greens.hpp"
#include "selfsim/oracle.hpp"

namespace selfsim {

/// Fourier data of omega and sigma with the propagated error budget. Indexing
/// is symmetric: coefficient k for |k| <= fourier_k.
struct AsymptoticProfile {
    int fourier_k = 0;
    std::vector<std::complex<double>> omega_hat; // position k + fourier_k
    std::vector<std::complex<double>> sigma_hat;
    double d_s = 0.0;
    double tau = 0.0;
    int mu = 0;
    bool bipartite = false;
    double strip_half_width = 0.0; // pi / log(tau)

    // additive error budget
    double sample_error = 0.0;
    double aliasing_bound = 0.0;
    double dft_roundoff = 0.0;
    double fourier_tail = 0.0;          // sigma-side: discarded-coefficient tail
    double sigma_transfer_error = 0.0;  // sigma-side: noise through 1/Gamma on kept terms
    double gamma_error = 0.0;
    double conj_defect = 0.0;  // pre-enforcement conjugate-symmetry defect
    int k_effective = 0;       // largest k resolved above the noise floor

    /// resolution budget of the omega coefficients themselves
    double error_budget() const {
        return sample_error + aliasing_bound + dft_roundoff + gamma_error;
    }
    /// accuracy of sigma(t) evaluations
    double sigma_budget() const {
        return sigma_transfer_error + fourier_tail + gamma_error;
    }

    std::complex<double> omega_at(int k) const { return omega_hat[k + fourier_k]; }
    std::complex<double> sigma_at(int k) const { return sigma_hat[k + fourier_k]; }

    /// sigma(t): truncated Fourier sum; real by conjugate symmetry
    double sigma(double t) const {
        double acc = sigma_at(0).real();
        for (int k = 1; k <= fourier_k; ++k) {
            std::complex<double> rot(std::cos(2.0 * M_PI * k * t), std::sin(2.0 * M_PI * k * t));
            acc += 2.0 * (sigma_at(k) * rot).real();
        }
        return acc;
    }
};

/// Discrete Fourier transform of the omega samples over one exact period.
/// Needs at least 4K samples; conjugate symmetry is enforced by averaging.
inline AsymptoticProfile fourier_omega(const OmegaProfile& prof, const ScalingParams& sp, int K) {
    const int M = prof.samples;
    if (M < 4 * K) throw StructureError("need at least 4K samples for K Fourier coefficients");
    AsymptoticProfile out;
    out.fourier_k = K;
    out.bipartite = prof.bipartite;
    out.tau = prof.tau_d;
    out.mu = sp.mu;
    out.d_s = sp.spectral_dim;
    out.strip_half_width = M_PI / std::log(out.tau);
    out.sample_error = prof.sample_error;

    // samples sit at t = -(T + j/M); with integer T the phases reduce to
    // e^(2 pi i k j / M)
    out.omega_hat.assign(2 * K + 1, {0.0, 0.0});
    for (int k = -K; k <= K; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (int j = 0; j < M; ++j) {
            double ph = 2.0 * M_PI * k * j / M;
            acc += prof.omega_d[j] * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        out.omega_hat[k + K] = acc / static_cast<double>(M);
    }
    for (int k = 1; k <= K; ++k) {
        std::complex<double> a = out.omega_at(k), b = std::conj(out.omega_at(-k));
        out.conj_defect = std::max(out.conj_defect, std::abs(a - b));
        std::complex<double> avg = 0.5 * (a + b);
        out.omega_hat[K + k] = avg;
        out.omega_hat[K - k] = std::conj(avg);
    }
    out.omega_hat[K].imag(0.0);

    // aliasing: the strip decay |omega_hat(m)| <= C exp(-2 pi |m| b) folded
    // back onto |k| <= K, with b backed off for safety
    double b = 0.8 * out.strip_half_width;
    double cbound = 0.0;
    for (double v : prof.omega_d) cbound = std::max(cbound, std::abs(v));
    cbound += prof.sample_error;
    double q = std::exp(-2.0 * M_PI * b);
    out.aliasing_bound = 2.0 * cbound * std::pow(q, M - K) / (1.0 - q);
    out.dft_roundoff = 16.0 * std::numeric_limits<double>::epsilon() * M * cbound;
    return out;
}

/// Transfer of the singular expansion to coefficient asymptotics. With the
/// transform convention f(t) = sum_k f_hat(k) e^(2 pi i k t), f_hat(k) =
/// integral of f e^(-2 pi i k t), the k-th harmonic (1-z)^(alpha + 2 pi i
/// k/log tau) contributes n^(-d_s/2) e^(-2 pi i k t_n) / Gamma(1 - (log mu -
/// 2 k pi i)/log tau), so
///     sigma_hat(k) = omega_hat(-k) / Gamma(1 - (log mu - 2 k pi i)/log tau);
/// in the conjugate convention the Gamma argument flips to log mu + 2 k pi i.
/// 1/Gamma grows like exp(pi^2 |k| / log tau) along the transfer line, so
/// omega coefficients below the resolution floor are discarded before the
/// division; the discarded true tail is estimated from the strip decay
/// calibrated at the last resolved coefficient.
inline void sigma_from_omega(AsymptoticProfile& p) {
    const int K = p.fourier_k;
    p.sigma_hat.assign(2 * K + 1, {0.0, 0.0});
    const double log_tau = std::log(p.tau);
    const double log_mu = std::log(static_cast<double>(p.mu));
    auto gamma_arg = [&](int k) {
        return std::complex<double>(1.0 - log_mu / log_tau, 2.0 * M_PI * k / log_tau);
    };
    const double floor = p.sample_error + p.aliasing_bound + p.dft_roundoff;
    double sum_abs = 0.0;
    p.k_effective = 0;
    p.sigma_transfer_error = 0.0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0 && std::abs(p.omega_at(k)) <= 10.0 * floor) continue;
        double inv_gamma_mag = 1.0 / std::abs(complex_gamma(gamma_arg(k)));
        std::complex<double> val = p.omega_at(-k) / complex_gamma(gamma_arg(k));
        p.sigma_hat[K + k] = val;
        p.sigma_hat[K - k] = std::conj(val);
        p.k_effective = k;
        sum_abs += (k == 0 ? 1.0 : 2.0) * std::abs(val);
        p.sigma_transfer_error += (k == 0 ? 1.0 : 2.0) * floor * inv_gamma_mag;
    }
    p.gamma_error = kGammaRelError * sum_abs;
    // true-tail estimate: |omega_hat(k)| ~ C exp(-2 pi b k) with the strip
    // half-width b, anchored at the last resolved coefficient
    double b = p.strip_half_width;
    double anchor = std::max(std::abs(p.omega_at(p.k_effective)), floor);
    double c_emp = anchor * std::exp(2.0 * M_PI * b * p.k_effective);
    double tail = 0.0;
    for (int k = p.k_effective + 1; k <= K + 16; ++k)
        tail += 2.0 * c_emp * std::exp(-2.0 * M_PI * b * k) /
                std::abs(complex_gamma(gamma_arg(k)));
    p.fourier_tail = tail;
}

// ---------- residuals of the asymptotic law ----------

struct ResidualRow {
    int n = 0;          // coefficient index (even indices for bipartite walks)
    double p_n = 0.0;
    double fitted = 0.0; // n^(-d_s/2) sigma(log n / log tau), doubled if bipartite
    double residual = 0.0;
};

struct ResidualTable {
    std::vector<ResidualRow> rows;
    struct Window {
        int lo = 0, hi = 0;
        double max_residual = 0.0;
    };
    std::vector<Window> windows; // dyadic
    double decay_exponent = 0.0; // least-squares slope of log max residual
};

/// r_n = p^(n) n^(d_s/2) - sigma(log n/log tau); bipartite walks use the even
/// coefficients against 2 (2n')^(-d_s/2) sigma(...). Dyadic windows between
/// n_lo and n_hi feed the decay-exponent fit.
inline ResidualTable asymptotic_fit(const GreenSeries& gs, const AsymptoticProfile& prof,
                                    int n_lo, int n_hi) {
    if (gs.bipartite != prof.bipartite)
        throw StructureError("series and profile disagree about bipartiteness");
    if (n_hi >= static_cast<int>(gs.values.size()))
        throw StructureError("coefficient series is shorter than the fit range");
    ResidualTable table;
    double half_ds = prof.d_s / 2.0;
    int step = prof.bipartite ? 2 : 1;
    int start = std::max(n_lo, 1);
    if (prof.bipartite && start % 2 != 0) ++start;
    for (int n = start; n <= n_hi; n += step) {
        ResidualRow row;
        row.n = n;
        row.p_n = gs.values[n];
        double sig = prof.sigma(std::log(static_cast<double>(n)) / std::log(prof.tau));
        double scale = std::pow(static_cast<double>(n), -half_ds);
        row.fitted = (prof.bipartite ? 2.0 : 1.0) * scale * sig;
        row.residual = row.p_n / ((prof.bipartite ? 2.0 : 1.0) * scale) - sig;
        table.rows.push_back(row);
    }
    // dyadic windows [w, 2w)
    for (int w = std::max(start, 1); w < n_hi; w *= 2) {
        ResidualTable::Window win;
        win.lo = w;
        win.hi = std::min(2 * w - 1, n_hi);
        for (const ResidualRow& row : table.rows)
            if (row.n >= win.lo && row.n <= win.hi)
                win.max_residual = std::max(win.max_residual, std::abs(row.residual));
        if (win.max_residual > 0) table.windows.push_back(win);
        if (win.hi == n_hi) break;
    }
    // least squares on log max-residual against log window midpoint
    if (table.windows.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (const auto& win : table.windows) {
            double x = std::log(std::sqrt(static_cast<double>(win.lo) * win.hi));
            double y = std::log(win.max_residual);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++m;
        }
        table.decay_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    return table;
}

// ---------- off-diagonal ratio trend ----------

struct RatioTrend {
    std::vector<int> steps;       // k values with both probabilities defined
    std::vector<double> ratios;   // p^(k)(x,y) / p^(k - r)(o,o)
    int parity = 0;               // r = d(x,y) mod 2 for bipartite walks
    double final_ratio = 0.0;
    std::vector<double> window_max_distance; // max |ratio - 1| per dyadic window
};

/// Parity-adjusted off-diagonal to diagonal ratio by float matrix powers.
/// The safe ball radius must cover N plus the vertex offsets, else the finite
/// approximation would distort the law.
inline RatioTrend ratio_limit_check(const BlowupGraph& b, const CellGraph& cell, int x, int y,
                                    int N, bool bipartite, int threads = 1) {
    if (b.origin < 0) throw StructureError("ratio check needs an origin vertex");
    auto adj = b.adjacency(cell);
    auto dist_from_y = detail::bfs_distances(adj, y);
    int dxy = dist_from_y[x];
    int dyo = dist_from_y[b.origin];
    if (dxy < 0) throw StructureError("vertices are not connected");
    int radius = safe_ball_radius(b, cell);
    if (radius < N + dxy + dyo)
        throw StructureError("safe ball radius " + std::to_string(radius) +
                             " cannot support " + std::to_string(N) + " steps at offset " +
                             std::to_string(dxy + dyo));

    std::vector<std::pair<int, int>> edges32;
    for (auto [a, c0] : b.edge_list(cell)) edges32.emplace_back(a, c0);
    FiniteChain chain = FiniteChain::simple_walk(b.n_vertices, edges32, {});
    auto from_x = matrix_power_targets(chain, x, N, {y}, threads);
    auto from_o = matrix_power_targets(chain, b.origin, N, {b.origin}, threads);

    RatioTrend out;
    out.parity = bipartite ? (dxy % 2) : 0;
    for (int k = std::max(2, dxy); k <= N; ++k) {
        if (bipartite) {
            if (k % 2 != out.parity) continue;
            double num = from_x[0][k];
            double den = from_o[0][k - out.parity];
            if (den <= 0) continue;
            out.steps.push_back(k);
            out.ratios.push_back(num / den);
        } else {
            double den = from_o[0][k];
            if (den <= 0) continue;
            out.steps.push_back(k);
            out.ratios.push_back(from_x[0][k] / den);
        }
    }
    if (out.ratios.empty()) throw NumericError("no usable ratio samples");
    out.final_ratio = out.ratios.back();
    // dyadic windows (hi/2^j, hi/2^(j-1)], oldest first
    int hi = out.steps.back();
    for (int j = 3; j >= 1; --j) {
        int lo_b = hi >> j, hi_b = hi >> (j - 1);
        double mx = 0.0;
        bool any = false;
        for (size_t i = 0; i < out.steps.size(); ++i)
            if (out.steps[i] > lo_b && out.steps[i] <= hi_b) {
                mx = std::max(mx, std::abs(out.ratios[i] - 1.0));
                any = true;
            }
        if (any) out.window_max_distance.push_back(mx);
    }
    return out;
}

} // namespace selfsim
