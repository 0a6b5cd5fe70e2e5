#ifndef KGHEUN_SPECTRUM_HPP
#define KGHEUN_SPECTRUM_HPP

#include <kgheun/errors.hpp>
#include <kgheun/heun.hpp>
#include <kgheun/potential.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace kgheun::spectrum {

enum class Branch { positive, negative };

inline char const* to_string(Branch b) noexcept
{
    return b == Branch::positive ? "positive" : "negative";
}

struct SpectrumPoint
{
    int n = 0;
    Branch branch = Branch::positive;
    double energy = 0.0;
};

/// E_n^2 = 2 a2 a3 + (a2/Q)(2n + 1 + sqrt(1 + 4 Q^2 a3^2)). Valid for a3 = 0.
inline SpectrumPoint energy(int n, PhysicalParams const& pp, Branch branch = Branch::positive)
{
    if (n < 0)
        throw DomainError("quantum number must be non-negative, got " + std::to_string(n));
    pp.validate();
    double const Q = pp.Q();
    double const qa3 = Q * pp.a3;
    double const radicand =
        2.0 * pp.a2 * pp.a3 + pp.a2 / Q * (2.0 * n + 1.0 + std::sqrt(1.0 + 4.0 * qa3 * qa3));
    if (!(radicand >= 0.0))
        throw InternalError("negative E^2 for n = " + std::to_string(n));
    double const e = std::sqrt(radicand);
    return {n, branch, branch == Branch::positive ? e : -e};
}

/// eps1(E) + A3^2/4 - 2p - 2n; vanishes exactly at the closed-form eigenvalues.
inline double quantization_residual(double E, int n, PhysicalParams const& pp)
{
    auto const rc = reduced_coefficients(pp);
    return rc.eps1(E) + 0.25 * rc.A3 * rc.A3 - 2.0 * rc.p - 2.0 * n;
}

/// rho(E) = (Q/a2) sqrt(E).
inline double level_density_sqrt(double E, PhysicalParams const& pp)
{
    pp.validate();
    if (!(E > 0.0))
        throw DomainError("level density needs E > 0, got " + std::to_string(E));
    return pp.Q() / pp.a2 * std::sqrt(E);
}

/// dn/dE = Q E / a2, obtained by differentiating E_n^2 with n continuous.
/// Differs from level_density_sqrt; both are kept for comparison.
inline double level_density_consistent(double E, PhysicalParams const& pp)
{
    pp.validate();
    return pp.Q() * E / pp.a2;
}

/// Heun parameters of the reduced equation at energy E.
///
/// With psi = y^p exp(-y^2/2 + A3 y/2) phi, the reduced equation becomes
///   y phi'' + (2p + A3 y - 2y^2) phi' + [(eps1 + A3^2/4 - 2p - 1) y + A1 + p A3] phi = 0,
/// which is the biconfluent Heun form with
///   c1 = 2p - 1 = sqrt(1 - 4 A2), c2 = -A3, c3 = eps1 + A3^2/4, c4 = -2 A1.
inline heun::HeunParams<double> heun_params(double E, PhysicalParams const& pp)
{
    auto const rc = reduced_coefficients(pp);
    return {std::sqrt(1.0 - 4.0 * rc.A2), -rc.A3, rc.eps1(E) + 0.25 * rc.A3 * rc.A3, -2.0 * rc.A1};
}

/// How the Heun factor of the eigenfunction is evaluated.
enum class HeunFactor {
    series,     ///< full adaptive Frobenius series
    polynomial, ///< series cut at degree n, the polynomial form of the n-th state
};

struct WavefunctionSample
{
    std::vector<double> grid;
    std::vector<double> values;
    int n = 0;
    bool normalized = false;
};

inline constexpr double decay_threshold = 1e-8;
inline constexpr double default_heun_tol = 1e-14;

namespace detail {

inline void check_grid(std::span<double const> grid)
{
    if (grid.size() < 2)
        throw DomainError("wavefunction grid needs at least two points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || grid[i] < 0.0)
            throw DomainError("wavefunction grid values must be finite and non-negative");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw DomainError("wavefunction grid must be strictly increasing");
    }
}

} // namespace detail

/// psi(y) = y^p exp((A3 y - y^2)/2) HB(y) at the n-th closed-form eigenvalue.
/// If normalize is set and psi has decayed below 1e-8 of its peak at the last
/// grid point, values are scaled so that 2 * trapz(psi^2) = 1.
inline WavefunctionSample wavefunction(int n, PhysicalParams const& pp, std::span<double const> grid,
                                       bool normalize, HeunFactor factor = HeunFactor::series,
                                       double heun_tol = default_heun_tol)
{
    detail::check_grid(grid);
    auto const rc = reduced_coefficients(pp);
    double const E = energy(n, pp).energy;
    auto const hp = heun_params(E, pp);

    WavefunctionSample out;
    out.n = n;
    out.grid.assign(grid.begin(), grid.end());
    out.values.reserve(grid.size());
    for (double const y : grid) {
        double const hb = factor == HeunFactor::series
                              ? heun::evaluate(hp, y, heun_tol).value
                              : heun::evaluate_truncated(hp, y, static_cast<std::size_t>(n));
        double const envelope = std::pow(y, rc.p) * std::exp(0.5 * (rc.A3 * y - y * y));
        out.values.push_back(envelope * hb);
    }

    if (normalize) {
        double peak = 0.0;
        for (double const v : out.values)
            peak = std::max(peak, std::abs(v));
        bool const decayed = peak > 0.0 && std::abs(out.values.back()) < decay_threshold * peak;
        if (decayed) {
            double integral = 0.0;
            for (std::size_t i = 1; i < grid.size(); ++i) {
                double const h = grid[i] - grid[i - 1];
                integral += 0.5 * h * (out.values[i] * out.values[i] + out.values[i - 1] * out.values[i - 1]);
            }
            double const scale = 1.0 / std::sqrt(2.0 * integral);
            for (double& v : out.values)
                v *= scale;
            out.normalized = true;
        }
    }
    return out;
}

/// Uniform grid [0, y_max] with y_max grown until |psi(y_max)| < 1e-8 max|psi|.
/// Throws DomainError when psi does not decay before y = max_extent.
inline std::vector<double> decaying_grid(int n, PhysicalParams const& pp, std::size_t points,
                                         HeunFactor factor, double max_extent = 60.0)
{
    if (points < 2)
        throw DomainError("grid needs at least two points");
    auto uniform = [points](double y_max) {
        std::vector<double> g(points);
        for (std::size_t i = 0; i < points; ++i)
            g[i] = y_max * static_cast<double>(i) / static_cast<double>(points - 1);
        return g;
    };
    for (double y_max = 2.0; y_max <= max_extent; y_max *= 1.25) {
        auto g = uniform(y_max);
        auto const s = wavefunction(n, pp, g, false, factor);
        double peak = 0.0;
        for (double const v : s.values)
            peak = std::max(peak, std::abs(v));
        if (peak > 0.0 && std::abs(s.values.back()) < decay_threshold * peak)
            return g;
    }
    throw DomainError("eigenfunction n = " + std::to_string(n) + " does not decay before y = " +
                      std::to_string(max_extent));
}

} // namespace kgheun::spectrum

#endif // KGHEUN_SPECTRUM_HPP
