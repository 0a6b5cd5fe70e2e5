#ifndef KGHEUN_HEUN_HPP
#define KGHEUN_HEUN_HPP

// Biconfluent Heun function HB by Frobenius series.
//
// The equation is
//
//   x u'' + (1 + c1 - c2 x - 2 x^2) u' + {(c3 - c1 - 2) x - D/2} u = 0,
//   D = c4 + c2 (1 + c1).
//
// Substituting u = sum_k a_k x^k and collecting x^k gives the three-term
// recurrence (a_{-1} = 0, a_0 = 1)
//
//   (k+1)(k+1+c1) a_{k+1} = (c2 k + D/2) a_k + (2(k-1) - (c3 - c1 - 2)) a_{k-1}.
//
// When c3 - c1 - 2 = 2n the a_{k-1} coupling vanishes at k = n+1, so the series
// is a degree-n polynomial if, in addition, a_{n+1} = 0 (a condition on c4).

#include <kgheun/errors.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace kgheun::heun {

inline constexpr std::size_t default_max_terms = 10000;
inline constexpr double integer_tolerance = 1e-9;

template <std::floating_point Real = double>
struct HeunParams
{
    Real c1{};
    Real c2{};
    Real c3{};
    Real c4{};

    Real D() const noexcept { return c4 + c2 * (1 + c1); }
    /// c3 - c1 - 2, twice the candidate polynomial degree
    Real degree_offset() const noexcept { return c3 - c1 - 2; }

    void validate() const
    {
        Real const s = 1 + c1;
        Real const nearest = std::round(s);
        if (nearest <= 0 && std::abs(s - nearest) <= Real(integer_tolerance))
            throw SingularParameter("1 + c1 = " + std::to_string(double(s)) +
                                    " is a non-positive integer; no analytic Frobenius solution");
    }
};

template <std::floating_point Real = double>
struct SeriesSolution
{
    std::vector<Real> coeffs;        ///< a_0 .. a_N, a_0 = 1
    std::size_t truncation_index = 0; ///< N
    Real tol{};
    bool terminated_polynomially = false;
};

template <std::floating_point Real = double>
struct HeunValue
{
    Real value{};
    Real error_estimate{}; ///< magnitude of the first neglected term
    std::size_t terms = 0;  ///< index of the last term included
};

/// Returns n when c3 - c1 - 2 = 2n for a non-negative integer n (to 1e-9).
template <std::floating_point Real>
std::optional<int> polynomial_degree(HeunParams<Real> const& hp)
{
    Real const half = hp.degree_offset() / 2;
    Real const n = std::round(half);
    if (n < 0 || std::abs(hp.degree_offset() - 2 * n) > Real(integer_tolerance))
        return std::nullopt;
    return static_cast<int>(n);
}

namespace detail {

// Multiplier of a_k and a_{k-1} in the step k -> k+1.
template <std::floating_point Real>
struct RecurrenceStep
{
    Real from_current;
    Real from_previous;
};

template <std::floating_point Real>
RecurrenceStep<Real> step(HeunParams<Real> const& hp, std::size_t k) noexcept
{
    Real const kk = static_cast<Real>(k);
    Real const denom = (kk + 1) * (kk + 1 + hp.c1);
    return {(hp.c2 * kk + hp.D() / 2) / denom,
            (2 * (kk - 1) - hp.degree_offset()) / denom};
}

} // namespace detail

/// Frobenius coefficients a_0..a_N of the solution analytic at the origin.
template <std::floating_point Real>
SeriesSolution<Real> series_coefficients(HeunParams<Real> const& hp, std::size_t N)
{
    hp.validate();
    if (N < 2)
        throw DomainError("series_coefficients needs N >= 2, got " + std::to_string(N));

    SeriesSolution<Real> sol;
    sol.truncation_index = N;
    sol.coeffs.assign(N + 1, Real(0));
    sol.coeffs[0] = 1;
    Real previous = 0;
    for (std::size_t k = 0; k < N; ++k) {
        auto const [a, b] = detail::step(hp, k);
        sol.coeffs[k + 1] = a * sol.coeffs[k] + b * previous;
        previous = sol.coeffs[k];
    }

    // Exact zeros beyond the degree once the second termination condition
    // holds to roundoff.
    if (auto const n = polynomial_degree(hp); n && static_cast<std::size_t>(*n) < N) {
        auto const degree = static_cast<std::size_t>(*n);
        Real scale = 0;
        for (std::size_t k = 0; k <= degree; ++k)
            scale = std::max(scale, std::abs(sol.coeffs[k]));
        if (std::abs(sol.coeffs[degree + 1]) <= Real(1e-12) * scale) {
            std::fill(sol.coeffs.begin() + static_cast<std::ptrdiff_t>(degree) + 1,
                      sol.coeffs.end(), Real(0));
            sol.terminated_polynomially = true;
        }
    }
    return sol;
}

/// Adaptive evaluation of HB(y). Terms t_k = a_k y^k are generated directly;
/// summation stops once three consecutive terms fall below tol * |partial sum|.
template <std::floating_point Real>
HeunValue<Real> evaluate(HeunParams<Real> const& hp, Real y, Real tol,
                         std::size_t max_terms = default_max_terms)
{
    hp.validate();
    if (!(tol > 0))
        throw DomainError("evaluate needs tol > 0");

    Real sum = 1;
    Real current = 1;  // t_k
    Real previous = 0; // t_{k-1}
    int small_in_a_row = 0;
    for (std::size_t k = 0; k < max_terms; ++k) {
        auto const [a, b] = detail::step(hp, k);
        Real const next = a * y * current + b * y * y * previous;
        if (std::abs(next) < tol * std::abs(sum)) {
            if (++small_in_a_row == 3) {
                auto const [a2, b2] = detail::step(hp, k + 1);
                Real const neglected = a2 * y * next + b2 * y * y * current;
                return {sum + next, std::abs(neglected), k + 1};
            }
        } else {
            small_in_a_row = 0;
        }
        sum += next;
        previous = current;
        current = next;
        if (!std::isfinite(sum))
            break;
    }
    throw TruncationFailure("biconfluent Heun series did not converge at y = " +
                                std::to_string(double(y)) + " within " +
                                std::to_string(max_terms) + " terms",
                            double(sum), max_terms);
}

/// Sum of a_0 y^0 .. a_degree y^degree, the series cut at a fixed degree.
template <std::floating_point Real>
Real evaluate_truncated(HeunParams<Real> const& hp, Real y, std::size_t degree)
{
    hp.validate();
    Real sum = 1;
    Real current = 1;
    Real previous = 0;
    for (std::size_t k = 0; k < degree; ++k) {
        auto const [a, b] = detail::step(hp, k);
        Real const next = a * y * current + b * y * y * previous;
        sum += next;
        previous = current;
        current = next;
    }
    return sum;
}

/// Coefficients long enough to reproduce evaluate(hp, y, tol) at this y.
template <std::floating_point Real>
SeriesSolution<Real> truncated_series(HeunParams<Real> const& hp, Real y, Real tol)
{
    auto const v = evaluate(hp, y, tol);
    auto sol = series_coefficients(hp, std::max<std::size_t>(v.terms, 2));
    sol.tol = tol;
    return sol;
}

/// |x u'' + (1 + c1 - c2 x - 2x^2) u' + {(c3 - c1 - 2) x - D/2} u| at x = y,
/// with u, u', u'' differentiated term by term from the stored coefficients.
template <std::floating_point Real>
Real ode_residual(HeunParams<Real> const& hp, SeriesSolution<Real> const& sol, Real y)
{
    auto const& a = sol.coeffs;
    // Horner for u = sum a_k y^k, u' = sum k a_k y^{k-1}, u'' = sum k(k-1) a_k y^{k-2}.
    Real u = 0, d1 = 0, d2 = 0;
    for (std::size_t k = a.size(); k-- > 0;) {
        Real const kk = static_cast<Real>(k);
        u = u * y + a[k];
        if (k >= 1)
            d1 = d1 * y + kk * a[k];
        if (k >= 2)
            d2 = d2 * y + kk * (kk - 1) * a[k];
    }
    Real const residual = y * d2 + (1 + hp.c1 - hp.c2 * y - 2 * y * y) * d1 +
                          (hp.degree_offset() * y - hp.D() / 2) * u;
    return std::abs(residual);
}

} // namespace kgheun::heun

#endif // KGHEUN_HEUN_HPP
