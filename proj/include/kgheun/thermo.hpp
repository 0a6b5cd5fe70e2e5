#ifndef KGHEUN_THERMO_HPP
#define KGHEUN_THERMO_HPP

// Canonical partition function over the positive branch E_n = eps sqrt(sigma1 n + sigma2),
// referenced to the ground state:
//
//   Z(mbar) = sum_n exp(-(E_n - E_0) beta),   beta eps = 1/mbar.
//
// All energies below are in units of eps, temperatures in units of eps/k_B
// (so T = mbar), and the specific heat in units of k_B.

#include <kgheun/errors.hpp>
#include <kgheun/potential.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace kgheun::thermo {

using kgheun::sigma_constants;

enum class Method { direct, euler_maclaurin };

inline char const* to_string(Method m) noexcept
{
    return m == Method::direct ? "direct" : "euler_maclaurin";
}

enum class DerivativeMode { analytic, finite_difference };

struct EMConfig
{
    int order = 2; ///< Bernoulli correction pairs kept: 1 -> B2, 2 -> B2 and B4
    DerivativeMode derivative_mode = DerivativeMode::analytic;

    void validate() const
    {
        if (order != 1 && order != 2)
            throw ConfigError("Euler-MacLaurin order must be 1 or 2, got " + std::to_string(order));
    }
};

struct PartitionValue
{
    double mbar = 0.0;
    double q = 0.0;
    double Z = 0.0;
    Method method = Method::direct;
    std::size_t terms = 0; ///< summands used by the direct sum; 0 for Euler-MacLaurin
};

struct ThermoPoint
{
    double mbar = 0.0;
    double q = 0.0;
    double Z = 0.0;
    double F = 0.0;
    double U = 0.0;
    double C = 0.0;
    Method method = Method::direct;
    std::size_t terms = 0;
};

inline constexpr std::size_t direct_max_terms = 10'000'000;

namespace detail {

inline void check_positive(double v, char const* name)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string(name) + " must be positive and finite, got " + std::to_string(v));
}

// sqrt(s1 n + s2) - sqrt(s2) without cancellation.
inline double excitation(double n, double s1, double s2) noexcept
{
    return s1 * n / (std::sqrt(s1 * n + s2) + std::sqrt(s2));
}

// Integral of exp(-(sqrt(s1 x + s2) - sqrt(s2))/mbar) over [a, inf).
inline double shifted_tail_integral(double a, double mbar, double s1, double s2) noexcept
{
    double const sa = std::sqrt(s1 * a + s2);
    return 2.0 * mbar * mbar / s1 * std::exp(-excitation(a, s1, s2) / mbar) * (1.0 + sa / mbar);
}

// Neumaier-compensated accumulator.
class CompensatedSum
{
public:
    void add(double x) noexcept
    {
        double const t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            carry_ += (sum_ - t) + x;
        else
            carry_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

inline double direct_sum_fixed(double mbar, double s1, double s2, std::size_t terms)
{
    CompensatedSum acc;
    for (std::size_t n = 0; n < terms; ++n)
        acc.add(std::exp(-excitation(static_cast<double>(n), s1, s2) / mbar));
    return acc.value();
}

// Z_em as a Laurent polynomial sum_j coeff[j + 3] mbar^j, j = -3..2.
inline std::array<double, 6> em_laurent(double q, int order)
{
    auto const [s1, s2] = sigma_constants(q);
    double const s = std::sqrt(s2);
    std::array<double, 6> c{};
    c[5] = 2.0 / s1;            // mbar^2
    c[4] = 2.0 * s / s1;        // mbar^1
    c[3] = 0.5;                 // mbar^0
    c[2] = s1 / (24.0 * s);     // mbar^-1
    if (order >= 2) {
        double const k = s1 * s1 * s1 / (5760.0 * s2 * s2 * s);
        c[2] -= 3.0 * k;
        c[1] = -3.0 * k * s;    // mbar^-2
        c[0] = -k * s2;         // mbar^-3
    }
    return c;
}

struct LaurentValue
{
    double value;
    double d1;
    double d2;
};

inline LaurentValue eval_laurent(std::array<double, 6> const& c, double m)
{
    LaurentValue r{0.0, 0.0, 0.0};
    for (int j = -3; j <= 2; ++j) {
        double const a = c[static_cast<std::size_t>(j + 3)];
        r.value += a * std::pow(m, j);
        r.d1 += a * j * std::pow(m, j - 1);
        r.d2 += a * j * (j - 1) * std::pow(m, j - 2);
    }
    return r;
}

} // namespace detail

/// Closed form of the integral of exp(-b1 sqrt(b2 n + b3)) over n in [0, inf):
///   (2 / (b1^2 b2)) exp(-b1 sqrt(b3)) (1 + b1 sqrt(b3)).
inline double closed_integral(double b1, double b2, double b3)
{
    detail::check_positive(b1, "b1");
    detail::check_positive(b2, "b2");
    if (!(b3 >= 0.0))
        throw DomainError("b3 must be non-negative, got " + std::to_string(b3));
    double const r = b1 * std::sqrt(b3);
    return 2.0 / (b1 * b1 * b2) * std::exp(-r) * (1.0 + r);
}

/// A summand for the Euler-MacLaurin formula: the function itself and,
/// optionally, its odd derivatives at 0 (f'(0), f'''(0), ...).
struct Summand
{
    std::function<double(double)> value;
    std::vector<double> odd_derivatives;
};

namespace detail {

// Central differences with one Richardson level.
inline double fd_first(std::function<double(double)> const& f, double h)
{
    auto d = [&](double s) { return (f(s) - f(-s)) / (2.0 * s); };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

inline double fd_third(std::function<double(double)> const& f, double h)
{
    auto d = [&](double s) { return (f(2.0 * s) - 2.0 * f(s) + 2.0 * f(-s) - f(-2.0 * s)) / (2.0 * s * s * s); };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

} // namespace detail

inline constexpr double bernoulli_b2 = 1.0 / 6.0;
inline constexpr double bernoulli_b4 = -1.0 / 30.0;

/// sum_{n>=0} f(n) ~ f(0)/2 + integral - sum_{i=1}^{order} B_{2i}/(2i)! f^{(2i-1)}(0).
/// Finite-difference mode samples f on both sides of 0.
inline double euler_maclaurin_sum(Summand const& f, double integral, EMConfig const& cfg)
{
    cfg.validate();
    if (!f.value)
        throw ConfigError("Euler-MacLaurin summand has no value function");

    std::array<double, 2> derivs{};
    if (cfg.derivative_mode == DerivativeMode::analytic) {
        if (f.odd_derivatives.size() < static_cast<std::size_t>(cfg.order))
            throw ConfigError("Euler-MacLaurin order " + std::to_string(cfg.order) + " needs " +
                              std::to_string(cfg.order) + " odd derivatives, got " +
                              std::to_string(f.odd_derivatives.size()));
        for (int i = 0; i < cfg.order; ++i)
            derivs[static_cast<std::size_t>(i)] = f.odd_derivatives[static_cast<std::size_t>(i)];
    } else {
        derivs[0] = detail::fd_first(f.value, 1e-5);
        if (cfg.order >= 2)
            derivs[1] = detail::fd_third(f.value, 1e-2);
    }

    double result = 0.5 * f.value(0.0) + integral - bernoulli_b2 / 2.0 * derivs[0];
    if (cfg.order >= 2)
        result -= bernoulli_b4 / 24.0 * derivs[1];
    return result;
}

/// g(n) = exp(-(sqrt(sigma1 n + sigma2) - sqrt(sigma2))/mbar) with g'(0), g'''(0)
/// in closed form. g is the partition summand with exp(beta E_0) absorbed.
///
/// With s = sqrt(sigma1 n + sigma2) and ds/dn = sigma1/(2s):
///   g'   = -(sigma1 / (2 mbar s)) g
///   g''' = -(sigma1^3 / (8 mbar s^5)) (3 + 3 s/mbar + s^2/mbar^2) g
inline Summand partition_summand(double mbar, double q)
{
    detail::check_positive(mbar, "mbar");
    auto const [s1, s2] = sigma_constants(q);
    double const s = std::sqrt(s2);
    Summand f;
    f.value = [=](double n) { return std::exp(-(std::sqrt(s1 * n + s2) - s) / mbar); };
    f.odd_derivatives = {
        -s1 / (2.0 * mbar * s),
        -s1 * s1 * s1 / (8.0 * mbar * s2 * s2 * s) * (3.0 + 3.0 * s / mbar + s2 / (mbar * mbar)),
    };
    return f;
}

/// Integral of partition_summand over [0, inf): (2 mbar^2/sigma1)(1 + sqrt(sigma2)/mbar).
inline double partition_integral(double mbar, double q)
{
    detail::check_positive(mbar, "mbar");
    auto const [s1, s2] = sigma_constants(q);
    return 2.0 * mbar * mbar / s1 * (1.0 + std::sqrt(s2) / mbar);
}

/// Truncated Euler-MacLaurin partition function
///   Z = 1/2 + (2 mbar^2/sigma1)(1 + sqrt(sigma2)/mbar) + sigma1/(24 mbar sqrt(sigma2))
///       - sigma1^3/(5760 mbar sigma2^{5/2}) (3 + 3 sqrt(sigma2)/mbar + sigma2/mbar^2),
/// the last term only at order 2.
inline PartitionValue partition_em(double mbar, double q, EMConfig const& cfg = {})
{
    cfg.validate();
    detail::check_positive(mbar, "mbar");
    detail::check_positive(q, "q");
    double Z = 0.0;
    if (cfg.derivative_mode == DerivativeMode::analytic)
        Z = detail::eval_laurent(detail::em_laurent(q, cfg.order), mbar).value;
    else
        Z = euler_maclaurin_sum(partition_summand(mbar, q), partition_integral(mbar, q), cfg);
    return {mbar, q, Z, Method::euler_maclaurin, 0};
}

/// Direct summation. Stops once the integral bound on the remainder falls
/// below tol * (partial sum); the summand is decreasing, so
///   sum_{n>=N} g(n) <= integral of g over [N-1, inf).
inline PartitionValue partition_direct(double mbar, double q, double tol,
                                       std::size_t max_terms = direct_max_terms)
{
    detail::check_positive(mbar, "mbar");
    detail::check_positive(q, "q");
    detail::check_positive(tol, "tol");
    auto const [s1, s2] = sigma_constants(q);

    detail::CompensatedSum acc;
    for (std::size_t n = 0; n < max_terms; ++n) {
        acc.add(std::exp(-detail::excitation(static_cast<double>(n), s1, s2) / mbar));
        if ((n & 31U) == 31U) {
            double const tail = detail::shifted_tail_integral(static_cast<double>(n), mbar, s1, s2);
            if (tail < tol * acc.value())
                return {mbar, q, acc.value(), Method::direct, n + 1};
        }
    }
    throw TruncationFailure("direct partition sum exceeded " + std::to_string(max_terms) +
                                " terms at mbar = " + std::to_string(mbar),
                            acc.value(), max_terms);
}

struct ThermalOptions
{
    EMConfig em{};
    double tol = 1e-14;      ///< direct-sum tail tolerance
    double log_step = 1e-4;  ///< finite-difference step in ln(mbar) for the direct source
};

namespace detail {

inline ThermoPoint assemble(double mbar, double q, double Z, double dlnZ_dlnm, double d2lnZ_dlnm2,
                            Method method, std::size_t terms)
{
    if (!(Z > 0.0) || !std::isfinite(Z))
        throw InternalError("non-positive partition function " + std::to_string(Z) + " at mbar = " +
                            std::to_string(mbar) + ", q = " + std::to_string(q));
    ThermoPoint tp;
    tp.mbar = mbar;
    tp.q = q;
    tp.Z = Z;
    tp.method = method;
    tp.terms = terms;
    // x = ln mbar, L = ln Z:  F = -mbar L,  U = mbar dL/dx,  C = dU/dmbar = dL/dx + d2L/dx2.
    tp.F = -mbar * std::log(Z);
    tp.U = mbar * dlnZ_dlnm;
    tp.C = dlnZ_dlnm + d2lnZ_dlnm2;
    return tp;
}

} // namespace detail

/// F, U and C from one partition-function source.
///
/// U = -d ln Z / d beta and C = dU/dT = k_B beta^2 (-dU/d beta), which is
/// positive. Euler-MacLaurin derivatives are analytic; the direct sum uses
/// Richardson-extrapolated central differences in ln(mbar) with a fixed
/// number of summands across the stencil.
inline ThermoPoint thermal_functions(Method source, double mbar, double q, ThermalOptions const& opt = {})
{
    detail::check_positive(mbar, "mbar");
    detail::check_positive(q, "q");

    if (source == Method::euler_maclaurin) {
        opt.em.validate();
        auto const lv = detail::eval_laurent(detail::em_laurent(q, opt.em.order), mbar);
        double const Z = lv.value;
        // dL/dx = m Z'/Z, d2L/dx2 = m Z'/Z + m^2 (Z''/Z - (Z'/Z)^2)
        double const g = lv.d1 / Z;
        double const dL = mbar * g;
        double const d2L = dL + mbar * mbar * (lv.d2 / Z - g * g);
        return detail::assemble(mbar, q, Z, dL, d2L, Method::euler_maclaurin, 0);
    }

    double const h = opt.log_step;
    detail::check_positive(h, "log_step");
    auto const [s1, s2] = sigma_constants(q);
    std::size_t const terms = partition_direct(mbar * std::exp(h), q, opt.tol).terms;
    auto L = [&](double x) { return std::log(detail::direct_sum_fixed(std::exp(x), s1, s2, terms)); };

    double const x = std::log(mbar);
    double const L0 = L(x);
    double const Lp = L(x + h), Lm = L(x - h);
    double const Lp2 = L(x + 0.5 * h), Lm2 = L(x - 0.5 * h);
    double const d1_h = (Lp - Lm) / (2.0 * h);
    double const d1_h2 = (Lp2 - Lm2) / h;
    double const d2_h = (Lp - 2.0 * L0 + Lm) / (h * h);
    double const d2_h2 = (Lp2 - 2.0 * L0 + Lm2) / (0.25 * h * h);
    double const dL = (4.0 * d1_h2 - d1_h) / 3.0;
    double const d2L = (4.0 * d2_h2 - d2_h) / 3.0;
    return detail::assemble(mbar, q, std::exp(L0), dL, d2L, Method::direct, terms);
}

struct HighTemperatureLimits
{
    double Z_coefficient; ///< Z ~ Z_coefficient * mbar^2
    double U_slope;       ///< U ~ U_slope * mbar
    double C_limit;       ///< C/k_B -> C_limit
};

inline HighTemperatureLimits high_temperature_limits(double q)
{
    auto const [s1, s2] = sigma_constants(q);
    (void)s2;
    return {2.0 / s1, 2.0, 2.0};
}

} // namespace kgheun::thermo

#endif // KGHEUN_THERMO_HPP
