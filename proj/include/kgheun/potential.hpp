#ifndef KGHEUN_POTENTIAL_HPP
#define KGHEUN_POTENTIAL_HPP

// Parameter records for the scalar potential V(x) = a1 + a2|x| + a3/|x|
// and the reduction of the Klein-Gordon equation to
//
//   psi'' + (eps1 + A1/y + A2/y^2 + A3 y - y^2) psi = 0,   y = sqrt(Q a2) |x|
//
// with Q = 1/(hbar c).

#include <kgheun/errors.hpp>

#include <cmath>
#include <string>

namespace kgheun {

/// Physical input record. Energies and lengths share whatever unit system
/// hbar_c is expressed in; the default hbar_c = 1 is natural units.
struct PhysicalParams
{
    double a1 = 0.0;     ///< constant shift (energy)
    double a2 = 1.0;     ///< linear strength (energy / length), > 0
    double a3 = 0.0;     ///< inverse-linear strength (energy * length), >= 0
    double mass = 0.0;   ///< rest energy m c^2, >= 0
    double hbar_c = 1.0; ///< > 0, Q = 1 / hbar_c

    double Q() const noexcept { return 1.0 / hbar_c; }

    /// m c^2 + a1, the combination that multiplies every mass-like term.
    double shifted_mass() const noexcept { return mass + a1; }

    /// Throws DomainError unless the record describes a confining potential.
    void validate() const
    {
        if (!(std::isfinite(a1) && std::isfinite(a2) && std::isfinite(a3) &&
              std::isfinite(mass) && std::isfinite(hbar_c)))
            throw DomainError("physical parameters must be finite");
        if (!(a2 > 0.0))
            throw DomainError("a2 must be positive (linear confinement), got " + std::to_string(a2));
        if (!(hbar_c > 0.0))
            throw DomainError("hbar_c must be positive, got " + std::to_string(hbar_c));
        if (a3 < 0.0)
            throw DomainError("a3 must be non-negative (a2*a3 >= 0), got " + std::to_string(a3));
        if (mass < 0.0)
            throw DomainError("mass must be non-negative, got " + std::to_string(mass));
    }
};

/// Coefficients of the reduced radial equation. Defined for every valid
/// PhysicalParams, including a3 = 0.
struct ReducedCoefficients
{
    double Q = 1.0;
    double a2 = 1.0;
    double a3 = 0.0;
    double shifted_mass = 0.0; ///< m c^2 + a1
    double A1 = 0.0;
    double A2 = 0.0;
    double A3 = 0.0;
    double p = 1.0;            ///< small-y exponent, root of p(p-1) + A2 = 0

    /// eps1(E) = (Q/a2) [E^2 - (mc^2 + a1)^2 - 2 a2 a3]
    double eps1(double energy) const noexcept
    {
        return Q / a2 * (energy * energy - shifted_mass * shifted_mass - 2.0 * a2 * a3);
    }
};

inline ReducedCoefficients reduced_coefficients(PhysicalParams const& pp)
{
    pp.validate();
    ReducedCoefficients rc;
    rc.Q = pp.Q();
    rc.a2 = pp.a2;
    rc.a3 = pp.a3;
    rc.shifted_mass = pp.shifted_mass();
    double const root_q_over_a2 = std::sqrt(rc.Q / pp.a2);
    rc.A1 = -2.0 * rc.Q * pp.a3 * rc.shifted_mass * root_q_over_a2;
    rc.A2 = -rc.Q * rc.Q * pp.a3 * pp.a3;
    rc.A3 = -2.0 * root_q_over_a2 * rc.shifted_mass;
    rc.p = 0.5 + 0.5 * std::sqrt(1.0 - 4.0 * rc.A2);
    return rc;
}

/// Spectrum shape constants such that E_n = eps * sqrt(sigma1 n + sigma2).
struct SigmaConstants
{
    double sigma1;
    double sigma2;
};

inline SigmaConstants sigma_constants(double q)
{
    if (!(q > 0.0) || !std::isfinite(q))
        throw DomainError("sigma constants need q > 0, got " + std::to_string(q));
    return {2.0 / q, 2.0 + (1.0 + std::sqrt(1.0 + 4.0 * q * q)) / q};
}

/// Working symbols of the dimensionless problem. Only defined for a3 > 0.
struct DimensionlessParams
{
    double q = 0.0;      ///< Q a3
    double eps = 0.0;    ///< sqrt(a2 a3), the energy unit
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double A1 = 0.0;
    double A2 = 0.0;
    double A3 = 0.0;
    double p = 0.0;
    ReducedCoefficients reduced;

    double eps1_of(double energy) const noexcept { return reduced.eps1(energy); }
};

inline DimensionlessParams to_dimensionless(PhysicalParams const& pp)
{
    pp.validate();
    if (pp.a3 == 0.0)
        throw DegenerateReduction(
            "a3 = 0 has no dimensionless reduction (sigma1 = 2/q diverges); "
            "evaluate the spectrum from the physical parameters directly");
    DimensionlessParams dp;
    dp.reduced = reduced_coefficients(pp);
    dp.q = pp.Q() * pp.a3;
    dp.eps = std::sqrt(pp.a2 * pp.a3);
    auto const [s1, s2] = sigma_constants(dp.q);
    dp.sigma1 = s1;
    dp.sigma2 = s2;
    dp.A1 = dp.reduced.A1;
    dp.A2 = dp.reduced.A2;
    dp.A3 = dp.reduced.A3;
    dp.p = dp.reduced.p;
    return dp;
}

/// y = sqrt(Q a2) |x|
inline double scaled_coordinate(double x, PhysicalParams const& pp)
{
    pp.validate();
    return std::sqrt(pp.Q() * pp.a2) * std::abs(x);
}

enum class UnitMode { natural, explicit_units };

/// Reporting convention for energies. Natural mode reports energies in
/// units of eps and specific heat in units of k_B; explicit mode multiplies
/// the energy scale back in.
struct Units
{
    UnitMode mode = UnitMode::natural;

    double energy_factor(double eps) const noexcept
    {
        return mode == UnitMode::natural ? 1.0 : eps;
    }
};

} // namespace kgheun

#endif // KGHEUN_POTENTIAL_HPP
