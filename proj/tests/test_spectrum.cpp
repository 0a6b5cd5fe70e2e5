#include <kgheun/spectrum.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace kgheun;
using namespace kgheun::spectrum;

namespace {

PhysicalParams const base{0.1, 0.1, 0.1, 0.5, 1.0};

std::vector<double> uniform_grid(double y_max, std::size_t points)
{
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = y_max * double(i) / double(points - 1);
    return g;
}

// Residual of psi'' + (eps1 + A1/y + A2/y^2 + A3 y - y^2) psi relative to |psi''|,
// with psi'' from a fourth-order central difference.
double reduced_equation_residual(PhysicalParams const& pp, heun::HeunParams<double> const& hp, double E, double y)
{
    auto const rc = reduced_coefficients(pp);
    auto psi = [&](double t) {
        return std::pow(t, rc.p) * std::exp(0.5 * (rc.A3 * t - t * t)) * heun::evaluate(hp, t, 1e-15).value;
    };
    double const h = 1e-2;
    double const d2 = (-psi(y + 2 * h) + 16 * psi(y + h) - 30 * psi(y) + 16 * psi(y - h) - psi(y - 2 * h)) /
                      (12 * h * h);
    double const potential = rc.eps1(E) + rc.A1 / y + rc.A2 / (y * y) + rc.A3 * y - y * y;
    return std::abs(d2 + potential * psi(y)) / std::abs(d2);
}

} // namespace

TEST(Energy, ZeroInverseLinear)
{
    PhysicalParams pp{0.0, 1.0, 0.0, 0.0, 1.0};
    EXPECT_NEAR(energy(0, pp).energy, std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(energy(1, pp).energy, 2.0, 1e-15);
    EXPECT_NEAR(energy(2, pp).energy, std::sqrt(6.0), 1e-15);
    EXPECT_NEAR(energy(3, pp).energy, std::sqrt(8.0), 1e-15);
}

TEST(Energy, UnitQ)
{
    PhysicalParams pp{0.0, 1.0, 1.0, 0.5, 1.0};
    auto const e0 = energy(0, pp);
    EXPECT_NEAR(e0.energy, std::sqrt(3.0 + std::sqrt(5.0)), 1e-14);
    EXPECT_NEAR(e0.energy, 2.28825, 1e-5);
    EXPECT_EQ(e0.branch, Branch::positive);
    EXPECT_NEAR(quantization_residual(e0.energy, 0, pp), 0.0, 1e-12);
}

TEST(Energy, NegativeBranchMirrors)
{
    for (int n : {0, 3, 17}) {
        auto const pos = energy(n, base, Branch::positive);
        auto const neg = energy(n, base, Branch::negative);
        EXPECT_EQ(neg.energy, -pos.energy);
        EXPECT_LT(neg.energy, 0.0);
        EXPECT_EQ(neg.branch, Branch::negative);
    }
    EXPECT_THROW(energy(-1, base), DomainError);
}

TEST(Energy, DimensionlessFormAgrees)
{
    PhysicalParams pp{0.3, 2.0, 0.7, 1.0, 1.3};
    auto const dp = to_dimensionless(pp);
    for (int n = 0; n < 20; ++n)
        EXPECT_NEAR(energy(n, pp).energy, dp.eps * std::sqrt(dp.sigma1 * n + dp.sigma2), 1e-13);
}

TEST(QuantizationResidual, VanishesOnlyAtEigenvalues)
{
    PhysicalParams pp{0.0, 1.0, 1.0, 0.5, 1.0};
    for (int n = 0; n <= 10; ++n) {
        double const E = energy(n, pp).energy;
        EXPECT_NEAR(quantization_residual(E, n, pp), 0.0, 1e-9);
        EXPECT_GE(std::abs(quantization_residual(E + 0.1, n, pp)), 1e-3); // eps = 1
    }
}

TEST(LevelDensity, SqrtForm)
{
    EXPECT_DOUBLE_EQ(level_density_sqrt(1.0, {0.0, 1.0, 0.0, 0.0, 1.0}), 1.0);
    EXPECT_DOUBLE_EQ(level_density_sqrt(4.0, {0.0, 2.0, 0.0, 0.0, 1.0}), 1.0);
    EXPECT_THROW(level_density_sqrt(0.0, base), DomainError);
    EXPECT_THROW(level_density_sqrt(-1.0, base), DomainError);
}

TEST(LevelDensity, ConsistentForm)
{
    PhysicalParams unit{0.0, 1.0, 0.0, 0.0, 1.0};
    EXPECT_DOUBLE_EQ(level_density_consistent(1.0, unit), 1.0);
    EXPECT_DOUBLE_EQ(level_density_consistent(3.0, unit), 3.0);

    // finite differences of n(E), the inverse of the spectrum formula
    PhysicalParams pp{0.2, 1.7, 0.4, 0.5, 0.8};
    double const Q = pp.Q(), qa3 = Q * pp.a3;
    auto n_of = [&](double E) {
        return 0.5 * ((E * E - 2.0 * pp.a2 * pp.a3) * Q / pp.a2 - 1.0 - std::sqrt(1.0 + 4.0 * qa3 * qa3));
    };
    for (double E : {energy(0, pp).energy, 3.0, 7.5}) {
        double const h = 1e-4;
        double const fd = (n_of(E + h) - n_of(E - h)) / (2.0 * h);
        EXPECT_NEAR(fd, level_density_consistent(E, pp), 1e-8 * fd);
        EXPECT_NEAR(n_of(energy(4, pp).energy), 4.0, 1e-12);
    }
}

TEST(SpectrumProperties, SpacingAndShiftInvariance)
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.05, 5.0);
    for (int i = 0; i < 200; ++i) {
        PhysicalParams pp{u(rng) - 2.5, u(rng), i % 10 == 0 ? 0.0 : u(rng), u(rng), u(rng)};
        PhysicalParams shifted = pp;
        shifted.a1 += u(rng) - 2.5;
        for (int n = 0; n < 30; ++n) {
            double const e0 = energy(n, pp).energy, e1 = energy(n + 1, pp).energy;
            double const spacing = 2.0 * pp.a2 / pp.Q();
            EXPECT_NEAR(e1 * e1 - e0 * e0, spacing, 1e-12 * e1 * e1);
            EXPECT_EQ(energy(n, shifted).energy, e0);
            EXPECT_NEAR(quantization_residual(e0, n, pp), 0.0, 1e-9);
            EXPECT_NEAR(quantization_residual(e0, n, shifted), 0.0, 1e-9);
        }
    }
}

TEST(HeunParams, MatchedParametersSolveReducedEquation)
{
    // arbitrary energies: the analytic solution of the reduced equation must
    // satisfy it regardless of quantization
    for (double E : {0.3, 0.47, 0.9}) {
        auto const hp = heun_params(E, base);
        for (double y : {0.5, 1.0, 1.5})
            EXPECT_LT(reduced_equation_residual(base, hp, E, y), 1e-7) << "E = " << E << ", y = " << y;
        // c3 one larger (the value implied by the quantization rule) does not
        auto off = hp;
        off.c3 += 1.0;
        EXPECT_GT(reduced_equation_residual(base, off, E, 1.0), 1e-3);
    }
    PhysicalParams pp{0.0, 1.0, 1.0, 0.5, 1.0};
    auto const hp = heun_params(2.0, pp);
    EXPECT_LT(reduced_equation_residual(pp, hp, 2.0, 0.8), 1e-7);
}

TEST(HeunParams, PrintedEigenvaluesSitOneBelowTermination)
{
    auto const rc = reduced_coefficients(base);
    for (int n = 0; n <= 10; ++n) {
        auto const hp = heun_params(energy(n, base).energy, base);
        EXPECT_NEAR(hp.degree_offset(), 2.0 * n - 1.0, 1e-9);
        EXPECT_FALSE(heun::polynomial_degree(hp));

        // energy where eps1 + A3^2/4 - 2p = 2n + 1: the degree condition holds
        double const eps1 = 2.0 * n + 1.0 + 2.0 * rc.p - 0.25 * rc.A3 * rc.A3;
        double const E2 = eps1 * rc.a2 / rc.Q + rc.shifted_mass * rc.shifted_mass + 2.0 * rc.a2 * rc.a3;
        auto const hp_term = heun_params(std::sqrt(E2), base);
        EXPECT_EQ(heun::polynomial_degree(hp_term), n);
    }
}

TEST(Wavefunction, VanishesAtOriginAndIsNodelessForGroundState)
{
    auto const grid = uniform_grid(8.0, 801);
    auto const s = wavefunction(0, base, grid, true, HeunFactor::polynomial);
    EXPECT_EQ(s.values.front(), 0.0);
    EXPECT_TRUE(s.normalized);
    for (std::size_t i = 1; i < s.values.size(); ++i)
        EXPECT_GE(s.values[i], 0.0);
    EXPECT_EQ(oracle::sign_changes(s.values, 0.0), 0);
    double peak = 0.0;
    for (double v : s.values)
        peak = std::max(peak, v);
    EXPECT_LT(s.values.back(), 1e-8 * peak);

    // independent quadrature over the doubled domain
    double integral = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        integral += (grid[i] - grid[i - 1]) * 0.5 * (s.values[i] * s.values[i] + s.values[i - 1] * s.values[i - 1]);
    EXPECT_NEAR(2.0 * integral, 1.0, 1e-6);
}

TEST(Wavefunction, GroundStateClosedForm)
{
    // degree-0 Heun factor: psi = y^p exp((A3 y - y^2)/2)
    auto const rc = reduced_coefficients(base);
    auto const grid = uniform_grid(5.0, 11);
    auto const s = wavefunction(0, base, grid, false, HeunFactor::polynomial);
    EXPECT_FALSE(s.normalized);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double const y = grid[i];
        double const expected = std::pow(y, rc.p) * std::exp(0.5 * (rc.A3 * y - y * y));
        EXPECT_NEAR(s.values[i], expected, 1e-15 + 1e-14 * expected);
    }
}

TEST(Wavefunction, ExcitedPolynomialStatesOscillate)
{
    for (int n : {5, 10}) {
        auto const grid = decaying_grid(n, base, 2001, HeunFactor::polynomial);
        auto const s = wavefunction(n, base, grid, true, HeunFactor::polynomial);
        EXPECT_TRUE(s.normalized);
        EXPECT_GE(oracle::sign_changes(s.values, 1e-12), 1) << "n = " << n;
    }
}

TEST(Wavefunction, SeriesModeAtPrintedEnergyGrows)
{
    auto const grid = uniform_grid(6.0, 61);
    auto const s = wavefunction(0, base, grid, true, HeunFactor::series);
    EXPECT_FALSE(s.normalized);
    EXPECT_EQ(oracle::sign_changes(s.values, 0.0), 0);
    EXPECT_GT(s.values.back(), s.values[10]);
    EXPECT_THROW(decaying_grid(0, base, 101, HeunFactor::series, 20.0), Error);
}

TEST(Wavefunction, SeriesAndPolynomialAgreeNearOrigin)
{
    // the series differs from its degree-n cut by O(y^{n+1})
    auto const grid = uniform_grid(0.01, 5);
    auto const a = wavefunction(2, base, grid, false, HeunFactor::series);
    auto const b = wavefunction(2, base, grid, false, HeunFactor::polynomial);
    for (std::size_t i = 1; i < grid.size(); ++i)
        EXPECT_NEAR(a.values[i], b.values[i], 1e-5 * std::abs(a.values[i]));
}

TEST(Wavefunction, GridValidation)
{
    std::vector<double> one{0.0};
    std::vector<double> unsorted{0.0, 2.0, 1.0};
    std::vector<double> negative{-1.0, 0.0, 1.0};
    EXPECT_THROW(wavefunction(0, base, one, false), DomainError);
    EXPECT_THROW(wavefunction(0, base, unsorted, false), DomainError);
    EXPECT_THROW(wavefunction(0, base, negative, false), DomainError);
    EXPECT_THROW(decaying_grid(0, base, 1, HeunFactor::polynomial), DomainError);
}

TEST(Wavefunction, ZeroInverseLinearStrength)
{
    PhysicalParams pp{0.0, 1.0, 0.0, 0.0, 1.0};
    auto const grid = decaying_grid(0, pp, 401, HeunFactor::polynomial);
    auto const s = wavefunction(0, pp, grid, true, HeunFactor::polynomial);
    EXPECT_TRUE(s.normalized);
    EXPECT_EQ(s.values.front(), 0.0); // p = 1
}
