#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "conefrac/error.hpp"
#include "conefrac/funcalc.hpp"
#include "conefrac/quadrature.hpp"
#include "support.hpp"

using namespace conefrac;
using conefrac::testing::random_normal;
using conefrac::testing::rel_error;
using std::numbers::pi;

namespace {

Matrix diag(std::initializer_list<Complex> xs)
{
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (Complex x : xs) v(i++) = x;
    return v.asDiagonal();
}

ErrorCode code_of(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST(FracPower, ScalarAndDiagonal)
{
    EXPECT_LT(rel_error(frac_power(DenseOperator::diagonal({4}), {0.5}).entries(), diag({2})), 1e-9);
    EXPECT_LT(rel_error(frac_power(DenseOperator::diagonal({1, 4, 9}), {0.5}).entries(), diag({1, 2, 3})), 1e-9);
}

TEST(FracPower, SymmetricTwoByTwo)
{
    Matrix a(2, 2);
    a << 2, 1, 1, 2;
    const double r3 = std::sqrt(3.0);
    Matrix expect(2, 2);
    expect << (r3 + 1) / 2, (r3 - 1) / 2, (r3 - 1) / 2, (r3 + 1) / 2;
    EXPECT_LT(rel_error(frac_power(DenseOperator(a), {0.5}).entries(), expect), 1e-9);
}

TEST(FracPower, SemigroupProperty)
{
    std::mt19937_64 rng(3);
    const DenseOperator a = random_normal(rng, 6, 1e-2, 1e3, 0.3);
    const Matrix q = frac_power(a, {0.25}).entries();
    const Matrix h = frac_power(a, {0.5}).entries();
    EXPECT_LT(rel_error(q * q, h), 1e-8);
}

TEST(FracPower, ShiftAndMethods)
{
    const DenseOperator a = DenseOperator::diagonal({0.0, 3.0});
    EXPECT_LT(rel_error(frac_power(a, {0.5, 1.0}).entries(), diag({1, 2})), 1e-9);
    EXPECT_EQ(code_of([&] { frac_power(a, {0.5}); }), ErrorCode::SpectrumNotSectorial);
    const Matrix lim = frac_power(DenseOperator::diagonal({0.0, 1.0, 4.0}), {0.5, 0.0, PowerMethod::resolvent_limit})
                           .entries();
    EXPECT_LT(rel_error(lim, diag({0, 1, 2})), 1e-8);
    EXPECT_EQ(code_of([] { frac_power(DenseOperator::diagonal({1}), {1.5}); }), ErrorCode::InvalidArgument);
}

TEST(FracPower, SpectralBackendMatchesLu)
{
    std::mt19937_64 rng(5);
    const DenseOperator a = random_normal(rng, 8, 1e-1, 1e2);
    const Matrix lu = frac_power(a, {0.75}).entries();
    const Matrix sp = frac_power(a, {0.75, 0.0, PowerMethod::balakrishnan, ResolventBackend::spectral}).entries();
    EXPECT_LT(rel_error(sp, lu), 1e-9);
}

TEST(InvFracPower, Examples)
{
    EXPECT_LT(rel_error(inv_frac_power(DenseOperator::diagonal({4}), {0.5}).entries(), diag({0.5})), 1e-9);
    for (double s : {0.2, 0.5, 0.9})
        EXPECT_LT(rel_error(inv_frac_power(DenseOperator::identity(3), {s}).entries(), Matrix::Identity(3, 3)), 1e-9);
    EXPECT_LT(rel_error(inv_frac_power(DenseOperator::diagonal({1, 16}), {0.25}).entries(), diag({1, 0.5})), 1e-9);
}

TEST(InvFracPower, InvertsFracPower)
{
    std::mt19937_64 rng(11);
    const DenseOperator a = random_normal(rng, 5, 1e-2, 1e2, 0.5);
    const Matrix p = frac_power(a, {0.4}).entries();
    const Matrix q = inv_frac_power(a, {0.4}).entries();
    EXPECT_LT(rel_error(p * q, Matrix::Identity(5, 5)), 1e-8);
}

TEST(FracResolvent, ScalarExamples)
{
    const Vector one = Vector::Ones(1);
    EXPECT_NEAR(std::abs(frac_resolvent_apply(DenseOperator::diagonal({1}), 0.5, 2.0, one)(0) - 1.0 / 3.0), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(frac_resolvent_apply(DenseOperator::diagonal({4}), 0.5, 0.001, one)(0) - 1.0 / 2.001), 0.0,
                1e-9);
    const Complex l = std::polar(1.0, 0.6 * pi);
    EXPECT_NEAR(std::abs(frac_resolvent_apply(DenseOperator::diagonal({1}), 0.5, l, one)(0) - 1.0 / (1.0 + l)), 0.0,
                1e-9);
}

TEST(FracResolvent, PathsAgree)
{
    std::mt19937_64 rng(17);
    const DenseOperator a = random_normal(rng, 6, 1e-2, 1e3);
    const Vector v = Vector::Ones(6);
    FracResolventOptions half, ray;
    half.path = ResolventPath::half_line;
    ray.path = ResolventPath::sector_ray;
    for (Complex l : {Complex(1.0, 0.5), std::polar(3.0, 0.4 * pi), std::polar(0.05, -0.2 * pi)}) {
        const Vector x = frac_resolvent_apply(a, 0.5, l, v, half);
        const Vector y = frac_resolvent_apply(a, 0.5, l, v, ray);
        EXPECT_LT((x - y).norm() / x.norm(), 1e-7);
    }
}

TEST(FracResolvent, AdmissibleWindow)
{
    // sigma = 0.5, arg lambda = 0.8 pi: rays at angle theta with sigma*theta + ... must avoid the pole
    const auto [lo, hi] = admissible_ray_window(0.5, std::polar(1.0, 0.8 * pi), 0.0);
    EXPECT_LT(lo, hi);
    EXPECT_EQ(code_of([] { frac_resolvent_apply(DenseOperator::diagonal({1}), 0.5, -1.0, Vector::Ones(1)); }),
              ErrorCode::KernelPoleOnPath);
}

TEST(ImaginaryPower, Examples)
{
    EXPECT_LT(rel_error(imaginary_power(DenseOperator::diagonal({1}), 0.7, 0.0).entries(), diag({1})), 1e-8);
    EXPECT_LT(rel_error(imaginary_power(DenseOperator::diagonal({std::exp(2 * pi)}), 1.0, 0.0).entries(), diag({1})),
              1e-8);
    EXPECT_LT(rel_error(imaginary_power(DenseOperator::diagonal({4}), 1e-8, 0.0).entries(), diag({1})), 1e-6);
}

TEST(ImaginaryPower, GroupProperty)
{
    const DenseOperator a = DenseOperator::diagonal({0.3, 2.0, 50.0});
    const Matrix p = imaginary_power(a, 0.4, 0.0).entries();
    const Matrix q = imaginary_power(a, -0.4, 0.0).entries();
    EXPECT_LT(rel_error(p * q, Matrix::Identity(3, 3)), 1e-8);
}

TEST(HinftyEval, ZeroFunction)
{
    const auto z = hinfty_eval(DenseOperator::diagonal({1, 2}), [](Complex) { return Complex(0.0); }, pi / 2);
    EXPECT_EQ(z.entries().norm(), 0.0);
}

TEST(HinftyEval, MatchesSpectralValues)
{
    // f(-A) for f(lambda) = sqrt(-lambda) / (1 - lambda): sqrt(a) / (1 + a)
    const auto h = hinfty_eval(DenseOperator::diagonal({0.5, 2.0, 30.0}),
                               [](Complex l) { return std::sqrt(-l) / (1.0 - l); }, pi / 2);
    EXPECT_LT(rel_error(h.entries(), diag({std::sqrt(0.5) / 1.5, std::sqrt(2.0) / 3.0, std::sqrt(30.0) / 31.0})), 1e-8);
}

TEST(HinftyEval, SelfConvergenceOnRationalSymbol)
{
    // lambda / (1 + lambda)^2 on diag(1): the value at 4x nodes is the reference
    const DenseOperator a = DenseOperator::diagonal({1});
    auto f = [](Complex l) { return l / ((1.0 + l) * (1.0 + l)); };
    const QuadratureRule base = default_sector_rule(spectral_bounds(a), pi / 2);
    const auto [lo, hi] = base.truncation();
    const std::size_t per_ray = base.node_count() / 2;
    const Matrix coarse = hinfty_eval(a, f, pi / 2, sector_contour_rule(pi / 2, lo, hi, 2 * per_ray)).entries();
    const Matrix fine = hinfty_eval(a, f, pi / 2, sector_contour_rule(pi / 2, lo, hi, 8 * per_ray)).entries();
    EXPECT_LT(std::abs(coarse(0, 0) - fine(0, 0)), 1e-9);
}

TEST(HinftyEval, ComposedSymbolAgreesWithFracResolvent)
{
    // A^s (A^s + mu)^{-1} (1 + A)^{-1} two ways
    const DenseOperator a = DenseOperator::diagonal({1, 2, 3});
    const double s = 0.5;
    const double mu = 0.7;
    const auto h = hinfty_eval(a, [&](Complex l) {
        const Complex p = std::pow(-l, s);
        return p / ((p + mu) * (1.0 - l));
    }, pi / 2);
    const Vector v = Vector::Ones(3);
    const Vector x = frac_resolvent_apply(a, s, mu, v);
    const Vector y = shifted_solve(a, 1.0, Vector(v - mu * x));
    EXPECT_LT((h.entries() * v - y).norm() / y.norm(), 1e-7);
}

TEST(HinftyEval, DecayViolation)
{
    EXPECT_EQ(code_of([] { hinfty_eval(DenseOperator::diagonal({1}), [](Complex) { return Complex(1.0); }, pi / 2); }),
              ErrorCode::DecayViolated);
}

TEST(ComplexPower, Examples)
{
    EXPECT_LT(rel_error(complex_power(DenseOperator::diagonal({4}), -1.0, 0.0).entries(), diag({0.25})), 1e-8);
    EXPECT_LT(rel_error(complex_power(DenseOperator::diagonal({4}), -0.5, 0.0).entries(), diag({0.5})), 1e-8);
    EXPECT_LT(rel_error(complex_power(DenseOperator::diagonal({std::exp(1.0)}), Complex(0, -1), 0.0).entries(),
                        diag({std::exp(Complex(0, -1))})),
              1e-8);
    const Complex z(-0.3, 0.8);
    EXPECT_LT(rel_error(complex_power(DenseOperator::diagonal({2, 9}), z, 0.0).entries(),
                        diag({std::pow(Complex(2), z), std::pow(Complex(9), z)})),
              1e-8);
}

TEST(ShiftComparison, Examples)
{
    const auto r0 = shift_comparison_probe(DenseOperator::diagonal({0}), 0.5, {1e-3, 1e-2, 1e-1});
    for (const auto& s : r0.samples) EXPECT_NEAR(s.measured, std::sqrt(s.c), 1e-12);
    const auto r1 = shift_comparison_probe(DenseOperator::diagonal({100}), 0.5, {0.01, 0.02});
    EXPECT_NEAR(r1.samples[0].measured, 5e-4, 2e-6);
    EXPECT_LT(r1.samples[0].measured, 0.1);
    const auto r2 = shift_comparison_probe(DenseOperator::diagonal({0, 1}), 0.25, {1e-4, 1e-3, 1e-2, 1e-1});
    EXPECT_NEAR(r2.slope, 0.25, 0.02);
    EXPECT_TRUE(r2.scaling_holds);
}

TEST(PrincipalPow, Branch)
{
    EXPECT_NEAR(std::abs(principal_pow(Complex(-4.0, 0.0), 0.5) - Complex(0.0, 2.0)), 0.0, 1e-15);
    EXPECT_EQ(principal_pow(Complex(0.0), 0.5), Complex(0.0));
}
