#include <cmath>

#include <gtest/gtest.h>

#include "conefrac/cone.hpp"
#include "conefrac/error.hpp"

using namespace conefrac;

namespace {

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

ConeOperator flat_cone(Extension ext, int count = 128, double gamma = -0.5, int modes = 4)
{
    return assemble_cone_laplacian(CrossSection::circle(modes), ConeGrid(1e-6, count, gamma), ext);
}

Vector powers(const ConeGrid& g, double beta, double extra = 0.0)
{
    Vector v(g.count());
    for (int i = 0; i < g.count(); ++i) v(i) = std::pow(g.x(i), beta) + extra * g.x(i) * g.x(i);
    return v;
}

} // namespace

TEST(CrossSection, Builtins)
{
    const CrossSection c = CrossSection::circle(5);
    EXPECT_EQ(c.n, 1);
    EXPECT_EQ(c.eigenvalues, (std::vector<double>{0, -1, -4, -9, -16}));
    EXPECT_EQ(c.multiplicities, (std::vector<int>{1, 2, 2, 2, 2}));
    const CrossSection s = CrossSection::sphere(3);
    EXPECT_EQ(s.eigenvalues, (std::vector<double>{0, -2, -6}));
    EXPECT_EQ(s.multiplicities, (std::vector<int>{1, 3, 5}));
}

TEST(CrossSection, FromTextAndValidation)
{
    const CrossSection cs = CrossSection::from_text("n = 3\neigenvalues = 0, -3, -8\nmultiplicities = 1, 4, 9\ncomponents = 1\n");
    EXPECT_EQ(cs.n, 3);
    EXPECT_EQ(code_of([] { CrossSection::from_text("n = 1\neigenvalues = 0, -1\nmultiplicities = 1\ncomponents = 1\n"); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { CrossSection::from_text("n = 1\neigenvalues = 0\n"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { CrossSection::named("/nonexistent/section.txt"); }), ErrorCode::IoError);
}

TEST(Geometry, MuExponents)
{
    const auto c = mu_exponents(CrossSection::circle(6));
    for (int j = 0; j < 6; ++j) EXPECT_NEAR(c[j], j, 1e-14);
    const auto s = mu_exponents(CrossSection::sphere());
    EXPECT_NEAR(s[0], 0.5, 1e-14);
    EXPECT_NEAR(s[1], 1.5, 1e-14);
}

TEST(Geometry, WeightWindows)
{
    const WeightWindow c = weight_window(CrossSection::circle());
    EXPECT_DOUBLE_EQ(c.gamma_lo, -1.0);
    EXPECT_DOUBLE_EQ(c.gamma_hi, 0.0);
    EXPECT_DOUBLE_EQ(c.sigma0, 0.5);
    const WeightWindow s = weight_window(CrossSection::sphere());
    EXPECT_DOUBLE_EQ(s.gamma_lo, -0.5);
    EXPECT_DOUBLE_EQ(s.gamma_hi, 0.5);
    EXPECT_DOUBLE_EQ(s.sigma0, 0.5);
    const CrossSection n3 = CrossSection::from_text("n = 3\neigenvalues = 0, -3\nmultiplicities = 1, 4\ncomponents = 1\n");
    const WeightWindow w = weight_window(n3);
    EXPECT_DOUBLE_EQ(w.gamma_lo, 0.0);
    EXPECT_DOUBLE_EQ(w.gamma_hi, 1.0);
    EXPECT_DOUBLE_EQ(w.sigma0, 0.5);
}

TEST(Geometry, AsymptoticsExponents)
{
    std::vector<double> q;
    for (const auto& e : asymptotics_exponents(CrossSection::circle(), -0.5)) q.push_back(e.q);
    EXPECT_EQ(q, (std::vector<double>{0.0, 1.0}));
    q.clear();
    for (const auto& e : asymptotics_exponents(CrossSection::sphere(), 0.0)) q.push_back(e.q);
    EXPECT_EQ(q, (std::vector<double>{0.0, 1.0}));
}

TEST(Geometry, ZeroAlwaysInWindow)
{
    const WeightWindow w = weight_window(CrossSection::circle());
    for (double g : {w.gamma_lo + 1e-9, -0.5, w.gamma_hi - 1e-9}) {
        bool found = false;
        for (const auto& e : asymptotics_exponents(CrossSection::circle(), g)) found = found || e.q == 0.0;
        EXPECT_TRUE(found) << "gamma " << g;
    }
}

TEST(Grid, Validation)
{
    EXPECT_EQ(code_of([] { ConeGrid(1e-6, 8, -0.5); }), ErrorCode::GridTooCoarse);
    EXPECT_EQ(code_of([] { ConeGrid(2.0, 64, -0.5); }), ErrorCode::InvalidArgument);
    const ConeGrid g(1e-4, 65, -0.5);
    EXPECT_NEAR(g.x(0), 1e-4, 1e-18);
    EXPECT_NEAR(g.x(64), 1.0, 1e-14);
}

TEST(Assemble, GammaOutsideWindowRejected)
{
    EXPECT_EQ(code_of([] { flat_cone(Extension::with_C_omega, 64, 5.0); }), ErrorCode::InvalidArgument);
}

TEST(Assemble, ExtensionDichotomy)
{
    const SpectrumReport with = spectrum_check(flat_cone(Extension::with_C_omega));
    EXPECT_TRUE(with.ok());
    EXPECT_EQ(with.kernel_dim, 1);
    EXPECT_GE(with.min_eigenvalue, -1e-8);
    const SpectrumReport without = spectrum_check(flat_cone(Extension::minimal));
    EXPECT_TRUE(without.ok());
    EXPECT_EQ(without.kernel_dim, 0);
    EXPECT_GT(without.min_eigenvalue, 0.0);
}

TEST(Assemble, KernelVectorIsConstantNearTip)
{
    const ConeOperator op = flat_cone(Extension::with_C_omega);
    const auto [values, vectors] = block_eigensystem(op.blocks()[0].laplacian);
    EXPECT_LT(std::abs(values(0)), 1e-8);
    const Vector k = vectors.col(0) / vectors(0, 0);
    for (int i = 0; i < 40; ++i) EXPECT_NEAR(std::abs(k(i) - 1.0), 0.0, 1e-6);
}

TEST(Assemble, HighModeRayleighBound)
{
    const ConeOperator op = assemble_cone_laplacian(CrossSection::circle(11), ConeGrid(1e-3, 64, -0.5),
                                                    Extension::with_C_omega);
    const ModeBlock& b = op.blocks()[10];
    EXPECT_DOUBLE_EQ(b.eigenvalue, -100.0);
    const auto [values, vectors] = block_eigensystem(b.laplacian);
    EXPECT_GE(values(0), 100.0);
}

TEST(Assemble, WeightedBlocksAreSymmetric)
{
    const SpectrumReport r = spectrum_check(flat_cone(Extension::with_C_omega));
    for (const auto& b : r.blocks) EXPECT_LE(b.symmetry_defect, 1e-10);
}

TEST(Assemble, DimensionCountsMultiplicity)
{
    const ConeOperator op = flat_cone(Extension::with_C_omega, 64, -0.5, 3);
    // modes 0 (augmented), 1 (x2), 2 (x2)
    EXPECT_EQ(op.dim(), 65 + 4 * 64);
    EXPECT_EQ(op.dim(1), 65);
}

TEST(MellinNorm, Examples)
{
    const ConeOperator op = assemble_cone_laplacian(CrossSection::circle(1), ConeGrid(1e-3, 256, -0.5),
                                                    Extension::with_C_omega);
    EXPECT_EQ(mellin_norm(ConeFunction::zero(op), 0, -0.5, op), 0.0);
    const double beta = 0.7;
    const ConeFunction u = ConeFunction::radial(op, powers(op.grid(), beta));
    // int x^{2 beta + n + 1 - 2 gamma} dx / x over [x_min, 1]
    const double p = 2 * beta + 1 + 1 + 1.0;
    const double exact = (1.0 - std::pow(1e-3, p)) / p;
    const double got = mellin_norm(u, 0, -0.5, op);
    EXPECT_NEAR(got * got / exact, 1.0, 0.01);
    ConeFunction twice = u;
    twice.coefficients[0] *= 2.0;
    EXPECT_NEAR(mellin_norm(twice, 2, -0.5, op), 2.0 * mellin_norm(u, 2, -0.5, op), 1e-12);
    EXPECT_EQ(code_of([&] { mellin_norm(u, 3, -0.5, op); }), ErrorCode::UnsupportedSmoothness);
}

TEST(TipDecay, Examples)
{
    const ConeGrid g(1e-6, 128, -0.5);
    const ConeOperator op = assemble_cone_laplacian(CrossSection::circle(1), g, Extension::with_C_omega);
    const TipDecayFit exact = tip_decay_fit(ConeFunction::radial(op, powers(g, 0.8)), g, 1e-6, 1e-2);
    EXPECT_NEAR(exact.alpha, 0.8, 1e-6);
    EXPECT_GT(exact.r2, 0.9999);
    const TipDecayFit mixed = tip_decay_fit(ConeFunction::radial(op, powers(g, 0.8, 0.01)), g, 1e-6, 0.1);
    EXPECT_GE(mixed.alpha, 0.79);
    EXPECT_LE(mixed.alpha, 0.81);
    const TipDecayFit flat = tip_decay_fit(ConeFunction::radial(op, Vector::Ones(128)), g, 1e-6, 1e-2);
    EXPECT_NEAR(flat.alpha, 0.0, 1e-12);
    EXPECT_EQ(code_of([&] { tip_decay_fit(ConeFunction::zero(op), g, 1e-6, 1e-2); }), ErrorCode::WindowEmpty);
}

TEST(Dilation, CovarianceHolds)
{
    const ConeOperator op = assemble_cone_laplacian(CrossSection::circle(2), ConeGrid(1e-6, 256, -0.5),
                                                    Extension::with_C_omega);
    EXPECT_LE(dilation_covariance_check(op, 1.0, 0), 1e-14);
    for (int k : {1, 2, 4}) EXPECT_LE(dilation_covariance_check(op, 1.0, k), 1e-10) << "k = " << k;
    DilationOptions o;
    o.block = 1;
    EXPECT_LE(dilation_covariance_check(op, Complex(2.0, 1.0), 2, o), 1e-10);
}

TEST(Dilation, Errors)
{
    const ConeOperator op = flat_cone(Extension::with_C_omega, 64, -0.5, 1);
    EXPECT_EQ(code_of([&] { dilation_covariance_check(op, 1.0, 16); }), ErrorCode::ShiftTooLarge);
    DilationOptions o;
    o.support = std::pair{62, 63};
    EXPECT_EQ(code_of([&] { dilation_covariance_check(op, 1.0, 2, o); }), ErrorCode::WindowEmpty);
}

TEST(ConeFunction, BlockVectorRoundTrip)
{
    const ConeOperator op = flat_cone(Extension::with_C_omega, 64, -0.5, 2);
    ConeFunction u = ConeFunction::radial(op, powers(op.grid(), 1.0), 2.0);
    const Vector v = u.block_vector(op, 0);
    EXPECT_EQ(v.size(), 65);
    EXPECT_EQ(v(0), Complex(2.0));
    ConeFunction w = ConeFunction::zero(op);
    w.set_block_vector(op, 0, v);
    EXPECT_LT((w.coefficients[0] - u.coefficients[0]).norm(), 1e-14);
    EXPECT_TRUE(u.is_radial(op));
}
