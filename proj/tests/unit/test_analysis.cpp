#include "fpblock/analysis.hpp"
#include "fpblock/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace fpblock;

namespace {

double max_abs(const std::vector<double>& x) {
    double m = 0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST(KernelBasis, CountAndLabelOrder) {
    for (int n : {11, 21, 31}) {
        const KernelBasis b = laplacian_kernel_basis(n);
        EXPECT_EQ(b.vectors.size(), static_cast<std::size_t>(4 * n - 4));
        EXPECT_EQ(b.labels.size(), b.vectors.size());
        for (std::size_t i = 1; i < b.labels.size(); ++i) EXPECT_LT(b.labels[i - 1], b.labels[i]);
        EXPECT_EQ(b.labels.back(), (BasisLabel{'l', 0, 4}));
    }
    EXPECT_THROW(laplacian_kernel_basis(10), PreconditionError);
    EXPECT_THROW(laplacian_kernel_basis(3), PreconditionError);
}

TEST(KernelBasis, VectorsAreUnitAndAnnihilated) {
    const int n = 21;
    const KernelBasis b = laplacian_kernel_basis(n);
    const InteriorOperator a = assemble_diffusion(Grid::cube(2, 0.0, 1.0, n));
    for (std::size_t i = 0; i < b.vectors.size(); ++i) {
        double s = 0;
        for (double x : b.vectors[i]) s += x * x;
        EXPECT_NEAR(s, 1.0, 1e-12);
        EXPECT_LE(max_abs(fpblock::apply(a, b.vectors[i])), 1e-8) << "vector " << i;
    }
}

TEST(KernelBasis, HandComputedMember) {
    // (k=1, p=1): sin(2πx)·e^{c(y-1)}, c = (N-1)·arccosh(2 - cos(2π/(N-1))), normalized.
    const int n = 11;
    const KernelBasis b = laplacian_kernel_basis(n);
    const double h = 1.0 / (n - 1);
    const double c = std::acosh(2.0 - std::cos(2 * std::numbers::pi * h)) / h;
    std::vector<double> v(n * n);
    double s = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            v[i * n + j] = std::sin(2 * std::numbers::pi * i * h) * std::exp(c * j * h);
            s += v[i * n + j] * v[i * n + j];
        }
    }
    ASSERT_EQ(b.labels[0], (BasisLabel{'k', 1, 1}));
    for (int i = 0; i < n * n; ++i) EXPECT_NEAR(b.vectors[0][i], v[i] / std::sqrt(s), 1e-12);
}

TEST(KernelBasis, QrDiagonalsPositiveAtSmallN) {
    const auto d = qr_diagonals(laplacian_kernel_basis(21));
    ASSERT_EQ(d.size(), 80u);
    for (double x : d) EXPECT_GT(x, 1e-6);
    EXPECT_NEAR(d.front(), 1.0, 1e-12);
}

TEST(BoundaryLayer, MembershipIsSymmetric) {
    const Grid g = Grid::cube(2, 0.0, 1.0, 10);
    EXPECT_TRUE(in_boundary_layer(g, {0, 5, 0}, 1));
    EXPECT_TRUE(in_boundary_layer(g, {9, 5, 0}, 1));
    EXPECT_FALSE(in_boundary_layer(g, {1, 5, 0}, 1));
    EXPECT_TRUE(in_boundary_layer(g, {1, 5, 0}, 2));
    EXPECT_TRUE(in_boundary_layer(g, {5, 8, 0}, 2));
    EXPECT_FALSE(in_boundary_layer(g, {5, 7, 0}, 2));
}

TEST(BoundaryWeight, ClosedFormCases) {
    const Grid g = Grid::cube(2, 0.0, 1.0, 10);
    DensityField e(g, std::vector<double>(100, 1.0));
    // uniform error: ρ = sqrt(|Θ_D| / N²)
    EXPECT_NEAR(boundary_weight_rho(e, 1), std::sqrt(36.0 / 100.0), 1e-14);
    EXPECT_NEAR(boundary_weight_rho(e, 2), std::sqrt(64.0 / 100.0), 1e-14);
    DensityField edge(g);
    edge.at({0, 3, 0}) = 2.0;
    EXPECT_DOUBLE_EQ(boundary_weight_rho(edge, 1), 1.0);
    DensityField center(g);
    center.at({5, 5, 0}) = 2.0;
    EXPECT_DOUBLE_EQ(boundary_weight_rho(center, 3), 0.0);
    EXPECT_THROW(boundary_weight_rho(DensityField(g), 1), UndefinedRatioError);
}

TEST(PrincipalAngles, WholeGridLayerGivesZeroAngles) {
    const InteriorOperator a = assemble_diffusion(Grid::cube(2, 0.0, 1.0, 9));
    const AngleReport r = principal_angles(a, 5);
    EXPECT_EQ(r.angles.size(), 32u);
    for (double x : r.angles) EXPECT_NEAR(x, 0.0, 1e-6);
    EXPECT_NEAR(r.p_d, 1.0, 1e-10);
    EXPECT_TRUE(r.warning.empty());
}

TEST(PrincipalAngles, MeanCosineGrowsWithThickness) {
    const InteriorOperator a = assemble(ring_model(1.0), Grid::cube(2, -2.0, 2.0, 20));
    const auto reports = principal_angles(a, std::vector<int>{1, 2, 3});
    ASSERT_EQ(reports.size(), 3u);
    for (const auto& r : reports) {
        EXPECT_EQ(r.angles.size(), 76u);
        for (std::size_t i = 1; i < r.angles.size(); ++i) EXPECT_LE(r.angles[i - 1], r.angles[i]);
        for (double x : r.angles) {
            EXPECT_GE(x, 0.0);
            EXPECT_LE(x, std::numbers::pi / 2 + 1e-12);
        }
    }
    EXPECT_LT(reports[0].p_d, reports[1].p_d);
    EXPECT_LT(reports[1].p_d, reports[2].p_d);
    // most of the kernel lives in the outermost layers
    EXPECT_GT(reports[0].p_d, 0.5);
}

TEST(PrincipalAngles, Validation) {
    const InteriorOperator a = assemble_diffusion(Grid::cube(2, 0.0, 1.0, 9));
    EXPECT_THROW(principal_angles(a, 0), PreconditionError);
    const InteriorOperator big = assemble_diffusion(Grid::cube(2, 0.0, 1.0, 65));
    EXPECT_THROW(principal_angles(big, 1), ConfigurationError);
}

TEST(ErrorNorms, ConstantAndLinearDifferences) {
    const Grid g = Grid::cube(2, 0.0, 2.0, 8);
    const DensityField zero(g);
    const DensityField c(g, std::vector<double>(64, 0.5));
    // sqrt(h² Σ 0.25) = 0.5·sqrt(area)
    EXPECT_NEAR(discrete_l2_error(c, zero), 0.5 * 2.0, 1e-14);
    EXPECT_NEAR(discrete_h1_error(c, zero), 0.5 * 2.0, 1e-14);

    const DensityField lin = DensityField::sample(g, [](const Point& p) { return 3 * p[0]; });
    double l2sq = 0;
    for (double x : lin.values) l2sq += x * x;
    l2sq *= g.cell_volume();
    // forward differences along x: 7·8 pairs of slope 3; along y: zero
    const double grad_sq = g.cell_volume() * 7 * 8 * 9.0;
    EXPECT_NEAR(discrete_l2_error(lin, zero), std::sqrt(l2sq), 1e-12);
    EXPECT_NEAR(discrete_h1_error(lin, zero), std::sqrt(l2sq + grad_sq), 1e-12);
    EXPECT_THROW(discrete_l2_error(lin, DensityField(Grid::cube(2, 0.0, 2.0, 4))), DimensionError);
}

TEST(ErrorNorms, DifferenceField) {
    const Grid g = Grid::cube(1, 0.0, 1.0, 4);
    const DensityField a(g, {1, 2, 3, 4});
    const DensityField b(g, {1, 1, 1, 1});
    EXPECT_EQ(difference(a, b).values, (std::vector<double>{0, 1, 2, 3}));
}

TEST(Convergence, SmallStudyProducesRowsAndCsv) {
    ConvergenceConfig cfg;
    cfg.mesh_sizes = {32};
    cfg.block_cells = 16;
    cfg.samples_per_cell = 50;
    cfg.burn_in = 1000;
    const auto rows = convergence_study(cfg);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].method, "mc");
    EXPECT_EQ(rows[3].method, "shift");
    for (const auto& r : rows) {
        EXPECT_EQ(r.n, 32);
        EXPECT_EQ(r.samples, samples_for_mesh(32, 50));
        EXPECT_GT(r.l2, 0.0);
        EXPECT_GT(r.h1, r.l2);
    }
    // projection reduces the raw Monte Carlo error
    EXPECT_LT(rows[1].l2, rows[0].l2);
    std::ostringstream os;
    write_convergence_csv(os, rows);
    EXPECT_EQ(os.str().rfind("n,method,samples,l2,h1,seconds\n", 0), 0u);
    EXPECT_EQ(samples_for_mesh(256, 390.625), 25600000u);

    cfg.mesh_sizes = {40};
    EXPECT_THROW(convergence_study(cfg), ConfigurationError);
}
