// Copyright 2026 The fraclat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "fraclat/ids.hpp"
#include "oracles.hpp"

namespace {

using namespace fraclat;

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

DisorderSpec uniform(double coupling, std::uint64_t seed) {
    DisorderSpec s;
    s.coupling = coupling;
    s.seed = seed;
    return s;
}

KernelTable dft(int dim, double alpha, int radius) {
    return kernel_table(dim, alpha, radius, KernelMethod::DFTGrid, QuadSpec{1e-11, 1e-11, 2000, 1.0});
}

TEST(IDSCounting, FreeModelMatchesExactCurve) {
    const auto k = dft(1, 1.0, 200);
    const auto e = linspace(0.0, 4.0, 81);
    const auto c = ids_counting_estimate({1, 100}, BoundaryCondition::Free, k, uniform(0.0, 1), e, 1);
    double sup = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) sup = std::max(sup, std::abs(c.n_hat[i] - oracle::free_ids_1d(e[i])));
    EXPECT_LE(sup, 0.02);
    EXPECT_NEAR(c.n_hat[40], 0.5, 0.02);  // E = 2
}

TEST(IDSCounting, Extremes) {
    const auto k = dft(1, 0.5, 20);
    const std::vector<double> e{-1.0, 100.0};
    const auto c = ids_counting_estimate({1, 10}, BoundaryCondition::Neumann, k, uniform(1.0, 3), e, 4);
    EXPECT_EQ(c.n_hat[0], 0.0);
    EXPECT_EQ(c.n_hat[1], 1.0);
    EXPECT_EQ(c.std_error[0], 0.0);
}

TEST(IDSCounting, CurveInvariants) {
    const auto k = dft(2, 0.5, 8);
    const auto e = linspace(0.0, 4.0, 30);
    for (auto bc : {BoundaryCondition::Free, BoundaryCondition::Neumann, BoundaryCondition::Dirichlet}) {
        const auto c = ids_counting_estimate({2, 4}, bc, k, uniform(1.0, 5), e, 6);
        for (std::size_t i = 0; i < e.size(); ++i) {
            EXPECT_GE(c.n_hat[i], 0.0);
            EXPECT_LE(c.n_hat[i], 1.0);
            EXPECT_TRUE(std::isfinite(c.std_error[i]));
            if (i > 0) EXPECT_GE(c.n_hat[i], c.n_hat[i - 1]);
        }
    }
}

TEST(IDSCounting, Preconditions) {
    const auto k = dft(1, 0.5, 20);
    const std::vector<double> bad{1.0, 0.5};
    EXPECT_THROW(ids_counting_estimate({1, 5}, BoundaryCondition::Free, k, uniform(1, 1), bad, 2), PreconditionError);
    const std::vector<double> e{1.0};
    EXPECT_THROW(ids_counting_estimate({1, 5}, BoundaryCondition::Free, k, uniform(1, 1), e, 0), PreconditionError);
    EXPECT_THROW(ids_counting_estimate({1, 11}, BoundaryCondition::Free, k, uniform(1, 1), e, 1), PreconditionError);
}

TEST(IDSCounting, ThreadCountDoesNotChangeResult) {
    const auto k = dft(1, 0.5, 40);
    const auto e = linspace(0.1, 2.0, 12);
    const auto a = ids_counting_estimate({1, 20}, BoundaryCondition::Free, k, uniform(1.0, 11), e, 9, 1);
    const auto b = ids_counting_estimate({1, 20}, BoundaryCondition::Free, k, uniform(1.0, 11), e, 9, 4);
    std::ostringstream sa, sb;
    write_ids_csv(sa, a);
    write_ids_csv(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(IDSCounting, CouplingNeverIncreasesCounts) {
    const auto k = dft(1, 0.75, 30);
    const auto e = linspace(0.05, 2.0, 20);
    const auto weak = ids_counting_estimate({1, 15}, BoundaryCondition::Free, k, uniform(0.5, 2), e, 1);
    const auto strong = ids_counting_estimate({1, 15}, BoundaryCondition::Free, k, uniform(2.0, 2), e, 1);
    for (std::size_t i = 0; i < e.size(); ++i) EXPECT_LE(strong.n_hat[i], weak.n_hat[i]);
}

TEST(IDSProjection, OneSiteBoxIsAStep) {
    const auto k = dft(1, 0.5, 2);
    const double h = k.at(std::vector<int>{0});
    const std::vector<double> e{h - 1e-9, h, h + 1.0};
    const auto c = ids_projection_estimate({1, 0}, k, uniform(0.0, 1), e, 1);
    EXPECT_EQ(c.n_hat[0], 0.0);
    EXPECT_EQ(c.n_hat[1], 1.0);
    EXPECT_EQ(c.n_hat[2], 1.0);
}

TEST(IDSProjection, FullProjectorAboveSpectrum) {
    const auto k = dft(2, 0.5, 6);
    const std::vector<double> e{50.0};
    const auto c = ids_projection_estimate({2, 3}, k, uniform(0.0, 1), e, 1);
    EXPECT_NEAR(c.n_hat[0], 1.0, 1e-12);
    EXPECT_THROW(ids_projection_estimate({2, 3}, k, uniform(0.0, 1), e, 1, 0.0), PreconditionError);
}

TEST(IDSProjection, FullWindowEqualsCounting) {
    // Trace = sum of the diagonal: with the whole box as window both estimators coincide.
    const auto k = dft(1, 0.5, 30);
    const auto e = linspace(0.05, 2.5, 25);
    const auto c = ids_counting_estimate({1, 15}, BoundaryCondition::Free, k, uniform(1.0, 4), e, 5);
    const auto p = ids_projection_estimate({1, 15}, k, uniform(1.0, 4), e, 5, 1.0);
    for (std::size_t i = 0; i < e.size(); ++i) EXPECT_NEAR(c.n_hat[i], p.n_hat[i], 1e-12);
}

TEST(IDSProjection, CloseToCountingAtL60) {
    const auto k = dft(1, 0.5, 120);
    const auto e = linspace(0.2, 2.0, 19);
    const auto c = ids_counting_estimate({1, 60}, BoundaryCondition::Free, k, uniform(1.0, 8), e, 40);
    const auto p = ids_projection_estimate({1, 60}, k, uniform(1.0, 8), e, 40);
    double sup = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) sup = std::max(sup, std::abs(c.n_hat[i] - p.n_hat[i]));
    EXPECT_LE(sup, 0.05);
}

TEST(Sandwich, ThreeSiteCounts) {
    const auto k = dft(1, 1.0, 2);
    const std::vector<double> e{-1.0, 1.5, 1e6};
    const auto s = sandwich({1, 1}, k, uniform(0.0, 1), e, 1);
    EXPECT_TRUE(s.passed());
    EXPECT_DOUBLE_EQ(s.dirichlet.n_hat[1] * 3, 1.0);
    EXPECT_DOUBLE_EQ(s.mid.n_hat[1] * 3, 1.0);
    EXPECT_DOUBLE_EQ(s.neumann.n_hat[1] * 3, 2.0);
    EXPECT_EQ(s.dirichlet.n_hat[0], 0.0);
    EXPECT_EQ(s.neumann.n_hat[2], 1.0);
}

TEST(Sandwich, OrderingHoldsPerRealization) {
    const auto e = linspace(0.0, 3.0, 40);
    for (double alpha : {0.3, 0.7, 1.0}) {
        const auto k1 = dft(1, alpha, 40);
        EXPECT_TRUE(sandwich({1, 20}, k1, uniform(1.0, 21), e, 10).passed()) << alpha;
        const auto k2 = dft(2, alpha, 8);
        EXPECT_TRUE(sandwich({2, 4}, k2, uniform(1.0, 22), e, 5).passed()) << alpha;
    }
}

TEST(EstimatorGap, FreeCaseShrinks) {
    const auto k = dft(1, 0.5, 200);
    const auto e = linspace(0.2, 2.0, 19);
    const auto g = estimator_gap(1, k, uniform(0.0, 1), e, {25, 50, 100}, 1);
    ASSERT_EQ(g.gap.size(), 3u);
    EXPECT_TRUE(g.decreasing());
    EXPECT_LE(g.gap.back(), 0.03);
}

TEST(EstimatorGap, FullWindowGapIsZero) {
    const auto k = dft(1, 0.5, 40);
    const auto e = linspace(0.2, 2.0, 10);
    const auto g = estimator_gap(1, k, uniform(1.0, 3), e, {10, 20}, 3, 1.0);
    for (double x : g.gap) EXPECT_LE(x, 1e-12);
    EXPECT_THROW(estimator_gap(1, k, uniform(1.0, 3), e, {10}, 3), PreconditionError);
}

TEST(BoundarySumTest, MatchesDirectPairSum) {
    for (int d : {1, 2})
        for (double a : {0.25, 0.75})
            for (int L : {0, 1, 3, 5}) {
                const auto b = boundary_sum(d, a, L);
                const double ref = oracle::boundary_pair_sum(d, a, L, 3 * std::max(L, 1));
                EXPECT_NEAR(b.value / ref, 1.0, 1e-12) << d << " " << a << " " << L;
                EXPECT_GT(b.value, 0.0);
            }
}

TEST(BoundarySumTest, TailBoundCoversFartherShells) {
    for (int d : {1, 2}) {
        const double a = 0.5;
        const int L = 3;
        const auto b = boundary_sum(d, a, L);
        const double wide = oracle::boundary_pair_sum(d, a, L, d == 1 ? 2000 : 60);
        EXPECT_LE(wide - b.value, b.tail_bound);
    }
}

TEST(BoundarySumTest, ScalingExamples) {
    EXPECT_LT(boundary_sum(1, 0.75, 8).value / 17.0, boundary_sum(1, 0.75, 4).value / 9.0);
    const auto s = boundary_scaling(1, 0.25);
    EXPECT_NEAR(s.slope_limit, 0.65, 1e-15);
    EXPECT_TRUE(s.passed()) << s.slope;
    for (int d : {1, 2})
        for (double a : {0.25, 0.5, 0.75}) EXPECT_TRUE(boundary_scaling(d, a).passed()) << d << " " << a;
    EXPECT_THROW(boundary_sum(3, 0.5, 2), PreconditionError);
    EXPECT_THROW(boundary_sum(1, 0.5, 65), PreconditionError);
}

TEST(IDSCsv, HeaderAndMetadata) {
    const auto k = dft(1, 1.0, 4);
    const std::vector<double> e{0.5, 1.0};
    const auto c = ids_counting_estimate({1, 2}, BoundaryCondition::Dirichlet, k, uniform(0.25, 77), e, 2);
    std::ostringstream os;
    write_ids_csv(os, c, {{"command", "ids"}});
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "# command=ids");
    std::getline(is, line);
    EXPECT_EQ(line, "energy,n_hat,stderr,realizations,dim,L,alpha,lambda,bc,seed");
    std::getline(is, line);
    EXPECT_EQ(line.substr(0, 4), "0.5,");
    EXPECT_NE(line.find(",2,1,2,1,0.25,dirichlet,77"), std::string::npos) << line;
}

}  // namespace
