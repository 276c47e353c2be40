#include <gtest/gtest.h>

#include <cmath>

#include "undirectify/coupling.hpp"
#include "undirectify/montecarlo.hpp"

using namespace undirectify;

TEST(ExactCoupling, DegenerateProbabilities) {
  Rng rng(1);
  const CoupledSample empty = couple_iag_ieg_exact(EdgeProbabilityFn::constant(4, 0.0, false), rng);
  EXPECT_EQ(empty.graph.edge_count(), 0);
  EXPECT_EQ(empty.digraph.arc_count(), 0);
  EXPECT_EQ(empty.xi1 + empty.xi2, 0);

  const CoupledSample full = couple_iag_ieg_exact(EdgeProbabilityFn::constant(4, 1.0, false), rng);
  EXPECT_EQ(full.graph.edge_count(), 6);
  EXPECT_EQ(full.digraph.arc_count(), 12);
  EXPECT_EQ(full.xi1 + full.xi2, 0);
}

TEST(ExactCoupling, GraphIsAlwaysForgetfulImage) {
  const auto pi = EdgeProbabilityFn::constant(4, 0.3, false);
  Rng base(17);
  for (int k = 0; k < 2000; ++k) {
    Rng rng = base.split(k);
    const CoupledSample sample = couple_iag_ieg_exact(pi, rng);
    EXPECT_EQ(sample.graph, forgetful_map(sample.digraph));
    EXPECT_EQ(recount_xi1(sample.graph, sample.digraph), 0);
    EXPECT_EQ(recount_xi2(sample.graph, sample.digraph), 0);
  }
}

// per-pair edge marginal equals pi' = 1-(1-p)^2 = 0.51 at p = 0.3
TEST(ExactCoupling, EdgeMarginalMatchesPrime) {
  const auto pi = EdgeProbabilityFn::constant(4, 0.3, false);
  Rng base(18);
  const long replicates = 100000;
  std::vector<long> edge_counts(PairIndex::unordered_count(4), 0);
  for (long k = 0; k < replicates; ++k) {
    Rng rng = base.split(k);
    const CoupledSample sample = couple_iag_ieg_exact(pi, rng);
    for (int u = 0; u < PairIndex::unordered_count(4); ++u)
      if (sample.graph.has_edge_at(u)) ++edge_counts[u];
  }
  const double se = std::sqrt(0.51 * 0.49 / replicates);
  for (long c : edge_counts)
    EXPECT_NEAR(c / static_cast<double>(replicates), 0.51, 3.0 * se);
}

TEST(ApproxCoupling, TrivialAndAsymmetricCases) {
  Rng rng(2);
  const CoupledSample zero = couple_iag_ieg_approx(EdgeProbabilityFn::constant(4, 0.0, false), rng);
  EXPECT_EQ(zero.xi1 + zero.xi2, 0);

  // pi(v,w)=0.2, pi(w,v)=0: the error outcome has probability zero
  std::vector<double> values(PairIndex::ordered_count(4));
  for (std::size_t u = 0; u < values.size(); u += 2) {
    values[u] = 0.2;
    values[u + 1] = 0.0;
  }
  const EdgeProbabilityFn one_sided(4, values, false);
  Rng base(19);
  for (int k = 0; k < 2000; ++k) {
    Rng split = base.split(k);
    const CoupledSample sample = couple_iag_ieg_approx(one_sided, split);
    EXPECT_EQ(sample.xi1, 0);
    EXPECT_EQ(sample.xi2, 0);
    EXPECT_EQ(sample.graph, forgetful_map(sample.digraph));
  }
}

TEST(ApproxCoupling, RejectsPiCircAboveOne) {
  Rng rng(3);
  try {
    couple_iag_ieg_approx(EdgeProbabilityFn::constant(3, 0.6, false), rng);
    FAIL() << "expected rejection";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("(1,2)"), std::string::npos);
  }
}

// n=4, pi = 0.1: E[Xi] = C(4,2) * 0.01 = 0.06 exactly, bounded by (n pi_up)^2
TEST(ApproxCoupling, ErrorLawSmallCase) {
  const auto pi = EdgeProbabilityFn::constant(4, 0.1, false);
  const ApproxCouplingStudy study = run_approx_coupling_study(pi, 100000, 20, {});
  EXPECT_NEAR(study.exact_mean_xi, 0.06, 1e-12);
  EXPECT_NEAR(study.xi.mean(), 0.06, 3.0 * study.xi.se());
  EXPECT_LE(study.xi.mean(), 0.16);
  EXPECT_EQ(study.xi2_violations, 0);
  EXPECT_EQ(study.recount_mismatches, 0);
}

// marginals of the approximate coupling are IAG(pi) and IEG(pi-circ)
TEST(ApproxCoupling, MarginalsMatchExactDistributions) {
  const EdgeProbabilityFn pi(3, {0.1, 0.25, 0.2, 0.15, 0.3, 0.05}, false);
  std::unordered_map<std::uint64_t, long> graph_counts, digraph_counts;
  Rng base(21);
  const long replicates = 200000;
  for (long k = 0; k < replicates; ++k) {
    Rng rng = base.split(k);
    const CoupledSample sample = couple_iag_ieg_approx(pi, rng);
    ++graph_counts[sample.graph.encode()];
    ++digraph_counts[sample.digraph.encode()];
  }
  EXPECT_GT(chi_square_gof(graph_counts, exact_ieg_distribution(pi.circ()), replicates).pvalue,
            0.001);
  EXPECT_GT(chi_square_gof(digraph_counts, exact_iag_distribution(pi), replicates).pvalue,
            0.001);
}

// ---------------------------------------------------------------------------
// ASRG / ESRG coupling
// ---------------------------------------------------------------------------

TEST(SelectionCoupling, FirstStepNeverErrs) {
  const EdgeMassFn mu = EdgeMassFn::uniform(5, EdgeMassFn::Domain::ordered);
  Rng base(30);
  for (int k = 0; k < 500; ++k) {
    Rng rng = base.split(k);
    const CoupledSample sample = couple_asrg_esrg(mu, 1, rng);
    ASSERT_EQ(sample.psi.size(), 2u);
    EXPECT_EQ(sample.psi[1], 0);  // rule III needs an existing reverse arc
    EXPECT_EQ(sample.rules[0], 2);
  }
}

// n=2, m=2: the only possible execution places both arcs, fires rule III
// once, and the graph side cannot place a second edge.
TEST(SelectionCoupling, TwoVertexExhaustiveTrace) {
  const EdgeMassFn mu = EdgeMassFn::uniform(2, EdgeMassFn::Domain::ordered);
  Rng base(31);
  for (int k = 0; k < 100; ++k) {
    Rng rng = base.split(k);
    const CoupledSample sample = couple_asrg_esrg(mu, 2, rng);
    EXPECT_TRUE(sample.degenerate);
    EXPECT_TRUE(sample.digraph.has_arc(1, 2));
    EXPECT_TRUE(sample.digraph.has_arc(2, 1));
    EXPECT_EQ(sample.rule_counts[2], 1);  // rule III fired once
    ASSERT_EQ(sample.psi.size(), 3u);
    EXPECT_EQ(sample.psi[2], 1);
    EXPECT_EQ(sample.graph.edge_count(), 1);
  }
}

TEST(SelectionCoupling, InvariantsOnRandomRuns) {
  const EdgeMassFn mu(3, EdgeMassFn::Domain::ordered,
                      {0.3, 0.1, 0.2, 0.15, 0.15, 0.1});
  Rng base(32);
  long degenerate = 0;
  for (int k = 0; k < 20000; ++k) {
    Rng rng = base.split(k);
    const CoupledSample sample = couple_asrg_esrg(mu, 2, rng);
    if (sample.degenerate) {
      ++degenerate;
      continue;
    }
    EXPECT_EQ(sample.digraph.arc_count(), 2);
    EXPECT_EQ(sample.graph.edge_count(), 2);
    EXPECT_EQ(sample.xi2, 0);
    EXPECT_EQ(sample.xi1, sample.psi.back());
    EXPECT_EQ(recount_xi1(sample.graph, sample.digraph), sample.xi1);
    EXPECT_EQ(recount_xi2(sample.graph, sample.digraph), 0);
    for (std::size_t s = 0; s + 1 < sample.psi.size(); ++s) {
      const int inc = sample.psi[s + 1] - sample.psi[s];
      EXPECT_TRUE(inc == 0 || inc == 1);
      EXPECT_EQ(inc, sample.rules[s] == 3 ? 1 : 0);
    }
  }
  EXPECT_EQ(degenerate, 0);  // at n=3, m=2 a fresh edge is always available
}

TEST(SelectionCoupling, FeasibilityChecks) {
  const EdgeMassFn mu = EdgeMassFn::uniform(3, EdgeMassFn::Domain::ordered);
  Rng rng(33);
  EXPECT_THROW(couple_asrg_esrg(mu, 7, rng), std::invalid_argument);
  const EdgeMassFn unordered = EdgeMassFn::uniform(3, EdgeMassFn::Domain::unordered);
  EXPECT_THROW(couple_asrg_esrg(unordered, 1, rng), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Martingale transform and growth bound
// ---------------------------------------------------------------------------

TEST(MartingaleTransform, HandArithmeticExample) {
  // mu_up = 0.01, Psi_1 = 0: a_1 = 1/99, b_1 = 97/99, M_1 = -1/97
  const MartingaleTrace trace = martingale_transform({0, 0}, 0.01);
  EXPECT_DOUBLE_EQ(trace.m_values[0], 0.0);
  EXPECT_NEAR(trace.a[0], 1.0 / 99.0, 1e-15);
  EXPECT_NEAR(trace.b[0], 97.0 / 99.0, 1e-15);
  EXPECT_NEAR(trace.m_values[1], -1.0 / 97.0, 1e-15);
}

TEST(MartingaleTransform, ZeroErrorPathIsNonincreasing) {
  const std::vector<int> psi(11, 0);
  const MartingaleTrace trace = martingale_transform(psi, 0.005);
  for (int s = 1; s <= 10; ++s) {
    EXPECT_LE(trace.m_values[s], 0.0);
    EXPECT_LE(trace.m_values[s], trace.m_values[s - 1] + 1e-15);
  }
}

TEST(MartingaleTransform, SingularitiesRejected) {
  EXPECT_THROW(martingale_transform({0, 0, 0}, 0.5), std::domain_error);  // m=2 >= 1/mu=2
  EXPECT_THROW(martingale_transform({0}, 0.0), std::invalid_argument);
  EXPECT_THROW(martingale_transform({0}, 1.5), std::invalid_argument);
  // b_1 = 0 exactly when 1/mu - 1 = 2
  EXPECT_THROW(martingale_transform({0, 0}, 1.0 / 3.0), std::domain_error);
}

TEST(MartingaleTransform, RecursiveMatchesClosedForm) {
  Rng rng(40);
  for (int trial = 0; trial < 100; ++trial) {
    Rng local = rng.split(trial);
    const int m = 1 + static_cast<int>(local.below(15));
    const double mu_up = 0.001 + 0.01 * local.next_double();
    std::vector<int> psi{0};
    for (int s = 1; s <= m; ++s)
      psi.push_back(psi.back() + ((local.bernoulli(0.4) && 2 * psi.back() < s) ? 1 : 0));
    const MartingaleTrace trace = martingale_transform(psi, mu_up);
    for (int s = 0; s <= m; ++s)
      EXPECT_NEAR(trace.m_values[s], martingale_value_closed_form(psi, mu_up, s), 1e-9);
  }
}

TEST(GrowthBound, ExactValues) {
  EXPECT_DOUBLE_EQ(growth_bound(0, 100.0), 0.0);
  EXPECT_NEAR(growth_bound(1, 100.0), 1.0 / 99.0, 1e-15);
  EXPECT_THROW(growth_bound(5, 5.0), std::domain_error);
  EXPECT_THROW(growth_bound(5, 4.0), std::domain_error);
}

// the provable finite-size chain: sum <= m^2/(f-m), and <= 2 m^2/f once
// f >= 2m
TEST(GrowthBound, FiniteSizeChainHolds) {
  for (int m = 1; m <= 20; ++m) {
    for (double f : {2.0 * m + 1.0, 3.0 * m + 0.5, 10.0 * m, 100.0 * m}) {
      const double sum = growth_bound(m, f);
      EXPECT_LE(sum, m * m / (f - m) + 1e-12) << "m=" << m << " f=" << f;
      if (f >= 2.0 * m)
        EXPECT_LE(sum, 2.0 * m * m / f + 1e-12) << "m=" << m << " f=" << f;
    }
  }
}

// ---------------------------------------------------------------------------
// Super-martingale drift
// ---------------------------------------------------------------------------

TEST(DriftCheck, ZeroAndOneStepCases) {
  const EdgeMassFn mu = EdgeMassFn::uniform(6, EdgeMassFn::Domain::ordered);
  const DriftReport zero = supermartingale_drift_check(mu, 0, 100, 7);
  EXPECT_TRUE(zero.pass);
  EXPECT_DOUBLE_EQ(zero.estimate, 0.0);

  // m=1: Psi_1 = 0 surely, so M_1 = -a_1/b_1 deterministically
  const DriftReport one = supermartingale_drift_check(mu, 1, 500, 7);
  const double f = 1.0 / mu.up();
  const double expected = -(1.0 / (f - 1.0)) / (1.0 - 2.0 / (f - 1.0));
  EXPECT_NEAR(one.estimate, expected, 1e-12);
  EXPECT_NEAR(one.se, 0.0, 1e-12);
  EXPECT_TRUE(one.pass);
}

TEST(DriftCheck, UniformCaseDriftNonpositive) {
  const EdgeMassFn mu = EdgeMassFn::uniform(10, EdgeMassFn::Domain::ordered);
  const DriftReport report = supermartingale_drift_check(mu, 5, 20000, 99);
  EXPECT_TRUE(report.pass);
  EXPECT_LT(report.estimate, 0.0);  // literal indexing gives strictly negative drift
}
