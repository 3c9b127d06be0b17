#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "godec/error.hpp"
#include "godec/matcore.hpp"
#include "support.hpp"

using namespace godec;
using godec::test::randn;
using godec::test::to_eigen;

TEST(Rng, SameSeedAndLabelRepeat) {
  const RngSeed s{42, "x"};
  EXPECT_EQ(gaussian_matrix(1, 1, 1.0, s), gaussian_matrix(1, 1, 1.0, s));
  EXPECT_NE(gaussian_matrix(1, 1, 1.0, s), gaussian_matrix(1, 1, 1.0, s.derive("child")));
  EXPECT_NE(gaussian_matrix(4, 4, 1.0, RngSeed{1, "x"}), gaussian_matrix(4, 4, 1.0, RngSeed{2, "x"}));
}

TEST(Rng, DerivedLabelsAreDistinct) {
  const RngSeed root{7, "root"};
  EXPECT_EQ(root.derive("iter", 3).label, "root/iter#3");
  EXPECT_NE(RandomStream(root.derive("iter", 1)).next_u64(), RandomStream(root.derive("iter", 2)).next_u64());
}

TEST(Rng, BelowStaysInRange) {
  RandomStream rng(RngSeed{3, "below"});
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(GaussianMatrix, MomentsOverFiftySeeds) {
  // Mean has sd 1e-3 and variance sd 1.4e-3 at 1e6 samples; the ±0.01 / ±0.02
  // windows are ~10 sd wide, checked on every seed.
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DenseMatrix g = gaussian_matrix(1000, 1000, 1.0, RngSeed{seed, "moments"});
    const auto d = g.data();
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d.size() - 1);
    EXPECT_NEAR(mean, 0.0, 0.01) << "seed " << seed;
    EXPECT_NEAR(var, 1.0, 0.02) << "seed " << seed;
  }
}

TEST(GaussianMatrix, ScaleAndErrors) {
  const DenseMatrix a = gaussian_matrix(500, 25, 1.0, RngSeed{5, "a"});
  const DenseMatrix b = gaussian_matrix(500, 25, 1.0 / std::sqrt(500.0), RngSeed{5, "a"});
  EXPECT_NEAR(test::max_abs_diff(a * (1.0 / std::sqrt(500.0)), b), 0.0, 1e-15);
  EXPECT_THROW(gaussian_matrix(0, 3, 1.0, RngSeed{}), DimensionError);
  EXPECT_THROW(gaussian_matrix(3, 0, 1.0, RngSeed{}), DimensionError);
  EXPECT_THROW(gaussian_matrix(3, 3, 0.0, RngSeed{}), ParameterError);
}

TEST(DenseMatrix, RejectsNonFinite) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(DenseMatrix(1, 2, std::vector<double>{1.0, nan}), NonFiniteError);
  EXPECT_THROW((DenseMatrix{{1.0, std::numeric_limits<double>::infinity()}}), NonFiniteError);
  EXPECT_THROW(DenseMatrix(2, 2, std::vector<double>{1.0}), DimensionError);
}

TEST(QrThin, Identity) {
  const QrFactors f = qr_thin(DenseMatrix::identity(3));
  EXPECT_EQ(f.q, DenseMatrix::identity(3));
  EXPECT_EQ(f.r, DenseMatrix::identity(3));
}

TEST(QrThin, SingleColumn) {
  const QrFactors f = qr_thin(DenseMatrix{{3.0}, {4.0}});
  EXPECT_NEAR(f.q(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(f.q(1, 0), 0.8, 1e-15);
  EXPECT_NEAR(f.r(0, 0), 5.0, 1e-14);
}

TEST(QrThin, RandomReconstruction) {
  const DenseMatrix a = randn(20, 5, 11);
  const QrFactors f = qr_thin(a);
  EXPECT_LE(test::rel_fro(matmul(f.q, f.r), a), 1e-12);
  EXPECT_LE(orthonormality_error(f.q), 1e-12);
}

TEST(QrThin, ShapesUpTo500x100) {
  const std::pair<std::size_t, std::size_t> shapes[] = {{1, 1}, {7, 7}, {30, 4}, {100, 100}, {500, 100}, {200, 1}};
  for (auto [m, n] : shapes) {
    const DenseMatrix a = randn(m, n, m * 1000 + n);
    const QrFactors f = qr_thin(a);
    EXPECT_LE(orthonormality_error(f.q), 1e-10) << m << "x" << n;
    EXPECT_LE((matmul(f.q, f.r) - a).frobenius_norm(), 1e-10 * a.frobenius_norm()) << m << "x" << n;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GE(f.r(i, i), 0.0);
      for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(f.r(i, j), 0.0);
    }
  }
}

TEST(QrThin, UniqueUnderSignConvention) {
  // Q·R with nonnegative diag(R) is unique: compare against Eigen's QR with
  // its signs flipped to the same convention.
  const DenseMatrix a = randn(12, 6, 99);
  const QrFactors f = qr_thin(a);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(to_eigen(a));
  Eigen::MatrixXd r = qr.matrixQR().topRows(6).triangularView<Eigen::Upper>();
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(12, 6);
  for (int k = 0; k < 6; ++k) {
    if (r(k, k) < 0) {
      r.row(k) *= -1.0;
      q.col(k) *= -1.0;
    }
  }
  EXPECT_LE((to_eigen(f.q) - q).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((to_eigen(f.r) - r).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(QrThin, WideInputRejected) { EXPECT_THROW(qr_thin(randn(2, 3, 1)), DimensionError); }

TEST(SvdFull, Diagonal) {
  const SvdFactors f = svd_full(DenseMatrix{{3.0, 0.0}, {0.0, 1.0}});
  ASSERT_EQ(f.sigma.size(), 2u);
  EXPECT_NEAR(f.sigma[0], 3.0, 1e-15);
  EXPECT_NEAR(f.sigma[1], 1.0, 1e-15);
}

TEST(SvdFull, RankOneOuterProduct) {
  const DenseMatrix x = randn(6, 1, 3);
  const DenseMatrix y = randn(4, 1, 4);
  const SvdFactors f = svd_full(matmul_nt(x, y));
  EXPECT_NEAR(f.sigma[0], x.frobenius_norm() * y.frobenius_norm(), 1e-12);
  for (std::size_t i = 1; i < f.sigma.size(); ++i) EXPECT_LE(f.sigma[i], 1e-14);
  EXPECT_LE(orthonormality_error(f.u), 1e-10);
  EXPECT_LE(orthonormality_error(f.v), 1e-10);
}

TEST(SvdFull, HilbertLeadingValueAgainstPowerIteration) {
  const DenseMatrix h = test::hilbert(8);
  const Eigen::MatrixXd he = to_eigen(h);
  const Eigen::MatrixXd hth = he.transpose() * he;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(8);
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    v = hth * v;
    lambda = v.norm();
    v /= lambda;
  }
  const double oracle = std::sqrt(lambda);
  EXPECT_NEAR(oracle, 1.6959389, 1e-6);
  EXPECT_NEAR(svd_full(h).sigma[0], oracle, 1e-6);
}

TEST(SvdFull, ReconstructsAndMatchesGramEigenvalues) {
  const std::pair<std::size_t, std::size_t> shapes[] = {{10, 10}, {25, 7}, {7, 25}, {60, 40}, {1, 5}, {5, 1}};
  for (auto [m, n] : shapes) {
    const DenseMatrix a = randn(m, n, 17 * m + n);
    const SvdFactors f = svd_full(a);
    EXPECT_LE(test::rel_fro(f.reconstruct(), a), 1e-9) << m << "x" << n;
    EXPECT_LE(orthonormality_error(f.u), 1e-10);
    EXPECT_LE(orthonormality_error(f.v), 1e-10);
    EXPECT_TRUE(std::is_sorted(f.sigma.rbegin(), f.sigma.rend()));

    const Eigen::MatrixXd ae = to_eigen(a);
    const Eigen::MatrixXd gram = m >= n ? Eigen::MatrixXd(ae.transpose() * ae) : Eigen::MatrixXd(ae * ae.transpose());
    Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues();
    std::vector<double> roots;
    for (Eigen::Index i = ev.size(); i-- > 0;) roots.push_back(std::sqrt(std::max(ev(i), 0.0)));
    for (std::size_t i = 0; i < f.sigma.size(); ++i) {
      EXPECT_NEAR(f.sigma[i], roots[i], 1e-9 * roots[i]) << m << "x" << n << " i=" << i;
    }
  }
}

TEST(SvdFull, RankDeficientAndZeroKeepOrthonormalFactors) {
  const DenseMatrix low = matmul(randn(9, 2, 1), randn(2, 6, 2));
  const SvdFactors f = svd_full(low);
  EXPECT_LE(orthonormality_error(f.u), 1e-10);
  EXPECT_LE(orthonormality_error(f.v), 1e-10);
  EXPECT_LE(f.sigma[2], 1e-12 * f.sigma[0]);

  const SvdFactors z = svd_full(DenseMatrix(4, 3));
  for (double s : z.sigma) EXPECT_EQ(s, 0.0);
  EXPECT_LE(orthonormality_error(z.u), 1e-12);
  EXPECT_LE(orthonormality_error(z.v), 1e-12);
}

TEST(SvdTruncate, DiagonalAndExactRank) {
  EXPECT_EQ(svd_truncate(DenseMatrix{{3.0, 0.0}, {0.0, 1.0}}, 1), (DenseMatrix{{3.0, 0.0}, {0.0, 0.0}}));
  const DenseMatrix a = matmul(randn(8, 3, 5), randn(3, 9, 6));
  EXPECT_LE(test::max_abs_diff(svd_truncate(a, 3), a), 1e-10);
  EXPECT_LE(test::max_abs_diff(svd_truncate(a, 5), a), 1e-10);
}

// Alternating least squares over rank-r factorizations from random starts.
double als_best_residual(const Eigen::MatrixXd& a, int r, int restarts, std::mt19937_64& gen) {
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < restarts; ++s) {
    Eigen::MatrixXd v = test::std_randn(a.cols(), r, gen);
    Eigen::MatrixXd u;
    for (int it = 0; it < 100; ++it) {
      u = a * v * (v.transpose() * v).inverse();
      v = a.transpose() * u * (u.transpose() * u).inverse();
    }
    best = std::min(best, (a - u * v.transpose()).norm());
  }
  return best;
}

TEST(SvdTruncate, EckartYoungAgainstAlsOracle) {
  const DenseMatrix a = randn(10, 10, 21);
  const SvdFactors f = svd_full(a);
  double tail = 0.0;
  for (std::size_t i = 3; i < 10; ++i) tail += f.sigma[i] * f.sigma[i];
  const double residual = (a - svd_truncate(a, 3)).frobenius_norm();
  EXPECT_NEAR(residual, std::sqrt(tail), 1e-9);

  std::mt19937_64 gen(2024);
  const double oracle = als_best_residual(to_eigen(a), 3, 200, gen);
  EXPECT_GE(oracle, residual - 1e-6);
}

TEST(SvdTruncate, TailIdentityOnHundredMatrices) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const DenseMatrix a = randn(8, 8, 500 + seed);
    const Eigen::VectorXd sv = test::eigen_singular_values(a);
    for (std::size_t r = 1; r <= 7; ++r) {
      const double tail = std::sqrt(sv.tail(Eigen::Index(8 - r)).squaredNorm());
      const double residual = (a - svd_truncate(a, r)).frobenius_norm();
      EXPECT_NEAR(residual, tail, 1e-9 * tail) << "seed " << seed << " r " << r;
    }
  }
}

TEST(SvdTruncate, RankOutOfRange) {
  const DenseMatrix a = randn(4, 3, 1);
  EXPECT_THROW(svd_truncate(a, 0), ParameterError);
  EXPECT_THROW(svd_truncate(a, 4), ParameterError);
}

TEST(HardThreshold, Examples) {
  EXPECT_EQ(hard_threshold_entries(DenseMatrix{{3.0, -1.0}, {0.5, 2.0}}, 2), (DenseMatrix{{3.0, 0.0}, {0.0, 2.0}}));
  EXPECT_EQ(hard_threshold_entries(randn(3, 3, 1), 0), DenseMatrix(3, 3));
  const DenseMatrix x{{1.0, 2.0}, {3.0, 4.0}};
  const DenseMatrix s = hard_threshold_entries(x, 2);
  EXPECT_EQ(s, (DenseMatrix{{0.0, 0.0}, {3.0, 4.0}}));
  EXPECT_DOUBLE_EQ((x - s).frobenius_norm(), std::sqrt(5.0));
  EXPECT_EQ(hard_threshold_entries(x, 4), x);
  EXPECT_THROW(hard_threshold_entries(x, 5), ParameterError);
}

TEST(HardThreshold, TiesGoToEarlierIndex) {
  const DenseMatrix x{{1.0, -2.0, 2.0}, {2.0, 0.0, 1.0}};
  EXPECT_EQ(hard_threshold_entries(x, 2), (DenseMatrix{{0.0, -2.0, 2.0}, {0.0, 0.0, 0.0}}));
}

// Residual of keeping exactly the entries in `support`.
double support_residual(const DenseMatrix& x, const std::vector<std::size_t>& support) {
  double kept = 0.0;
  for (std::size_t i : support) kept += x.data()[i] * x.data()[i];
  return std::sqrt(std::max(0.0, x.squared_norm() - kept));
}

TEST(HardThreshold, OptimalAgainstSupportEnumeration) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 20; ++trial) {
    // Distinct magnitudes: a random permutation of 1..16 with random signs.
    std::vector<double> vals(16);
    std::iota(vals.begin(), vals.end(), 1.0);
    std::shuffle(vals.begin(), vals.end(), gen);
    for (double& v : vals) v *= (gen() & 1) ? 1.0 : -1.0;
    const DenseMatrix x(4, 4, vals);
    for (std::size_t k = 0; k <= 16; ++k) {
      const double got = (x - hard_threshold_entries(x, k)).frobenius_norm();
      if (k <= 3) {
        std::vector<bool> pick(16, false);
        std::fill(pick.begin(), pick.begin() + static_cast<long>(k), true);
        do {
          std::vector<std::size_t> sup;
          for (std::size_t i = 0; i < 16; ++i)
            if (pick[i]) sup.push_back(i);
          ASSERT_LE(got, support_residual(x, sup) + 1e-12);
        } while (std::prev_permutation(pick.begin(), pick.end()));
      } else {
        std::vector<std::size_t> idx(16);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (int s = 0; s < 1000; ++s) {
          std::shuffle(idx.begin(), idx.end(), gen);
          ASSERT_LE(got, support_residual(x, {idx.begin(), idx.begin() + static_cast<long>(k)}) + 1e-12);
        }
      }
    }
  }
}

TEST(SoftThreshold, Examples) {
  const DenseMatrix x = randn(5, 5, 8);
  EXPECT_EQ(soft_threshold(x, 0.0), x);
  EXPECT_EQ(soft_threshold(DenseMatrix{{2.0, -0.5}}, 1.0), (DenseMatrix{{1.0, 0.0}}));
  EXPECT_THROW(soft_threshold(x, -0.1), ParameterError);
}

TEST(SoftThreshold, MatchesEntrywiseReference) {
  const DenseMatrix x = randn(5, 5, 9);
  const DenseMatrix s = soft_threshold(x, 0.3);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const double v = x(i, j);
      double ref = 0.0;
      if (v > 0.3) ref = v - 0.3;
      if (v < -0.3) ref = v + 0.3;
      EXPECT_EQ(s(i, j), ref);
    }
  }
}

TEST(SoftThreshold, OneLipschitz) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(gen);
    const double b = u(gen);
    const double lam = std::abs(u(gen));
    EXPECT_LE(std::abs(soft_threshold(a, lam) - soft_threshold(b, lam)), std::abs(a - b) + 1e-15);
  }
}

TEST(RelError, Examples) {
  const DenseMatrix x = randn(3, 4, 1);
  EXPECT_EQ(rel_error(x, x), 0.0);
  EXPECT_DOUBLE_EQ(rel_error(x, DenseMatrix(3, 4)), 1.0);
  EXPECT_DOUBLE_EQ(rel_error(DenseMatrix{{3.0, 0.0}, {0.0, 4.0}}, DenseMatrix{{3.0, 0.0}, {0.0, 0.0}}), 0.64);
  EXPECT_THROW(rel_error(x, DenseMatrix(4, 3)), DimensionError);
  EXPECT_THROW(rel_error(DenseMatrix(2, 2), DenseMatrix(2, 2)), ParameterError);
}

TEST(PseudoInverse, MatchesEigen) {
  const DenseMatrix a = matmul(randn(7, 3, 1), randn(3, 5, 2));
  const Eigen::MatrixXd ref = test::eigen_pinv(to_eigen(a));
  EXPECT_LE((to_eigen(pseudo_inverse(a)) - ref).cwiseAbs().maxCoeff(), 1e-9 * ref.cwiseAbs().maxCoeff());
  EXPECT_EQ(numerical_rank(a), 3u);
  EXPECT_EQ(numerical_rank(DenseMatrix(3, 3)), 0u);
}
