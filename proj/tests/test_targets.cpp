#include <gtest/gtest.h>

#include <array>
#include <random>
#include <set>

#include "coinsamp/errors.hpp"
#include "coinsamp/ica.hpp"
#include "coinsamp/logreg.hpp"
#include "coinsamp/targets.hpp"
#include "oracles.hpp"

using namespace coinsamp;

namespace {

const std::vector<ToyFamily> kAllToys = {
    ToyFamily::Gaussian2d, ToyFamily::Mog2,   ToyFamily::Donut,        ToyFamily::Banana,
    ToyFamily::Squiggle,   ToyFamily::Funnel, ToyFamily::Gauss1d,      ToyFamily::Mog3,
    ToyFamily::KsddGaussian, ToyFamily::KsddMixture, ToyFamily::KsddSymmetricMixture};

Vector random_vector(std::mt19937_64& rng, Eigen::Index d, double sd) {
  std::normal_distribution<double> n(0.0, sd);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

}  // namespace

TEST(Toys, ScoreMatchesLogDensityGradient) {
  std::mt19937_64 rng(31);
  for (ToyFamily f : kAllToys) {
    const TargetModel t = toy_target(f);
    ASSERT_TRUE(t.has_log_density()) << t.name;
    for (int k = 0; k < 200; ++k) {
      const Vector x = random_vector(rng, static_cast<Eigen::Index>(t.dim), 2.0);
      if (f == ToyFamily::Donut && x.norm() < 1e-3) continue;
      const Vector fd = oracle::fd_gradient(t.log_density_unnormalized, x);
      ASSERT_LT(oracle::rel_err(t.score(x), fd), 1e-5) << t.name << " at " << x.transpose();
    }
  }
}

TEST(Toys, AnalyticJacobiansMatchFiniteDifferences) {
  std::mt19937_64 rng(37);
  for (ToyFamily f : kAllToys) {
    const TargetModel t = toy_target(f);
    if (!t.score_jacobian) continue;
    for (int k = 0; k < 100; ++k) {
      const Vector x = random_vector(rng, static_cast<Eigen::Index>(t.dim), 2.0);
      if (f == ToyFamily::Donut && x.norm() < 1e-3) continue;
      ASSERT_LT(oracle::rel_err(t.score_jacobian(x), oracle::fd_jacobian(t.score, x)), 1e-5) << t.name;
    }
  }
}

TEST(Toys, ExactSamplersHaveZeroMeanScore) {
  // E_pi[score] = 0 for every target here; a biased sampler would fail this.
  for (ToyFamily f : kAllToys) {
    const TargetModel t = toy_target(f);
    ASSERT_TRUE(static_cast<bool>(t.sample)) << t.name;
    Engine rng = make_engine(5, "sample-check");
    const Matrix x = t.sample(rng, 40000);
    Matrix s(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) s.row(i) = t.score(x.row(i).transpose()).transpose();
    const Eigen::RowVectorXd mean = s.colwise().mean();
    const Eigen::RowVectorXd var = (s.rowwise() - mean).array().square().colwise().mean();
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      EXPECT_LT(std::abs(mean[j]), 5.0 * std::sqrt(var[j] / static_cast<double>(x.rows()))) << t.name << " coord " << j;
  }
}

TEST(Toys, DonutRidgeAndOrigin) {
  const TargetModel t = toy_target(ToyFamily::Donut);
  for (double a : {0.0, 0.7, 2.0, 4.5}) {
    const Vector x{{2.5 * std::cos(a), 2.5 * std::sin(a)}};
    EXPECT_LT(t.score(x).norm(), 1e-14);
  }
  const std::size_t before = *t.singular_hits;
  EXPECT_EQ(t.score(Vector::Zero(2)), Vector::Zero(2));
  EXPECT_EQ(*t.singular_hits, before + 1);
}

TEST(Toys, FunnelHandValue) {
  const Vector s = toy_target(ToyFamily::Funnel).score(Vector{{1.0, 4.0}});
  EXPECT_DOUBLE_EQ(s[0], 0.0);
  EXPECT_DOUBLE_EQ(s[1], -0.5);
}

TEST(Toys, SymmetricMixtureMidpoint) {
  EXPECT_LT(toy_target(ToyFamily::Mog2).score(Vector::Zero(2)).norm(), 1e-14);
  EXPECT_LT(toy_target(ToyFamily::KsddSymmetricMixture).score(Vector::Zero(2)).norm(), 1e-14);
  const Matrix c = Matrix::Identity(3, 3);
  const auto m = gaussian_mixture({0.5, 0.5}, {Vector{{1.0, 2.0, 3.0}}, Vector{{3.0, 0.0, -1.0}}}, {c, c});
  EXPECT_LT(m.score(Vector{{2.0, 1.0, 1.0}}).norm(), 1e-14);
}

TEST(Toys, GaussianDefaults) {
  const TargetModel g = toy_target(ToyFamily::Gaussian2d);
  EXPECT_EQ(g.score(Vector{{-1.0, 1.0}}), Vector::Zero(2));
  // score = -P (x - m) with P = [[3, -0.5], [-0.5, 1]].
  const Vector s = g.score(Vector{{0.0, 1.0}});
  EXPECT_DOUBLE_EQ(s[0], -3.0);
  EXPECT_DOUBLE_EQ(s[1], 0.5);
}

TEST(Toys, ParameterValidation) {
  EXPECT_THROW(gaussian_mixture({0.5, 0.4}, {Vector{{0.0}}, Vector{{1.0}}}, {Matrix{{1.0}}, Matrix{{1.0}}}),
               InvalidArgument);
  EXPECT_THROW(gaussian_mixture({1.5, -0.5}, {Vector{{0.0}}, Vector{{1.0}}}, {Matrix{{1.0}}, Matrix{{1.0}}}),
               InvalidArgument);
  EXPECT_THROW(gaussian(Vector::Zero(2), Matrix{{1.0, 2.0}, {2.0, 1.0}}), InvalidArgument);
  EXPECT_THROW(gaussian_from_covariance(Vector::Zero(1), Matrix{{-1.0}}), InvalidArgument);
  EXPECT_THROW(donut(2.5, 0.0), InvalidArgument);
  EXPECT_THROW(funnel(1.0, 4.0, -3.0), InvalidArgument);
  EXPECT_THROW(squiggle(Vector{{1.0, 1.0}}, Matrix{{1.0, 3.0}, {3.0, 1.0}}), InvalidArgument);
}

TEST(Ica, HandValues) {
  const IcaProblem zero = ica_problem(Matrix{{1.0}}, Matrix{{0.0}});
  EXPECT_DOUBLE_EQ(ica_score(Matrix{{1.0}}, zero)(0, 0), 0.0);
  const IcaProblem ten = ica_problem(Matrix{{1.0}}, Matrix{{10.0}});
  EXPECT_NEAR(ica_score(Matrix{{1.0}}, ten)(0, 0), -10.0 * std::tanh(10.0), 1e-12);
  EXPECT_NEAR(ica_score(Matrix{{1.0}}, ten)(0, 0), -9.99999, 1e-5);
}

TEST(Ica, ScalarInversion) {
  Matrix s(50, 1);
  Engine rng = make_engine(3, "sources");
  for (Eigen::Index i = 0; i < 50; ++i) s(i, 0) = sample_sech(rng);
  const IcaProblem prob = ica_problem(Matrix{{2.0}}, s);
  for (Eigen::Index i = 0; i < 50; ++i) EXPECT_DOUBLE_EQ(prob.data(i, 0), s(i, 0) / 2.0);
}

TEST(Ica, GenerationRoundTrip) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    for (Eigen::Index p : {1, 2, 4}) {
      const IcaProblem prob = ica_generate(p, 500, seed);
      EXPECT_LT(condition_number(prob.w_true), 1e6);
      const Matrix recovered = prob.data * prob.w_true.transpose();
      EXPECT_LT((recovered - prob.sources).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Ica, SourceLawMoments) {
  // sech(s)/pi has mean 0 and variance pi^2 / 4.
  Engine rng = make_engine(9, "sech");
  const int n = 200000;
  double m = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = sample_sech(rng);
    m += s;
    m2 += s * s;
  }
  m /= n;
  m2 /= n;
  EXPECT_NEAR(m, 0.0, 0.02);
  EXPECT_NEAR(m2, std::numbers::pi * std::numbers::pi / 4.0, 0.05);
}

TEST(Ica, DeterministicGeneration) {
  const IcaProblem a = ica_generate(3, 200, 77);
  const IcaProblem b = ica_generate(3, 200, 77);
  EXPECT_EQ(a.w_true, b.w_true);
  EXPECT_EQ(a.data, b.data);
  EXPECT_EQ(a.sources, b.sources);
  EXPECT_NE(ica_generate(3, 200, 78).w_true, a.w_true);
}

TEST(Ica, ScoreMatchesLogPosteriorGradient) {
  std::mt19937_64 rng(41);
  for (Eigen::Index p : {1, 2, 3}) {
    for (bool cosh : {false, true}) {
      IcaProblem prob = ica_generate(p, 30, 100 + static_cast<std::uint64_t>(p));
      prob.cosh_convention = cosh;
      const TargetModel t = ica_target(prob);
      for (int k = 0; k < 20; ++k) {
        const Matrix w = Matrix::Identity(p, p) + unflatten_square(random_vector(rng, p * p, 0.3), p);
        const Vector x = flatten_square(w);
        ASSERT_LT(oracle::rel_err(t.score(x), oracle::fd_gradient(t.log_density_unnormalized, x)), 1e-5);
      }
    }
  }
}

TEST(Ica, FlattenIsRowMajor) {
  const Matrix w{{1.0, 2.0}, {3.0, 4.0}};
  EXPECT_EQ(flatten_square(w), (Vector{{1.0, 2.0, 3.0, 4.0}}));
  EXPECT_EQ(unflatten_square(flatten_square(w), 2), w);
}

TEST(Ica, SingularUnmixing) {
  const IcaProblem prob = ica_generate(2, 10, 1);
  EXPECT_THROW(ica_score(Matrix{{1.0, 2.0}, {2.0, 4.0}}, prob), SingularMatrix);
}

TEST(LogReg, ZeroWeightLikelihoodTerm) {
  const LogRegProblem prob = logreg_problem(40, 3, 5, 40);
  const Vector theta = Vector::Zero(4);
  Vector want = Vector::Zero(3);
  for (Eigen::Index i = 0; i < prob.n(); ++i) want += 0.5 * prob.labels[i] * prob.features.row(i).transpose();
  const Vector g = logreg_full_score(theta, prob);
  EXPECT_LT((g.head(3) - want).norm(), 1e-12);
  // Prior part in log alpha at w = 0, alpha = 1: shape - rate * alpha + p / 2.
  EXPECT_NEAR(g[3], 1.0 - 0.01 + 1.5, 1e-12);
}

TEST(LogReg, FullScoreMatchesLogJointGradient) {
  std::mt19937_64 rng(43);
  const LogRegProblem prob = logreg_problem(60, 4, 8, 10);
  for (int k = 0; k < 50; ++k) {
    const Vector theta = random_vector(rng, 5, 1.0);
    const Vector fd = oracle::fd_gradient([&](const Vector& x) { return logreg_log_joint(x, prob); }, theta);
    ASSERT_LT(oracle::rel_err(logreg_full_score(theta, prob), fd), 1e-5);
  }
}

TEST(LogReg, MinibatchScoreIsUnbiased) {
  const LogRegProblem prob = logreg_problem(200, 3, 12, 10);
  const Vector theta{{0.3, -0.5, 0.8, 0.2}};
  const int reps = 10000;
  Vector sum = Vector::Zero(4), sum2 = Vector::Zero(4);
  for (int b = 0; b < reps; ++b) {
    const Vector g = logreg_score(theta, prob, substream_seed(99, "batches", static_cast<std::uint64_t>(b)));
    sum += g;
    sum2 += g.cwiseProduct(g);
  }
  const Vector mean = sum / reps;
  const Vector var = sum2 / reps - mean.cwiseProduct(mean);
  const Vector full = logreg_full_score(theta, prob);
  for (int j = 0; j < 4; ++j) EXPECT_LE(std::abs(mean[j] - full[j]), 5.0 * std::sqrt(var[j] / reps) + 1e-12);
}

TEST(LogReg, BatchesAreDistinctAndSeeded) {
  const auto rows = logreg_batch(50, 20, 7);
  std::set<Eigen::Index> uniq(rows.begin(), rows.end());
  EXPECT_EQ(uniq.size(), 20u);
  EXPECT_EQ(rows, logreg_batch(50, 20, 7));
  EXPECT_NE(rows, logreg_batch(50, 20, 8));
  auto all = logreg_batch(10, 10, 3);
  std::sort(all.begin(), all.end());
  for (Eigen::Index i = 0; i < 10; ++i) EXPECT_EQ(all[static_cast<std::size_t>(i)], i);
}

TEST(LogReg, SplitProportionsAndDeterminism) {
  const LogRegDataset ds = logreg_generate(1000, 5, 21);
  std::array<int, 3> count{};
  for (Split s : ds.split) ++count[static_cast<int>(s)];
  EXPECT_EQ(count[0], 700);
  EXPECT_EQ(count[1], 100);
  EXPECT_EQ(count[2], 200);
  const LogRegDataset again = logreg_generate(1000, 5, 21);
  EXPECT_EQ(ds.features, again.features);
  EXPECT_EQ(ds.labels, again.labels);
  EXPECT_EQ(ds.split, again.split);
}

TEST(LogReg, DimensionMismatch) {
  const LogRegProblem prob = logreg_problem(20, 3, 1, 5);
  EXPECT_THROW(logreg_score(Vector::Zero(3), prob, 0), InvalidArgument);
  EXPECT_THROW(logreg_problem(20, 3, 1, 50), InvalidArgument);
}

TEST(Anneal, UnitTemperatureIsIdentity) {
  std::mt19937_64 rng(47);
  for (ToyFamily f : kAllToys) {
    const TargetModel t = toy_target(f);
    const TargetModel a = anneal(t, 1.0);
    for (int k = 0; k < 20; ++k) {
      const Vector x = random_vector(rng, static_cast<Eigen::Index>(t.dim), 2.0);
      ASSERT_EQ(a.score(x), t.score(x));
    }
  }
}

TEST(Anneal, ScalesScore) {
  std::mt19937_64 rng(53);
  const TargetModel t = toy_target(ToyFamily::Squiggle);
  const TargetModel a = anneal(t, 0.02);
  EXPECT_NE(a.name, t.name);
  for (int k = 0; k < 20; ++k) {
    const Vector x = random_vector(rng, 2, 2.0);
    ASSERT_EQ(a.score(x), (0.02 * t.score(x)).eval());
  }
  EXPECT_THROW(anneal(t, 0.0), InvalidArgument);
  EXPECT_THROW(anneal(t, -1.0), InvalidArgument);
  EXPECT_THROW(anneal(t, 1.5), InvalidArgument);
}

TEST(Anneal, GaussianTemperingWidensCovariance) {
  std::mt19937_64 rng(59);
  const Vector m{{0.5, -2.0}};
  const Matrix cov{{2.0, 0.3}, {0.3, 0.7}};
  const double beta = 0.3;
  const TargetModel a = anneal(gaussian_from_covariance(m, cov), beta);
  const TargetModel wide = gaussian_from_covariance(m, cov / beta);
  for (int k = 0; k < 20; ++k) {
    const Vector x = random_vector(rng, 2, 3.0);
    ASSERT_LT((a.score(x) - wide.score(x)).norm(), 1e-12 * (1.0 + wide.score(x).norm()));
  }
}

TEST(ExactGaussian, HandValues) {
  EXPECT_DOUBLE_EQ(gaussian_exact_gradient(Vector{{3.0}}, Vector{{1.0}}, Matrix{{0.5}})[0], 1.0);
  EXPECT_EQ(gaussian_exact_gradient(Vector{{1.0, 2.0}}, Vector{{1.0, 2.0}}, Matrix::Identity(2, 2)), Vector::Zero(2));
}

TEST(ExactGaussian, LinearInMeanOffset) {
  const Matrix p{{3.0, -0.5}, {-0.5, 1.0}};
  const Vector mp{{-1.0, 1.0}};
  const Vector a{{0.2, 0.4}}, b{{-1.0, 3.0}};
  const Vector ga = gaussian_exact_gradient(mp + a, mp, p);
  const Vector gb = gaussian_exact_gradient(mp + b, mp, p);
  const Vector gab = gaussian_exact_gradient(mp + 2.0 * a - b, mp, p);
  EXPECT_LT((gab - (2.0 * ga - gb)).norm(), 1e-12);
  EXPECT_THROW(gaussian_exact_gradient(a, b, Matrix{{1.0, 2.0}, {2.0, 1.0}}), InvalidArgument);
}

TEST(ExactGaussian, DirectionIsConstantAcrossParticles) {
  const TargetModel t = gaussian_exact(Vector{{-1.0, 1.0}}, Matrix{{3.0, -0.5}, {-0.5, 1.0}});
  const Matrix x{{0.0, 0.0}, {1.0, 2.0}, {-1.0, 1.0}};
  const Matrix dir = t.exact_direction(x);
  const Vector want = gaussian_exact_gradient(Vector{{0.0, 1.0}}, Vector{{-1.0, 1.0}}, Matrix{{3.0, -0.5}, {-0.5, 1.0}});
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_LT((dir.row(i).transpose() - want).norm(), 1e-14);
}
