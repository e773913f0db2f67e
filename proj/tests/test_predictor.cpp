#include <gtest/gtest.h>

#include "ddrobust/predictor.hpp"
#include "support.hpp"

using namespace ddrobust;
using namespace testing_support;

namespace {

constexpr Index kPast = 4;
constexpr Index kFuture = 20;

struct Fixture {
  Scenario s;
  NoiseModel noise;
  Vector y_ini;  // noisy
  NoiseParameterization param;
  RowSelection rows;
  OutputPredictor pred;
};

Fixture make_fixture(std::uint64_t seed = 3, double noise_scale = 0.02) {
  Scenario s = make_scenario(reference_plant(), kPast, kFuture, 100, seed);
  NoiseModel noise = NoiseModel::energy_bound(1e-3, kPast, 1);
  std::mt19937_64 rng(seed);
  Vector y = s.y_ini + noise_scale * gaussian(kPast, rng);
  NoiseParameterization param = build_parameterization(s.part, s.u_ini, y, noise);
  RowSelection rows = select_rows(s.part);
  OutputPredictor pred = build_predictor(s.part, rows, param);
  return {std::move(s), std::move(noise), std::move(y), std::move(param), std::move(rows),
          std::move(pred)};
}

// Lambda^T (Lambda Lambda^T)^{-1} by normal equations, as an independent route.
Matrix right_inverse(const Matrix& lambda) {
  return lambda.transpose() * (lambda * lambda.transpose()).ldlt().solve(
                                  Matrix::Identity(lambda.rows(), lambda.rows()));
}

}  // namespace

TEST(TrackingProblem, WeightsAndValidation) {
  Matrix q(2, 2);
  q << 2, 1, 1, 2;
  const TrackingProblem prob = TrackingProblem::regulation(q, Matrix::Identity(1, 1), 3);
  EXPECT_EQ(prob.reference(), Vector::Zero(6));
  EXPECT_EQ(prob.q_bar().block(2, 2, 2, 2), q);
  EXPECT_EQ(prob.q_bar().block(0, 2, 2, 2), Matrix::Zero(2, 2));
  EXPECT_EQ(prob.r_bar(), Matrix::Identity(3, 3));
  Matrix indefinite(1, 1);
  indefinite << -1;
  EXPECT_ERROR_KIND(TrackingProblem::regulation(indefinite, Matrix::Identity(1, 1), 3),
                    ErrorKind::InvalidArgument);
  EXPECT_ERROR_KIND(TrackingProblem(Vector::Zero(5), q, Matrix::Identity(1, 1), 3),
                    ErrorKind::Dimension);
  // Semidefinite weights are accepted here.
  EXPECT_NO_THROW(TrackingProblem::regulation(Matrix::Zero(2, 2), Matrix::Zero(1, 1), 3));
}

TEST(Lqte, Examples) {
  const TrackingProblem prob = TrackingProblem::regulation(Matrix::Identity(1, 1),
                                                           Matrix::Identity(1, 1), 4);
  EXPECT_EQ(lqte(prob, Vector::Zero(4), Vector::Zero(4)), 0.0);
  Vector e1 = Vector::Zero(4);
  e1(0) = 1.0;
  EXPECT_EQ(lqte(prob, Vector::Zero(4), e1), 1.0);
  Vector r(4);
  r << 1, 2, 3, 4;
  const TrackingProblem track(r, Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 0.5), 4);
  Vector u(4), y(4);
  u << 1, -1, 2, 0;
  y << 0, 2, 3, 6;
  // 2 * (1 + 0 + 0 + 4) + 0.5 * (1 + 1 + 4 + 0)
  EXPECT_DOUBLE_EQ(lqte(track, u, y), 13.0);
}

TEST(SelectRows, ExampleKeepsThreeRows) {
  const Fixture f = make_fixture();
  Matrix full(kPast * 2 + kFuture, f.s.part.columns());
  full << f.s.part.u_past, f.s.part.y_past, f.s.part.u_future;
  EXPECT_EQ(qr_rank(full), 27);
  EXPECT_EQ(f.rows.selected.size(), 3u);
  EXPECT_EQ(f.rows.lambda.rows(), 27);
  EXPECT_EQ(qr_rank(f.rows.lambda), 27);
  EXPECT_EQ(f.rows.lambda.topRows(kPast), f.s.part.u_past);
  EXPECT_EQ(f.rows.lambda.bottomRows(kFuture), f.s.part.u_future);
  // Unselected rows of Y_p lie in the row space of [U_p; Y_p1].
  Matrix kept(kPast + 3, f.s.part.columns());
  kept << f.s.part.u_past, f.rows.lambda.middleRows(kPast, 3);
  for (Index i = 0; i < kPast; ++i) {
    if (std::find(f.rows.selected.begin(), f.rows.selected.end(), i) != f.rows.selected.end()) {
      continue;
    }
    const Vector target = f.s.part.y_past.row(i).transpose();
    const Vector coef = kept.transpose().completeOrthogonalDecomposition().solve(target);
    EXPECT_LT((kept.transpose() * coef - target).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(SelectRows, FullRankStackKeepsAllRows) {
  std::mt19937_64 rng(12);
  const LtiSystem sys = random_system(3, 1, 2, rng);
  const Scenario s = make_scenario(sys, 1, 5, 60, 12);
  const RowSelection rows = select_rows(s.part);
  EXPECT_EQ(rows.selected, (std::vector<Index>{0, 1}));
}

TEST(SelectRows, DuplicateOfInputRowIsDropped) {
  Fixture f = make_fixture();
  HankelPartition part = f.s.part;
  part.y_past.row(0) = part.u_past.row(0);
  const RowSelection rows = select_rows(part);
  EXPECT_TRUE(std::find(rows.selected.begin(), rows.selected.end(), 0) == rows.selected.end());
}

TEST(SelectRows, RankDeficientInputsFail) {
  const TrajectoryData flat(Matrix::Ones(1, 100), Matrix::Ones(1, 100));
  EXPECT_ERROR_KIND(select_rows(partition(flat, {kPast, kFuture})),
                    ErrorKind::PersistentExcitation);
}

TEST(BuildPredictor, MatchesClosedFormMatrices) {
  const Fixture f = make_fixture();
  const Matrix pinv = right_inverse(f.rows.lambda);
  const Index k = f.rows.lambda.rows();
  Matrix future_selector = Matrix::Zero(k, kFuture);
  future_selector.bottomRows(kFuture) = Matrix::Identity(kFuture, kFuture);
  const Matrix b_u = f.s.part.y_future * pinv * future_selector;
  const Index nc = f.s.part.columns();
  const Matrix b_ini =
      f.s.part.y_future * (Matrix::Identity(nc, nc) - pinv * future_selector * f.s.part.u_future);
  EXPECT_LT((f.pred.b_u - b_u).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((f.pred.b_ini - b_ini).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((f.pred.b_w - f.pred.b_ini * f.param.kernel).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((f.pred.y0 - f.pred.b_ini * f.param.g_star).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GT(f.pred.gram_condition, 1.0);
  EXPECT_LT(f.pred.gram_condition, kGramConditionWarning);
}

TEST(BuildPredictor, FreeResponseMatchesDataDrivenSimulation) {
  const Fixture f = make_fixture();
  const Vector y = simulate_ddriven(f.s.part, f.s.u_ini, f.y_ini - f.param.w0,
                                    Vector::Zero(kFuture));
  EXPECT_LT((predict(f.pred, Vector::Zero(kFuture), Vector::Zero(f.param.free_dimension())) - y)
                .cwiseAbs()
                .maxCoeff(),
            1e-6);
  EXPECT_EQ(predict(f.pred, Vector::Zero(kFuture), Vector::Zero(f.param.free_dimension())),
            f.pred.y0);
}

TEST(BuildPredictor, RejectsRankDeficientLambda) {
  const Fixture f = make_fixture();
  RowSelection all;
  all.selected = {0, 1, 2, 3};
  all.lambda.resize(2 * kPast + kFuture, f.s.part.columns());
  all.lambda << f.s.part.u_past, f.s.part.y_past, f.s.part.u_future;
  EXPECT_ERROR_KIND(build_predictor(f.s.part, all, f.param), ErrorKind::Conditioning);
}

TEST(Predict, AffineStructure) {
  const Fixture f = make_fixture();
  std::mt19937_64 rng(1);
  const Index nw = f.param.free_dimension();
  for (int trial = 0; trial < 10; ++trial) {
    const Vector u = gaussian(kFuture, rng);
    const Vector g = gaussian(nw, rng);
    EXPECT_LT((predict(f.pred, u, g) - predict(f.pred, Vector::Zero(kFuture), g) - f.pred.b_u * u)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10);
    EXPECT_LT((predict(f.pred, 2 * u, g) - 2 * predict(f.pred, u, g) +
               predict(f.pred, Vector::Zero(kFuture), g))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10);
  }
  EXPECT_ERROR_KIND(predict(f.pred, Vector::Zero(3), Vector::Zero(nw)), ErrorKind::Dimension);
}

TEST(Predict, MatchesDataDrivenSimulationOnExample) {
  const Fixture f = make_fixture();
  std::mt19937_64 rng(2);
  const auto samples = sample_feasible_gw(f.param, 20, 8);
  for (const Vector& g : samples) {
    const Vector u = uniform(kFuture, 1, 1.0, rng).col(0);
    const Vector expected =
        simulate_ddriven(f.s.part, f.s.u_ini, f.y_ini - noise_from_gw(f.param, g), u);
    EXPECT_LT((predict(f.pred, u, g) - expected).cwiseAbs().maxCoeff(), 1e-6);
  }
}

// Predictor equals the data-driven simulator for random systems and noises.
TEST(Predict, SimulatorEquivalenceProperty) {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 1 + trial % 5;
    const Index m = 1 + (trial / 5) % 2;
    const Index p = 1 + (trial / 10) % 2;
    const LtiSystem sys = random_system(n, m, p, rng);
    const Index past = n;
    const Index future = 6;
    const Scenario s = make_scenario(sys, past, future, (m + 1) * (past + future + n) + 20,
                                     300 + trial);
    const NoiseModel noise = NoiseModel::energy_bound(1e-3, past, p);
    const Vector y = s.y_ini + 0.01 * gaussian(p * past, rng);
    const auto param = build_parameterization(s.part, s.u_ini, y, noise);
    if (param.shape() == NoiseSetShape::Empty) continue;
    const auto pred = build_predictor(s.part, select_rows(s.part), param);
    for (const Vector& g : sample_feasible_gw(param, 20, trial)) {
      const Vector u = gaussian(m * future, rng);
      const Vector expected = simulate_ddriven(s.part, s.u_ini, y - noise_from_gw(param, g), u);
      worst = std::max(worst, (predict(pred, u, g) - expected).cwiseAbs().maxCoeff());
    }
  }
  EXPECT_LE(worst, 1e-6);
}

// g_u solves every block row, including the Y_p rows left out of Lambda.
TEST(BuildPredictor, InputComponentSolvesAllBlockRows) {
  const Fixture f = make_fixture();
  std::mt19937_64 rng(5);
  const Vector g_w = sample_feasible_gw(f.param, 1, 3).front();
  const Vector g_ini = f.param.g_star + f.param.kernel * g_w;
  const Vector u = gaussian(kFuture, rng);
  const Index k = f.rows.lambda.rows();
  Vector rhs = Vector::Zero(k);
  rhs.tail(kFuture) = u - f.s.part.u_future * g_ini;
  const Vector g_u = right_inverse(f.rows.lambda) * rhs;
  EXPECT_LT((f.s.part.u_past * g_u).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((f.s.part.y_past * g_u).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((f.s.part.u_future * (g_ini + g_u) - u).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((f.s.part.y_past * g_ini - (f.y_ini - noise_from_gw(f.param, g_w)))
                .cwiseAbs()
                .maxCoeff(),
            1e-8);
  EXPECT_LT((f.s.part.y_future * (g_ini + g_u) - predict(f.pred, u, g_w)).cwiseAbs().maxCoeff(),
            1e-6);
}

// Another valid selection (last rows first) yields the same predictor.
TEST(BuildPredictor, SelectionInvariance) {
  const Fixture f = make_fixture();
  const HankelPartition& part = f.s.part;
  RowSelection alt;
  Matrix acc(kPast + kFuture, part.columns());
  acc << part.u_past, part.u_future;
  for (Index i = kPast - 1; i >= 0; --i) {
    Matrix trial(acc.rows() + 1, acc.cols());
    trial << acc, part.y_past.row(i);
    if (qr_rank(trial) == trial.rows()) {
      acc = trial;
      alt.selected.insert(alt.selected.begin(), i);
    }
  }
  ASSERT_EQ(alt.selected.size(), 3u);
  ASSERT_NE(alt.selected, f.rows.selected);
  alt.lambda.resize(kPast + 3 + kFuture, part.columns());
  alt.lambda.topRows(kPast) = part.u_past;
  for (Index j = 0; j < 3; ++j) alt.lambda.row(kPast + j) = part.y_past.row(alt.selected[j]);
  alt.lambda.bottomRows(kFuture) = part.u_future;
  const OutputPredictor other = build_predictor(part, alt, f.param);
  EXPECT_LT((other.b_u - f.pred.b_u).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((other.b_w - f.pred.b_w).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((other.y0 - f.pred.y0).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(BuildQg, QuadraticFormExactness) {
  const Fixture f = make_fixture();
  const TrackingProblem prob = TrackingProblem::regulation(Matrix::Identity(1, 1),
                                                           Matrix::Identity(1, 1), kFuture);
  std::mt19937_64 rng(44);
  const Index nw = f.param.free_dimension();
  for (int trial = 0; trial < 100; ++trial) {
    const Vector u = gaussian(kFuture, rng);
    const Vector g = 0.1 * gaussian(nw, rng);
    const double gamma = 100.0 * std::abs(gaussian(1, rng)(0));
    const Matrix qg = build_qg(f.pred, prob, u, gamma);
    Vector v(nw + 1);
    v << 1.0, g;
    const double form = v.dot(qg * v);
    const double cost = lqte(prob, u, predict(f.pred, u, g));
    EXPECT_NEAR(form, gamma - cost, 1e-8 * std::max(1.0, gamma));
    EXPECT_EQ(form >= 0.0, cost <= gamma + 1e-8 * std::max(1.0, gamma))
        << "form " << form << " cost " << cost << " gamma " << gamma;
  }
  const Vector u = gaussian(kFuture, rng);
  const Matrix qg = build_qg(f.pred, prob, u, 3.0);
  EXPECT_NEAR(qg(0, 0), 3.0 - lqte(prob, u, predict(f.pred, u, Vector::Zero(nw))), 1e-9);
  EXPECT_LE(max_eigenvalue(qg.bottomRightCorner(nw, nw)), 1e-10);
  EXPECT_LE((qg - qg.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}
