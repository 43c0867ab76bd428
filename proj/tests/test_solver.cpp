#include "doctest.h"

#include <algorithm>
#include <set>

#include "kdfg/bayes_tree.hpp"
#include "kdfg/errors.hpp"
#include "kdfg/incremental.hpp"
#include "kdfg/levenberg_marquardt.hpp"
#include "kdfg/ordering.hpp"
#include "checks.hpp"
#include "test_util.hpp"

using namespace kdfg;

namespace {

Key X(std::uint32_t i) { return {'x', i, 0}; }

// Nonlinear chain: priors on the ends and r = x_{i+1} - x_i - sin(x_i) - 0.1 between neighbours.
FactorGraph chain(int n) {
  FactorGraph g;
  g.add(std::make_shared<PriorFactor>(X(0), Eigen::VectorXd::Constant(1, 0.3), NoiseModel::Isotropic(1, 0.1)));
  for (int i = 0; i + 1 < n; ++i) {
    g.add(std::make_shared<FunctionFactor>(
        std::vector<Key>{X(i), X(i + 1)}, NoiseModel::Isotropic(1, 0.5),
        [](const std::vector<Eigen::VectorXd>& v, std::vector<Eigen::MatrixXd>* J) {
          if (J) *J = {Eigen::MatrixXd::Constant(1, 1, -1.0 - std::cos(v[0](0))), Eigen::MatrixXd::Constant(1, 1, 1.0)};
          return Eigen::VectorXd::Constant(1, v[1](0) - v[0](0) - std::sin(v[0](0)) - 0.1);
        }));
  }
  g.add(std::make_shared<PriorFactor>(X(n - 1), Eigen::VectorXd::Constant(1, 2.0), NoiseModel::Isotropic(1, 0.1)));
  return g;
}

Values zeros(int n) {
  Values v;
  for (int i = 0; i < n; ++i) v.insert(X(i), 0.0);
  return v;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("keys order time-major, then entity, then symbol") {
  std::vector<Key> keys{{'q', 1, 0}, {'F', 0, 1}, {'q', 0, 1}, {'T', 0, 0}, {'a', 0, 0}};
  std::sort(keys.begin(), keys.end());
  CHECK(keys[0] == Key{'T', 0, 0});
  CHECK(keys[1] == Key{'a', 0, 0});
  CHECK(keys[2] == Key{'q', 1, 0});
  CHECK(keys[3] == Key{'F', 0, 1});
  CHECK(keys[4] == Key{'q', 0, 1});
  CHECK(to_string(Key{'q', 2, 7}) == "q2_7");
}

TEST_CASE("values hold each key once with fixed dimension") {
  Values v;
  v.insert(X(0), Eigen::Vector2d(1, 2));
  CHECK_THROWS_AS(v.insert(X(0), 3.0), Error);
  CHECK_THROWS_AS(v.at(X(1)), UnknownVariableError);
  Values d;
  d.insert(X(0), Eigen::VectorXd::Ones(3));
  CHECK_THROWS_AS(v.retract(d), DimensionError);
  CHECK(v.totalDim() == 2);
  CHECK(v.zeroLike().at(X(0)).isZero());
}

TEST_CASE("noise models reject non-positive sigmas and whiten") {
  CHECK_THROWS_AS(NoiseModel::Sigmas(Eigen::Vector2d(1, 0)), Error);
  CHECK_THROWS_AS(NoiseModel::Sigmas(Eigen::Vector2d(1, -2)), Error);
  CHECK_THROWS_AS(NoiseModel::Covariance((Eigen::Matrix2d() << 1, 2, 2, 1).finished()), Error);
  const NoiseModel iso = NoiseModel::Isotropic(2, 0.5);
  CHECK(test::max_abs(iso.whiten(Eigen::VectorXd(Eigen::Vector2d(1, -1))) - Eigen::Vector2d(2, -2)) == 0.0);
  // Full covariance: whitened residual has squared norm r^T S^-1 r.
  const Eigen::Matrix2d S = (Eigen::Matrix2d() << 2, 0.5, 0.5, 1).finished();
  const NoiseModel full = NoiseModel::Covariance(S);
  const Eigen::Vector2d r(0.3, -0.7);
  CHECK(full.whiten(Eigen::VectorXd(r)).squaredNorm() == doctest::Approx(r.dot(S.inverse() * r)).epsilon(1e-12));
}

TEST_CASE("factor residual dimension must match the noise model") {
  const FunctionFactor bad({X(0)}, NoiseModel::Unit(2), [](const std::vector<Eigen::VectorXd>&, std::vector<Eigen::MatrixXd>* J) {
    if (J) *J = {Eigen::MatrixXd::Ones(1, 1)};
    return Eigen::VectorXd::Ones(1);
  });
  Values v;
  v.insert(X(0), 1.0);
  CHECK_THROWS_AS(bad.error(v), DimensionError);
  CHECK_THROWS_AS(bad.linearize(v), DimensionError);
}

TEST_CASE("linearized blocks have one row per residual entry") {
  const FactorGraph g = chain(6);
  const auto lin = g.linearize(zeros(6));
  for (const auto& lf : lin) {
    for (const auto& b : lf.blocks) CHECK(b.rows() == lf.rows());
  }
}

TEST_CASE("sparse elimination matches dense normal equations") {
  const auto r = checks::sparse_vs_dense(100, 31);
  INFO(checks::describe(r));
  CHECK(r.ok());
}

TEST_CASE("Bayes tree structural invariants hold for both orderings") {
  const FactorGraph g = chain(30);
  const auto lin = g.linearize(zeros(30));
  for (OrderingType t : {OrderingType::kForward, OrderingType::kMinDegree}) {
    const BayesTree tree = eliminate(lin, make_ordering(g, t));
    CHECK(tree.checkInvariants().empty());
    CHECK(tree.numKeys() == 30);
    std::set<Key> seen;
    for (const auto& c : tree.cliques()) {
      for (const Key& k : c.frontals) CHECK(seen.insert(k).second);
      if (c.parent >= 0) {
        const auto& p = tree.cliques()[c.parent];
        for (const Key& s : c.separator) {
          const bool in_parent = std::count(p.frontals.begin(), p.frontals.end(), s) + std::count(p.separator.begin(), p.separator.end(), s) > 0;
          CHECK(in_parent);
        }
      }
    }
  }
}

TEST_CASE("orderings are permutations of the graph keys") {
  const FactorGraph g = chain(12);
  for (OrderingType t : {OrderingType::kForward, OrderingType::kMinDegree}) {
    auto o = make_ordering(g, t);
    std::sort(o.begin(), o.end());
    CHECK(o == g.keys());
  }
  CHECK(parse_ordering_type("mindegree") == OrderingType::kMinDegree);
  CHECK_THROWS(parse_ordering_type("colamd"));
}

TEST_CASE("forward ordering eliminates links before joint quantities within a step") {
  const std::vector<Key> keys{Q(0, 1), WrenchKey(0, 0), Q(0, 0), TorqueKey(0, 0), DDQ(0, 0)};
  const auto o = forward_ordering(keys);
  REQUIRE(o.size() == 5);
  CHECK(o[0] == WrenchKey(0, 0));
  CHECK(o[1] == TorqueKey(0, 0));
  CHECK(o[2] == DDQ(0, 0));
  CHECK(o[3] == Q(0, 0));
  CHECK(o[4] == Q(0, 1));
}

TEST_CASE("an unconstrained variable is reported by name") {
  GaussianFactorGraph g;
  LinearFactor lf;
  lf.keys = {X(0), X(1)};
  lf.blocks = {Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1)};
  lf.rhs = Eigen::VectorXd::Ones(1);
  g.push_back(lf);
  try {
    eliminate(g, {X(0), X(1)});
    FAIL("expected IndeterminateSystemError");
  } catch (const IndeterminateSystemError& e) {
    CHECK(e.key() == X(1));
  }
}

TEST_CASE("LM never accepts an error increase") {
  const FactorGraph g = chain(20);
  LMParams p;
  p.relative_tolerance = 1e-12;
  const auto [x, stats] = optimize_lm(g, zeros(20), p);
  CHECK(stats.final_error < stats.initial_error);
  REQUIRE(!stats.error_trace.empty());
  double prev = stats.initial_error;
  for (double e : stats.error_trace) {
    CHECK(e <= prev);
    prev = e;
  }
  CHECK(g.error(x) == doctest::Approx(stats.final_error));
}

TEST_CASE("LM solves a linear problem in one accepted step") {
  FactorGraph g;
  g.add(std::make_shared<PriorFactor>(X(0), Eigen::VectorXd::Constant(1, 2.0), NoiseModel::Unit(1)));
  g.add(std::make_shared<PriorFactor>(X(0), Eigen::VectorXd::Constant(1, 4.0), NoiseModel::Unit(1)));
  LMParams p;
  p.lambda_initial = 0.0;
  const auto [x, stats] = optimize_lm(g, zeros(1), p);
  CHECK(x.scalar(X(0)) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(stats.accepted_steps >= 1);
  CHECK(stats.final_error == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("LM variants reach the same minimum") {
  const FactorGraph g = chain(15);
  LMParams base;
  base.relative_tolerance = 1e-12;
  const double e0 = optimize_lm(g, zeros(15), base).second.final_error;
  LMParams diag = base;
  diag.damping = DampingType::kDiagonal;
  LMParams soc = base;
  soc.second_order_correction = true;
  LMParams md = base;
  md.ordering = OrderingType::kMinDegree;
  for (const LMParams& p : {diag, soc, md}) CHECK(optimize_lm(g, zeros(15), p).second.final_error == doctest::Approx(e0).epsilon(1e-8));
}

TEST_CASE("incremental solver agrees with batch elimination") {
  const auto r = checks::incremental_vs_batch(50, 32);
  INFO(checks::describe(r));
  CHECK(r.ok());
}

TEST_CASE("incremental updates are deterministic") {
  auto run = [] {
    const FactorGraph g = chain(40);
    Values theta = zeros(40);
    IncrementalSolver s(g, theta, forward_ordering(g.keys()));
    s.update({0}, {std::make_shared<PriorFactor>(X(0), Eigen::VectorXd::Constant(1, -0.2), NoiseModel::Isotropic(1, 0.1))});
    s.update({}, {}, s.keysAboveThreshold(0.01));
    return s.estimate();
  };
  const Values a = run(), b = run();
  for (const auto& [k, v] : a) CHECK((v.array() == b.at(k).array()).all());
}

TEST_CASE("a change at the end of a forward-ordered chain stays near the root") {
  const FactorGraph g = chain(60);
  IncrementalSolver s(g, zeros(60), forward_ordering(g.keys()));
  const FactorId last = g.slots() - 1;
  const auto r = s.update({last}, {std::make_shared<PriorFactor>(X(59), Eigen::VectorXd::Constant(1, 2.5), NoiseModel::Isotropic(1, 0.1))});
  CHECK(r.report.reeliminated_keys <= 2);
  CHECK(r.report.total_keys == 60);
  CHECK(s.tree().checkInvariants().empty());
}

}  // TEST_SUITE
