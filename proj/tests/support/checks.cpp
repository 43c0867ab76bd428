#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "kdfg/bayes_tree.hpp"
#include "kdfg/dynamics.hpp"
#include "kdfg/errors.hpp"
#include "kdfg/model_io.hpp"
#include "kdfg/ordering.hpp"

namespace kdfg::checks {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Eigen::VectorXd random_vector(Rng& rng, int n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = uniform(rng, -scale, scale);
  return v;
}

Eigen::MatrixXd random_matrix(Rng& rng, int r, int c) {
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = uniform(rng, -1.0, 1.0);
  return m;
}

void record(CheckResult& r, double err, const std::string& where) {
  ++r.cases;
  if (err >= r.worst) {
    r.worst = err;
    r.detail = where;
  }
}

ModelPtr shared_model(const std::string& name) {
  static std::map<std::string, ModelPtr> cache;
  auto& m = cache[name];
  if (!m) m = std::make_shared<const RobotModel>(bundled_model(name));
  return m;
}

int key_dim(const Key& k) {
  switch (k.symbol) {
    case sym::kTwist:
    case sym::kTwistAccel:
    case sym::kWrench:
      return 6;
    default:
      return 1;
  }
}

/// Max entrywise |J - J_fd| / max(1, |J|_max) over every key block.
double jacobian_error(const Factor& f, const Values& x, double h = 1e-6) {
  std::vector<Eigen::MatrixXd> J;
  f.evaluate(x, &J);
  double scale = 1.0;
  for (const auto& b : J) scale = std::max(scale, b.cwiseAbs().maxCoeff());
  double err = 0.0;
  for (std::size_t k = 0; k < f.keys().size(); ++k) {
    const Key& key = f.keys()[k];
    const int d = static_cast<int>(x.at(key).size());
    for (int c = 0; c < d; ++c) {
      Values plus = x, minus = x;
      plus.at(key)(c) += h;
      minus.at(key)(c) -= h;
      const Eigen::VectorXd fd = (f.evaluate(plus, nullptr) - f.evaluate(minus, nullptr)) / (2.0 * h);
      err = std::max(err, (J[k].col(c) - fd).cwiseAbs().maxCoeff() / scale);
    }
  }
  return err;
}

Values random_values(const Factor& f, Rng& rng, double scale) {
  Values v;
  for (const Key& k : f.keys()) {
    if (!v.contains(k)) v.insert(k, random_vector(rng, key_dim(k), k.symbol == sym::kWrench ? 10.0 * scale : scale));
  }
  return v;
}

std::array<int, 3> cell_of(const GridSpec& g, const Eigen::Vector3d& p) {
  std::array<int, 3> c{};
  for (int a = 0; a < 3; ++a) c[a] = static_cast<int>(std::floor((p(a) - g.origin(a)) / g.cell_size));
  return c;
}

}  // namespace

std::string describe(const CheckResult& r) {
  std::ostringstream s;
  s << r.name << ": worst " << r.worst << " (tol " << r.tol << ") over " << r.cases << " cases";
  if (r.skipped) s << ", " << r.skipped << " skipped";
  if (!r.detail.empty()) s << " [" << r.detail << "]";
  return s.str();
}

CheckResult sparse_vs_dense(int graphs, std::uint64_t seed) {
  CheckResult res{"sparse vs dense", 0.0, 1e-9};
  Rng rng(seed);
  for (int g = 0; g < graphs; ++g) {
    const int nvars = uniform_int(rng, 2, 12);
    std::vector<Key> keys;
    std::map<Key, int> dims, offset;
    int total = 0;
    for (int i = 0; i < nvars; ++i) {
      const Key k{'x', static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(uniform_int(rng, 0, 5))};
      if (dims.count(k)) continue;
      keys.push_back(k);
      dims[k] = uniform_int(rng, 1, 3);
      offset[k] = total;
      total += dims[k];
    }
    GaussianFactorGraph graph;
    auto add_factor = [&](std::vector<Key> fk, int rows) {
      LinearFactor lf;
      lf.keys = std::move(fk);
      for (const Key& k : lf.keys) lf.blocks.push_back(random_matrix(rng, rows, dims[k]));
      lf.rhs = random_vector(rng, rows);
      graph.push_back(std::move(lf));
    };
    // A unary factor per variable keeps the system well posed; random couplings on top.
    for (const Key& k : keys) add_factor({k}, dims[k]);
    const int extra = uniform_int(rng, 0, 2 * static_cast<int>(keys.size()));
    for (int f = 0; f < extra; ++f) {
      std::vector<Key> fk = keys;
      std::shuffle(fk.begin(), fk.end(), rng);
      fk.resize(uniform_int(rng, 1, std::min<int>(3, static_cast<int>(fk.size()))));
      add_factor(fk, uniform_int(rng, 1, 4));
    }

    int rows = 0;
    for (const auto& lf : graph) rows += lf.rows();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, total);
    Eigen::VectorXd b(rows);
    int r0 = 0;
    for (const auto& lf : graph) {
      for (std::size_t i = 0; i < lf.keys.size(); ++i) A.block(r0, offset[lf.keys[i]], lf.rows(), dims[lf.keys[i]]) = lf.blocks[i];
      b.segment(r0, lf.rows()) = lf.rhs;
      r0 += lf.rows();
    }
    // Normal equations square the condition number; solve them in extended precision
    // so the oracle itself is accurate well below the tolerance.
    using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const MatL Al = A.cast<long double>();
    const MatL bl = b.cast<long double>();
    const Eigen::VectorXd dense = MatL((Al.transpose() * Al).ldlt().solve(Al.transpose() * bl)).col(0).cast<double>();

    std::vector<Key> ordering = keys;
    std::shuffle(ordering.begin(), ordering.end(), rng);
    const Values sparse = solve(eliminate(graph, ordering));
    double err = 0.0;
    for (const Key& k : keys) err = std::max(err, (sparse.at(k) - dense.segment(offset[k], dims[k])).cwiseAbs().maxCoeff());
    record(res, err, "graph " + std::to_string(g));
  }
  return res;
}

std::vector<CheckResult> factor_jacobians(int points, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CheckResult> out;
  const double tol = 1e-5;
  const ModelPtr arm3 = shared_model("arm3");
  const ModelPtr arm7 = shared_model("arm7");
  const ModelPtr rr = shared_model("rr_planar");
  const NoiseModel n6 = NoiseModel::Isotropic(6, 0.1), n1 = NoiseModel::Isotropic(1, 0.1);

  // Newton-Euler factors on every joint of the 3- and 7-DOF arms.
  auto dynamics = [&](const std::string& name, auto make) {
    CheckResult r{name, 0.0, tol};
    for (int p = 0; p < points; ++p) {
      const ModelPtr& m = p % 2 ? arm7 : arm3;
      const int j = uniform_int(rng, 0, m->numJoints() - 1);
      const FactorPtr f = make(m, j, uniform_int(rng, 0, 20));
      record(r, jacobian_error(*f, random_values(*f, rng, 2.0)), m->name() + " joint " + std::to_string(j));
    }
    out.push_back(r);
  };
  dynamics("twist factor", [&](ModelPtr m, int j, int t) { return std::make_shared<TwistFactor>(m, j, t, n6); });
  dynamics("accel factor", [&](ModelPtr m, int j, int t) { return std::make_shared<AccelFactor>(m, j, t, n6); });
  dynamics("wrench factor", [&](ModelPtr m, int j, int t) { return std::make_shared<WrenchFactor>(m, j, t, n6); });
  dynamics("torque factor", [&](ModelPtr m, int j, int t) { return std::make_shared<TorqueFactor>(m, j, t, n1); });

  {
    CheckResult r{"limit factor", 0.0, tol};
    for (int p = 0; r.cases < points; ++p) {
      const double lo = uniform(rng, -3, 0), hi = lo + uniform(rng, 1, 4), eps = uniform(rng, 0.01, 0.2);
      const double a = uniform(rng, 0.5, 20);
      const Key k = Q(0, 0);
      const LimitFactor f(k, lo, hi, eps, a, n1);
      const double z = uniform(rng, lo - 1, hi + 1);
      if (std::abs(z - (lo + eps)) < 1e-4 || std::abs(z - (hi - eps)) < 1e-4) {
        ++r.skipped;
        continue;
      }
      Values x;
      x.insert(k, z);
      record(r, jacobian_error(f, x), "z " + std::to_string(z));
    }
    out.push_back(r);
  }
  {
    CheckResult r{"min-torque factor", 0.0, tol};
    for (int p = 0; p < points; ++p) {
      const int n = uniform_int(rng, 1, 7);
      const MinTorqueFactor f(n, 3, NoiseModel::Isotropic(n, 1.0));
      record(r, jacobian_error(f, random_values(f, rng, 20.0)), "");
    }
    out.push_back(r);
  }
  {
    CheckResult r{"gp prior factor", 0.0, tol};
    for (int p = 0; p < points; ++p) {
      const int d = uniform_int(rng, 1, 4);
      GpPriorSpec spec;
      const Eigen::MatrixXd B = random_matrix(rng, d, d);
      spec.Qc = B * B.transpose() + Eigen::MatrixXd::Identity(d, d);
      spec.order = p % 4 == 3 ? GpOrder::kConstantVelocity : GpOrder::kConstantAcceleration;
      spec.standard_position_coefficient = p % 2;
      const GpPriorFactor f(d, uniform_int(rng, 0, 50), uniform(rng, 0.05, 0.5), spec);
      record(r, jacobian_error(f, random_values(f, rng, 2.0)), "d " + std::to_string(d));
    }
    out.push_back(r);
  }
  {
    CheckResult r{"pose factor", 0.0, tol};
    for (int p = 0; r.cases < points; ++p) {
      const ModelPtr& m = p % 2 ? arm7 : arm3;
      const Pose target(rotation_exp(Eigen::Vector3d(random_vector(rng, 3, 1.5))), Eigen::Vector3d(random_vector(rng, 3, 1.0)));
      const PoseFactor f(m, 4, target, NoiseModel::Isotropic(6, 1.0));
      Values x = random_values(f, rng, 2.0);
      Eigen::VectorXd q(m->numJoints());
      for (int j = 0; j < m->numJoints(); ++j) q(j) = x.scalar(Q(j, 4));
      // The rotation log is not differentiable at an angle of pi.
      if (pose_residual(*m, q, target).head<3>().norm() > M_PI - 0.05) {
        ++r.skipped;
        continue;
      }
      record(r, jacobian_error(f, x), m->name());
    }
    out.push_back(r);
  }
  {
    CheckResult r{"obstacle factor", 0.0, tol};
    ObstacleSet obs;
    obs.boxes.push_back({Eigen::Vector3d(1.2, 0.6, 0), Eigen::Vector3d(0.4, 0.3, 0.5)});
    obs.spheres.push_back({Eigen::Vector3d(-0.8, 1.0, 0.05), 0.35});
    GridSpec grid;
    grid.origin = Eigen::Vector3d(-2.4, -2.4, -0.5);
    grid.cell_size = 0.04;
    grid.dims = {121, 121, 26};
    const auto sdf = std::make_shared<const SdfGrid>(build_sdf(obs, grid));
    const double eps = 0.3, h = 1e-6;
    int tries = 0;
    while (r.cases < points && tries++ < 20 * points) {
      const int link = uniform_int(rng, 0, 1);
      const int sphere = uniform_int(rng, 0, static_cast<int>(rr->link(link).spheres.size()) - 1);
      const ObstacleFactor f(rr, sdf, link, sphere, 0, eps, n1);
      Values x = random_values(f, rng, M_PI);
      Eigen::VectorXd q = Eigen::VectorXd::Zero(rr->numJoints());
      for (const Key& k : f.keys()) q(k.entity) = x.scalar(k);
      const auto& s = sphere_placements(*rr, q);
      const auto it = std::find_if(s.begin(), s.end(), [&](const SpherePlacement& sp) {
        return sp.link == link && sp.index == sphere;
      });
      const double d = sdf->query(it->center).distance - it->radius;
      // Only the hinge's active side is interesting; skip kinks and cell faces.
      bool skip = d >= eps || eps - d < 1e-4;
      const auto [p, J] = point_jacobian(*rr, q, link, rr->link(link).spheres[sphere].offset);
      for (int c = 0; c <= link && !skip; ++c) {
        if (cell_of(grid, p + h * J.col(c)) != cell_of(grid, p - h * J.col(c))) skip = true;
      }
      if (skip) {
        ++r.skipped;
        continue;
      }
      record(r, jacobian_error(f, x, h), "link " + std::to_string(link));
    }
    out.push_back(r);
  }
  {
    CheckResult r{"prior factor", 0.0, tol};
    for (int p = 0; p < points; ++p) {
      const int d = uniform_int(rng, 1, 6);
      const PriorFactor f(TwistKey(0, 0), random_vector(rng, d), NoiseModel::Isotropic(d, 0.5));
      Values x;
      x.insert(TwistKey(0, 0), random_vector(rng, d));
      record(r, jacobian_error(f, x), "");
    }
    out.push_back(r);
  }
  return out;
}

CheckResult rnea_factor_residuals(int states, std::uint64_t seed) {
  CheckResult res{"Newton-Euler residuals on RNEA values", 0.0, 1e-10};
  Rng rng(seed);
  const std::vector<ModelPtr> models{shared_model("arm3"), shared_model("arm7"), shared_model("acrobot"),
                                     shared_model("rr_planar")};
  const NoiseModel n6 = NoiseModel::Unit(6), n1 = NoiseModel::Unit(1);
  for (int s = 0; s < states; ++s) {
    const ModelPtr& m = models[s % models.size()];
    const int n = m->numJoints();
    const Eigen::VectorXd q = random_vector(rng, n, M_PI), qd = random_vector(rng, n, 3.0), qdd = random_vector(rng, n, 10.0);
    const RneaResult rn = rnea(*m, q, qd, qdd);
    const std::uint32_t t = static_cast<std::uint32_t>(s);
    Values x;
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<std::uint32_t>(j);
      x.insert(Q(u, t), q(j));
      x.insert(DQ(u, t), qd(j));
      x.insert(DDQ(u, t), qdd(j));
      x.insert(TwistKey(u, t), Eigen::VectorXd(rn.twists[j]));
      x.insert(TwistAccelKey(u, t), Eigen::VectorXd(rn.accelerations[j]));
      x.insert(WrenchKey(u, t), Eigen::VectorXd(rn.wrenches[j]));
      x.insert(TorqueKey(u, t), rn.torques(j));
    }
    double err = 0.0;
    for (int j = 0; j < n; ++j) {
      err = std::max(err, TwistFactor(m, j, s, n6).evaluate(x, nullptr).cwiseAbs().maxCoeff());
      err = std::max(err, AccelFactor(m, j, s, n6).evaluate(x, nullptr).cwiseAbs().maxCoeff());
      err = std::max(err, WrenchFactor(m, j, s, n6).evaluate(x, nullptr).cwiseAbs().maxCoeff());
      err = std::max(err, TorqueFactor(m, j, s, n1).evaluate(x, nullptr).cwiseAbs().maxCoeff());
    }
    record(res, err, m->name() + " state " + std::to_string(s));
  }
  return res;
}

CheckResult incremental_vs_batch(int sequences, std::uint64_t seed) {
  CheckResult res{"incremental vs batch", 0.0, 1e-10};
  Rng rng(seed);
  for (int s = 0; s < sequences; ++s) {
    const int nvars = uniform_int(rng, 4, 25);
    std::vector<Key> keys;
    std::map<Key, int> dims;
    for (int i = 0; i < nvars; ++i) {
      const Key k{'x', static_cast<std::uint32_t>(i % 3), static_cast<std::uint32_t>(i / 3)};
      keys.push_back(k);
      dims[k] = uniform_int(rng, 1, 3);
    }
    // Nonlinear factor r = A x_a + B sin(x_b) - c, so relinearization changes the system.
    auto make_factor = [&](const Key& a, const Key& b) -> FactorPtr {
      const int rows = uniform_int(rng, 1, 3);
      const Eigen::MatrixXd A = random_matrix(rng, rows, dims[a]), B = random_matrix(rng, rows, dims[b]);
      const Eigen::VectorXd c = random_vector(rng, rows);
      return std::make_shared<FunctionFactor>(
          std::vector<Key>{a, b}, NoiseModel::Isotropic(rows, uniform(rng, 0.2, 2.0)),
          [A, B, c](const std::vector<Eigen::VectorXd>& v, std::vector<Eigen::MatrixXd>* J) {
            if (J) *J = {A, B * v[1].array().cos().matrix().asDiagonal()};
            return Eigen::VectorXd(A * v[0] + B * v[1].array().sin().matrix() - c);
          });
    };
    FactorGraph graph;
    Values theta;
    for (const Key& k : keys) {
      theta.insert(k, random_vector(rng, dims[k]));
      graph.add(std::make_shared<PriorFactor>(k, random_vector(rng, dims[k]), NoiseModel::Isotropic(dims[k], 1.0)));
    }
    for (std::size_t i = 1; i < keys.size(); ++i) graph.add(make_factor(keys[i - 1], keys[i]));
    std::vector<Key> ordering = keys;
    if (s % 2) std::shuffle(ordering.begin(), ordering.end(), rng);
    IncrementalSolver solver(graph, theta, ordering);

    auto compare = [&](int step) {
      const GaussianFactorGraph lin = solver.graph().linearize(solver.linearizationPoint());
      const Values batch = solve(eliminate(lin, solver.ordering()));
      record(res, solver.delta().maxAbsDiff(batch), "sequence " + std::to_string(s) + " step " + std::to_string(step));
    };
    compare(0);
    std::vector<FactorId> removable;
    for (FactorId id = static_cast<FactorId>(keys.size()); id < graph.slots(); ++id) removable.push_back(id);
    const int steps = uniform_int(rng, 3, 8);
    for (int step = 1; step <= steps; ++step) {
      std::vector<FactorId> removed;
      std::vector<FactorPtr> added;
      std::set<Key> relin;
      if (!removable.empty() && uniform(rng, 0, 1) < 0.5) {
        const int i = uniform_int(rng, 0, static_cast<int>(removable.size()) - 1);
        removed.push_back(removable[i]);
        removable.erase(removable.begin() + i);
      }
      for (int a = uniform_int(rng, 0, 2); a > 0; --a) {
        added.push_back(make_factor(keys[uniform_int(rng, 0, nvars - 1)], keys[uniform_int(rng, 0, nvars - 1)]));
      }
      for (const Key& k : keys) {
        if (uniform(rng, 0, 1) < 0.2) relin.insert(k);
      }
      const auto r = solver.update(removed, added, relin);
      removable.insert(removable.end(), r.added_ids.begin(), r.added_ids.end());
      compare(step);
    }
  }
  return res;
}

CheckResult planar_lagrangian(int states, std::uint64_t seed) {
  CheckResult res{"RNEA vs planar Lagrangian", 0.0, 1e-9};
  Rng rng(seed);
  // Both models are two uniform 1 kg, 1 m rods (COM at mid-link, 0.0833 kg m^2 about
  // the COM) in the x-y plane with gravity 9.81 along -y. The Acrobot's first link
  // hangs straight down at q = 0, the RR arm's points along +x.
  const double m1 = 1, m2 = 1, l1 = 1, c1 = 0.5, c2 = 0.5, I1 = 0.0833, I2 = 0.0833, g = 9.81;
  for (const auto& [name, phi0] : {std::pair{"rr_planar", 0.0}, std::pair{"acrobot", -M_PI / 2}}) {
    const ModelPtr m = shared_model(name);
    for (int s = 0; s < states; ++s) {
      const Eigen::Vector2d q = random_vector(rng, 2, M_PI), qd = random_vector(rng, 2, 4.0), qdd = random_vector(rng, 2, 10.0);
      const double th1 = q(0) + phi0, th2 = th1 + q(1);
      const double cq2 = std::cos(q(1)), sq2 = std::sin(q(1));
      Eigen::Matrix2d M;
      M(0, 0) = m1 * c1 * c1 + I1 + m2 * (l1 * l1 + c2 * c2 + 2 * l1 * c2 * cq2) + I2;
      M(0, 1) = M(1, 0) = m2 * (c2 * c2 + l1 * c2 * cq2) + I2;
      M(1, 1) = m2 * c2 * c2 + I2;
      const double h = m2 * l1 * c2 * sq2;
      const Eigen::Vector2d coriolis(-h * (2 * qd(0) * qd(1) + qd(1) * qd(1)), h * qd(0) * qd(0));
      const Eigen::Vector2d gravity(m1 * g * c1 * std::cos(th1) + m2 * g * (l1 * std::cos(th1) + c2 * std::cos(th2)),
                                    m2 * g * c2 * std::cos(th2));
      const Eigen::Vector2d tau = M * qdd + coriolis + gravity;
      const Eigen::VectorXd rnea_tau = rnea_inverse_dynamics(*m, q, qd, qdd);
      record(res, (rnea_tau - tau).cwiseAbs().maxCoeff(), std::string(name) + " state " + std::to_string(s));
    }
  }
  return res;
}

CheckResult gp_flow_composition(int draws, std::uint64_t seed) {
  CheckResult res{"GP transition composition", 0.0, 1e-12};
  Rng rng(seed);
  for (int k = 0; k < draws; ++k) {
    const int d = uniform_int(rng, 1, 7);
    const double a = uniform(rng, 0.001, 1.0), b = uniform(rng, 0.001, 1.0);
    const GpOrder order = k % 5 == 4 ? GpOrder::kConstantVelocity : GpOrder::kConstantAcceleration;
    const Eigen::MatrixXd lhs = gp_transition(a + b, d, order);
    const Eigen::MatrixXd rhs = gp_transition(b, d, order) * gp_transition(a, d, order);
    record(res, (lhs - rhs).cwiseAbs().maxCoeff(), "draw " + std::to_string(k));
  }
  return res;
}

CheckResult gp_covariance_pd(int draws, std::uint64_t seed) {
  // Reported value: the negated smallest relative eigenvalue, so <= 0 means positive definite.
  CheckResult res{"GP covariance positive definite", -std::numeric_limits<double>::infinity(), 0.0};
  Rng rng(seed);
  for (int k = 0; k < draws; ++k) {
    const int d = uniform_int(rng, 1, 7);
    const double dt = std::pow(10.0, uniform(rng, -2, 0));
    const Eigen::MatrixXd B = random_matrix(rng, d, d);
    const Eigen::MatrixXd Qc = B * B.transpose() + uniform(rng, 0.01, 1.0) * Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd S = gp_covariance(dt, Qc, GpOrder::kConstantAcceleration, k % 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    const Eigen::LLT<Eigen::MatrixXd> llt(S);
    const double rel = es.eigenvalues().minCoeff() / es.eigenvalues().maxCoeff();
    const double score = llt.info() == Eigen::Success ? -rel : std::abs(rel) + 1.0;
    ++res.cases;
    if (score > res.worst) {
      res.worst = score;
      res.detail = "d " + std::to_string(d) + " dt " + std::to_string(dt);
    }
  }
  return res;
}

CheckResult gp_rollout_residual(int draws, std::uint64_t seed) {
  CheckResult res{"GP residual on constant-acceleration rollouts", 0.0, 1e-12};
  Rng rng(seed);
  for (int k = 0; k < draws; ++k) {
    const int d = uniform_int(rng, 1, 5);
    const double dt = uniform(rng, 0.01, 0.5);
    GpPriorSpec spec;
    spec.Qc = Eigen::MatrixXd::Identity(d, d);
    const Eigen::VectorXd q0 = random_vector(rng, d), v0 = random_vector(rng, d), a = random_vector(rng, d);
    Values x;
    for (int step = 0; step < 2; ++step) {
      const double t = step * dt;
      for (int j = 0; j < d; ++j) {
        const auto u = static_cast<std::uint32_t>(j), s = static_cast<std::uint32_t>(step);
        x.insert(Q(u, s), q0(j) + v0(j) * t + 0.5 * a(j) * t * t);
        x.insert(DQ(u, s), v0(j) + a(j) * t);
        x.insert(DDQ(u, s), a(j));
      }
    }
    const GpPriorFactor f(d, 0, dt, spec);
    record(res, f.evaluate(x, nullptr).cwiseAbs().maxCoeff(), "draw " + std::to_string(k));
  }
  return res;
}

CheckResult sdf_error(int points, std::uint64_t seed) {
  Rng rng(seed);
  ObstacleSet obs;
  obs.boxes.push_back({Eigen::Vector3d(0.65, 0, 0.55), Eigen::Vector3d(0.5, 0.8, 0.04)});
  obs.boxes.push_back({Eigen::Vector3d(-0.4, 0.5, 0.2), Eigen::Vector3d(0.3, 0.2, 0.6)});
  obs.spheres.push_back({Eigen::Vector3d(-0.3, -0.6, 0.4), 0.25});
  GridSpec grid;
  grid.origin = Eigen::Vector3d(-1.2, -1.2, -0.2);
  grid.cell_size = 0.02;
  grid.dims = {121, 121, 76};
  const SdfGrid sdf = build_sdf(obs, grid);
  CheckResult res{"SDF interpolation error", 0.0, grid.cell_size / 2};
  const Eigen::Vector3d hi = grid.origin + grid.cell_size * Eigen::Vector3d(grid.dims[0] - 1, grid.dims[1] - 1, grid.dims[2] - 1);
  for (int k = 0; k < points; ++k) {
    Eigen::Vector3d p;
    // Half the points near a surface, where collision checks happen.
    if (k % 2) {
      const auto& b = obs.boxes[k % obs.boxes.size()];
      p = b.center + (0.5 * b.extents + Eigen::Vector3d::Constant(0.1)).cwiseProduct(Eigen::Vector3d(random_vector(rng, 3)));
    } else {
      for (int a = 0; a < 3; ++a) p(a) = uniform(rng, grid.origin(a), hi(a));
    }
    p = p.cwiseMax(grid.origin).cwiseMin(hi);
    record(res, std::abs(sdf.query(p).distance - obs.signedDistance(p)), "point " + std::to_string(k));
  }
  return res;
}

CheckResult hinge_continuity() {
  CheckResult res{"hinge continuity at d = eps", 0.0, 0.0};
  for (double eps : {0.0, 0.05, 0.1, 0.3}) {
    const double at = hinge_cost_sdf(eps, eps).cost;
    const double left = hinge_cost_sdf(std::nextafter(eps, -1.0), eps).cost;
    const double right = hinge_cost_sdf(std::nextafter(eps, 2.0), eps).cost;
    record(res, std::abs(at), "cost at eps");
    record(res, std::abs(right - at), "right limit");
    // Left limit is eps - d, one ulp of d away from zero.
    record(res, std::max(0.0, std::abs(left - at) - (eps - std::nextafter(eps, -1.0))), "left limit");
  }
  for (double z : {0.0, 1e-12}) {
    const LimitHinge lo = limit_residual(-1.0 + 0.1 - z, -1.0, 1.0, 0.1, 5.0);
    const LimitHinge hi = limit_residual(1.0 - 0.1 + z, -1.0, 1.0, 0.1, 5.0);
    record(res, std::max(0.0, std::abs(lo.cost) - 5.0 * z - 1e-15), "limit lower threshold");
    record(res, std::max(0.0, std::abs(hi.cost) - 5.0 * z - 1e-15), "limit upper threshold");
  }
  return res;
}

}  // namespace kdfg::checks
