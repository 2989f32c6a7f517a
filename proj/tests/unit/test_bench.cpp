#include <doctest.h>

#include <cmath>
#include <set>

#include "gsr/bench.hpp"
#include "gsr/errors.hpp"
#include "gsr/rng.hpp"
#include "support/oracles.hpp"

using namespace gsr;

TEST_SUITE("bench") {

TEST_CASE("designs") {
  const Mat a2 = gen_design(DesignKind::II, 30, 40, 1);
  CHECK((a2.array().abs() == 1.0).all());

  const Mat a1 = gen_design(DesignKind::I, 250, 400, 2);
  const double n = static_cast<double>(a1.size());
  const double mean = a1.mean();
  const double var = (a1.array() - mean).square().sum() / n;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(n));
  CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));

  // full Hadamard: H H^T = p I
  const Mat h = gen_design(DesignKind::III, 16, 16, 3);
  CHECK((h * h.transpose() - 16.0 * Mat::Identity(16, 16)).norm() == 0.0);
  const Mat h3 = gen_design(DesignKind::III, 10, 32, 4);
  CHECK((h3 * h3.transpose() - 32.0 * Mat::Identity(10, 10)).norm() == 0.0);  // distinct rows
  CHECK_THROWS_AS(gen_design(DesignKind::III, 4, 24, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_design(DesignKind::III, 40, 32, 1), std::invalid_argument);
  CHECK((gen_design(DesignKind::I, 5, 6, 7).array() == gen_design(DesignKind::I, 5, 6, 7).array()).all());
}

TEST_CASE("signals") {
  const auto g = GroupStructure::contiguous(40, 10);
  for (auto kind : {SignalKind::i, SignalKind::ii, SignalKind::iii, SignalKind::iv}) {
    const auto s = gen_signal(kind, g, 4, 2.0, 5);
    CHECK(s.support.size() == 4);
    CHECK(group_zero_norm(s.x, g) == 4);
    for (Index i : s.support) CHECK(g.gather(s.x, i).norm() > 0);
  }
  const auto s3 = gen_signal(SignalKind::iii, g, 4, 1.0, 6);
  for (Index j = 0; j < 40; ++j) CHECK((s3.x[j] == 0.0 || std::abs(s3.x[j]) == 1.0));
  const auto s4 = gen_signal(SignalKind::iv, g, 4, 1.0, 7);
  for (std::size_t k = 0; k < 4; ++k) {
    const Index i = s4.support[k];
    const double mag = 1e5 / std::sqrt(static_cast<double>(i + 1));
    const Vec v = g.gather(s4.x, i);
    for (Index j = 0; j < v.size(); ++j) CHECK(v[j] == doctest::Approx(k < 2 ? -mag : mag));
  }
}

TEST_CASE("observations") {
  const Mat a = gen_design(DesignKind::I, 20, 30, 1);
  const Vec x = gen_signal(SignalKind::i, GroupStructure::contiguous(30, 6), 2, 2.0, 2).x;
  CHECK(((gen_observations(a, x, 0, 0, 3) - a * x).array() == 0.0).all());
  const Vec b1 = gen_observations(a, x, 0.3, 0.0, 4);
  const double an = Eigen::JacobiSVD<Mat>(a).singularValues()[0];
  CHECK((b1 - a * x).norm() <= 0.3 * an + 1e-12);
  const Vec b2 = gen_observations(a, x, 0.0, 0.2, 4);
  CHECK((b2 - a * x).norm() == doctest::Approx(0.2));
  CHECK((gen_observations(a, x, 0.3, 0.2, 5).array() == gen_observations(a, x, 0.3, 0.2, 5).array()).all());
}

TEST_CASE("instances") {
  InstanceSpec sp;
  sp.n = 30;
  sp.p = 48;
  sp.m = 8;
  sp.r_bar = 3;
  sp.theta1 = sp.theta2 = 0.1;
  sp.seed = 4;
  const auto a = make_instance(sp);
  const auto b = make_instance(sp);
  CHECK((a.A.array() == b.A.array()).all());
  CHECK((a.b.array() == b.b.array()).all());
  CHECK(a.support_true.size() == 3);
  CHECK(a.radius == doctest::Approx(1000 * a.x_true->cwiseAbs().maxCoeff()));
  IndexList nz;
  for (Index i = 0; i < 8; ++i)
    if (a.groups.gather(*a.x_true, i).norm() > 0) nz.push_back(i);
  CHECK(nz == a.support_true);
  sp.index = 1;
  CHECK_FALSE((make_instance(sp).b.array() == a.b.array()).all());
  CHECK(a.meta.contains("rng"));
}

TEST_CASE("oracle least squares") {
  InstanceSpec sp;
  sp.n = 40;
  sp.p = 60;
  sp.m = 10;
  sp.r_bar = 3;
  sp.theta1 = sp.theta2 = 0.1;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    sp.seed = seed;
    const auto inst = make_instance(sp);
    const auto o = oracle_ls(inst);
    const IndexList cols = inst.groups.columns_of(inst.support_true);
    const Vec ref = oracle::restricted_ls(inst.A, inst.b, cols);
    CHECK((o.x_ls - ref).norm() <= 1e-10 * ref.norm());
    // support containment and optimality on the support
    for (Index i = 0; i < inst.groups.num_groups(); ++i) {
      const bool in = std::find(inst.support_true.begin(), inst.support_true.end(), i) !=
                      inst.support_true.end();
      if (!in) CHECK(inst.groups.gather(o.x_ls, i).norm() == 0.0);
      else CHECK(inst.groups.gather(o.residual_noise, i).norm() <=
                 1e-10 * (1 + (inst.A.transpose() * inst.b).norm() / 40));
    }
    const Vec eps = inst.b - inst.A * *inst.x_true;
    CHECK((o.correlated_noise - inst.A.transpose() * eps / 40.0).norm() <= 1e-12 * (1 + eps.norm()));
  }
  // noiseless: recovers the truth
  sp.theta1 = sp.theta2 = 0.0;
  const auto inst = make_instance(sp);
  CHECK((oracle_ls(inst).x_ls - *inst.x_true).norm() <= 1e-10 * inst.x_true->norm());
  // full support, square invertible design
  Instance sq;
  Rng rng(3);
  sq.A = Mat::Identity(6, 6) + 0.1 * Mat::Random(6, 6);
  sq.b = rng.normal_vector(6);
  sq.groups = GroupStructure::contiguous(6, 3);
  sq.support_true = {0, 1, 2};
  CHECK((oracle_ls(sq).x_ls - sq.A.lu().solve(sq.b)).norm() <= 1e-10 * (1 + sq.b.norm()));
  // rank deficiency
  Instance bad = sq;
  bad.A.col(1) = bad.A.col(0);
  CHECK_THROWS_AS(oracle_ls(bad), SingularDesign);
}

TEST_CASE("brute force") {
  InstanceSpec sp;
  sp.n = 12;
  sp.p = 8;
  sp.m = 4;
  sp.r_bar = 1;
  sp.seed = 2;
  Instance inst = make_instance(sp);
  // noiseless, nu large: one group, zero residual
  auto bf = brute_force_zero_norm(inst, 1e6, inst.radius);
  CHECK(bf.objective == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(bf.support == inst.support_true);
  // tiny nu: empty support
  bf = brute_force_zero_norm(inst, 1e-12, inst.radius);
  CHECK(bf.support.empty());
  CHECK(bf.x.norm() == 0.0);
  // b = 0
  Instance zero = inst;
  zero.b.setZero();
  bf = brute_force_zero_norm(zero, 5.0, inst.radius);
  CHECK(bf.objective == 0.0);
  // refuses large m
  InstanceSpec big = sp;
  big.p = 34;
  big.m = 17;
  CHECK_THROWS_AS(brute_force_zero_norm(make_instance(big), 1.0, 10.0), std::invalid_argument);
}

TEST_CASE("box restricted least squares") {
  Rng rng(4);
  const Mat a = gen_design(DesignKind::I, 20, 6, 5);
  const Vec b = 10 * rng.normal_vector(20);
  const IndexList cols{0, 2, 3};
  const Vec z = box_restricted_ls(a, b, cols, 0.5);
  CHECK(z.cwiseAbs().maxCoeff() <= 0.5 + 1e-15);
  // projected-gradient fixed point
  Mat as(20, 3);
  for (int k = 0; k < 3; ++k) as.col(k) = a.col(cols[static_cast<std::size_t>(k)]);
  const Vec g = as.transpose() * (as * z - b) / 20.0;
  const Vec t = (z - g).cwiseMax(-0.5).cwiseMin(0.5);
  CHECK((t - z).norm() <= 1e-8);
}

TEST_CASE("multitask assembly") {
  Rng rng(6);
  std::vector<TaskData> tasks(2);
  tasks[0].X = Mat::Random(2, 3);
  tasks[0].y = rng.normal_vector(2);
  tasks[1].X = Mat::Random(4, 3);
  tasks[1].y = rng.normal_vector(4);
  const auto inst = assemble_multitask(tasks);
  CHECK(inst.A.rows() == 6);
  CHECK(inst.A.cols() == 6);
  CHECK(inst.A.block(0, 3, 2, 3).norm() == 0.0);
  CHECK(inst.A.block(2, 0, 4, 3).norm() == 0.0);
  CHECK((inst.A.block(0, 0, 2, 3) - tasks[0].X).norm() == 0.0);
  CHECK(inst.groups.num_groups() == 2);
  CHECK(inst.groups.group(1) == IndexList{3, 4, 5});
  CHECK(inst.radius == 2000.0);
  CHECK(inst.b.tail(4) == tasks[1].y);
  const auto one = assemble_multitask({tasks[0]});
  CHECK((one.A - tasks[0].X).norm() == 0.0);
  CHECK_THROWS_AS(assemble_multitask({}), std::invalid_argument);
  std::vector<TaskData> empty(1);
  CHECK_THROWS_AS(assemble_multitask(empty), std::invalid_argument);
}

TEST_CASE("metrics") {
  Instance inst;
  inst.groups = GroupStructure::contiguous(6, 3);
  inst.A = Mat::Zero(1, 6);
  Vec x(6);
  x << 1, 2, 0, 0, 2, 0;
  inst.x_true = x;
  inst.support_true = {0, 2};
  auto m = metrics(x, inst);
  CHECK(m.relerr == 0.0);
  CHECK(m.exact_support);
  m = metrics(Vec::Zero(6), inst);
  CHECK(m.relerr == 1.0);
  CHECK(m.support_recall == 0.0);
  Vec d(6);
  d << 0.03, 0, 0, 0, 0, 0;
  m = metrics(x + d, inst);
  CHECK(m.relerr == doctest::Approx(0.01));
  Vec extra = x;
  extra[2] = 1.0;
  m = metrics(extra, inst);
  CHECK(m.support_precision == doctest::Approx(2.0 / 3.0));
  CHECK(m.support_recall == 1.0);
  CHECK_FALSE(m.exact_support);
  inst.x_true = Vec::Zero(6);
  CHECK_THROWS(metrics(x, inst));
}

}
