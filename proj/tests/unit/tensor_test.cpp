#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "gsim/gradcheck.hpp"
#include "gsim/gradcheck_suite.hpp"
#include "gsim/params.hpp"
#include "gsim/tensor.hpp"

using namespace gsim;
using ad::Tensor;

TEST(Tensor, SoftmaxExamples) {
  const auto a = ad::softmax_with_temperature(Tensor::row({0.0, 0.0}), 1.0);
  EXPECT_EQ(a.at(0, 0), 0.5);
  EXPECT_EQ(a.at(0, 1), 0.5);
  const auto b = ad::softmax_with_temperature(Tensor::row({std::log(2.0), 0.0}), 1.0);
  EXPECT_NEAR(b.at(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(b.at(0, 1), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(ad::softmax_with_temperature(Tensor::row({1.0}), 0.0), std::invalid_argument);
  EXPECT_THROW(ad::softmax_with_temperature(Tensor::row({1.0}), -2.0), std::invalid_argument);
}

TEST(Tensor, SoftmaxRowsSumToOne) {
  SplitMix64 r(1);
  std::vector<double> v(40);
  for (auto& x : v) x = r.uniform(-30.0, 30.0);
  const auto s = ad::softmax_with_temperature(Tensor::from(4, 10, v), 0.3);
  for (int i = 0; i < 4; ++i) {
    double sum = 0.0;
    for (int j = 0; j < 10; ++j) {
      EXPECT_GT(s.at(i, j), 0.0);
      sum += s.at(i, j);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Tensor, MseOfIdenticalInputs) {
  const Tensor x = Tensor::from(3, 1, {1.0, -2.0, 0.5}, true);
  const Tensor y = Tensor::from(3, 1, {1.0, -2.0, 0.5});
  const auto loss = ad::mse_loss(x, y);
  EXPECT_EQ(loss.item(), 0.0);
  loss.backward();
  for (double g : x.grad()) EXPECT_EQ(g, 0.0);
}

TEST(Tensor, BackwardExamples) {
  const Tensor w = Tensor::row({1.0, 2.0}, true);
  ad::sum_all(ad::hadamard(w, w)).backward();
  EXPECT_EQ(w.grad()[0], 2.0);
  EXPECT_EQ(w.grad()[1], 4.0);

  const Tensor x = Tensor::scalar(-3.0, true);
  ad::relu(ad::abs(x)).backward();
  EXPECT_EQ(x.grad()[0], -1.0);
}

TEST(Tensor, BackwardAccumulatesAcrossCallsAndPaths) {
  // Diamond: y = a*b + a with b = 2a, so dy/da = 4a + 1.
  const Tensor a = Tensor::scalar(1.5, true);
  const Tensor b = ad::scale(a, 2.0);
  const Tensor y = ad::add(ad::hadamard(a, b), a);
  y.backward();
  EXPECT_DOUBLE_EQ(a.grad()[0], 4.0 * 1.5 + 1.0);
  y.backward();
  EXPECT_DOUBLE_EQ(a.grad()[0], 2.0 * (4.0 * 1.5 + 1.0));
}

TEST(Tensor, BackwardRequiresScalarRoot) {
  const Tensor x = Tensor::row({1.0, 2.0}, true);
  EXPECT_THROW(ad::relu(x).backward(), std::invalid_argument);
}

TEST(Tensor, AbsSubgradientZeroAtZero) {
  const Tensor x = Tensor::row({0.0, -1.0, 2.0}, true);
  ad::sum_all(ad::abs(x)).backward();
  EXPECT_EQ(x.grad()[0], 0.0);
  EXPECT_EQ(x.grad()[1], -1.0);
  EXPECT_EQ(x.grad()[2], 1.0);
}

TEST(Tensor, ReduceMaxRoutesToFirstArgmax) {
  const Tensor x = Tensor::row({3.0, 1.0, 3.0}, true);
  ad::reduce_max(x, 1).backward();
  EXPECT_EQ(x.grad()[0], 1.0);
  EXPECT_EQ(x.grad()[1], 0.0);
  EXPECT_EQ(x.grad()[2], 0.0);
}

TEST(Tensor, LayerNormStatistics) {
  SplitMix64 r(2);
  std::vector<double> v(5 * 8);
  for (auto& x : v) x = r.uniform(-2.0, 2.0);
  const auto y = ad::layer_norm(Tensor::from(5, 8, v), Tensor::full(1, 8, 1.0), Tensor::zeros(1, 8));
  for (int i = 0; i < 5; ++i) {
    double mean = 0.0, var = 0.0;
    for (int j = 0; j < 8; ++j) mean += y.at(i, j) / 8.0;
    for (int j = 0; j < 8; ++j) var += (y.at(i, j) - mean) * (y.at(i, j) - mean) / 8.0;
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(var, 1.0, 1e-4);  // epsilon in the denominator
  }
}

TEST(Tensor, ShapeErrorsNameBothShapes) {
  try {
    ad::matmul(Tensor::zeros(2, 3), Tensor::zeros(2, 3));
    FAIL() << "no error";
  } catch (const ad::ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("(2, 3)"), std::string::npos) << msg;
  }
  EXPECT_THROW(ad::add(Tensor::zeros(2, 3), Tensor::zeros(3, 2)), ad::ShapeError);
  EXPECT_THROW(ad::hadamard(Tensor::zeros(1, 3), Tensor::zeros(2, 3)), ad::ShapeError);
}

TEST(Tensor, MatmulMatchesNaive) {
  SplitMix64 r(3);
  std::vector<double> a(4 * 5), b(5 * 3);
  for (auto& x : a) x = r.uniform(-1.0, 1.0);
  for (auto& x : b) x = r.uniform(-1.0, 1.0);
  const auto c = ad::matmul(Tensor::from(4, 5, a), Tensor::from(5, 3, b));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 5; ++k) s += a[i * 5 + k] * b[k * 3 + j];
      EXPECT_NEAR(c.at(i, j), s, 1e-14);
    }
  }
}

TEST(Adam, ZeroGradientLeavesParameters) {
  std::vector<double> theta = {0.3, -1.2};
  const std::vector<double> g = {0.0, 0.0};
  AdamState st;
  for (int k = 0; k < 100; ++k) adam_update(theta, g, st, AdamConfig{});
  EXPECT_EQ(theta, (std::vector<double>{0.3, -1.2}));
}

TEST(Adam, FirstStepClosedForm) {
  // Bias-corrected m_hat = g and v_hat = g^2 at step 1, so the step is
  // lr * g / (|g| + eps).
  const AdamConfig cfg;
  for (double g : {1.0, -0.25, 3e-3}) {
    std::vector<double> theta = {2.0};
    AdamState st;
    adam_update(theta, std::vector<double>{g}, st, cfg);
    EXPECT_NEAR(theta[0], 2.0 - cfg.lr * g / (std::abs(g) + cfg.eps), 1e-16);
    EXPECT_NEAR(st.m[0], (1.0 - cfg.beta1) * g, 1e-18);
    EXPECT_NEAR(st.v[0], (1.0 - cfg.beta2) * g * g, 1e-18);
    EXPECT_EQ(st.step, 1);
  }
}

TEST(Adam, SecondStepClosedForm) {
  const AdamConfig cfg;
  std::vector<double> theta = {0.0};
  AdamState st;
  adam_update(theta, std::vector<double>{1.0}, st, cfg);
  adam_update(theta, std::vector<double>{0.5}, st, cfg);
  const double m = cfg.beta1 * (1 - cfg.beta1) * 1.0 + (1 - cfg.beta1) * 0.5;
  const double v = cfg.beta2 * (1 - cfg.beta2) * 1.0 + (1 - cfg.beta2) * 0.25;
  const double mh = m / (1 - cfg.beta1 * cfg.beta1);
  const double vh = v / (1 - cfg.beta2 * cfg.beta2);
  const double expect = -cfg.lr * 1.0 / (1.0 + cfg.eps) - cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
  EXPECT_NEAR(theta[0], expect, 1e-15);
}

TEST(Adam, StoreStepUsesGradients) {
  ParameterStore store;
  auto& w = store.add_filled("w", 1, 1, 1.0);
  Adam opt(store, AdamConfig{});
  ad::hadamard(w, w).backward();
  opt.step();
  EXPECT_NEAR(w.item(), 1.0 - 1e-3, 1e-10);
  EXPECT_THROW(store.add("w", 1, 1), std::invalid_argument);
}

TEST(GradCheck, LinearFunctionIsExact) {
  const Tensor x = Tensor::row({0.4, -1.1, 2.0}, true);
  const Tensor w = Tensor::row({1.5, -2.0, 0.25});
  const auto rep = grad_check([&](const std::vector<Tensor>& in) { return ad::sum_all(ad::hadamard(in[0], w)); }, {x});
  EXPECT_LT(rep.max_rel_error, 1e-9);
  EXPECT_EQ(rep.coordinates, 3u);
}

TEST(GradCheck, ReluAwayFromKink) {
  const double h = 1e-5;
  const Tensor x = Tensor::row({-0.5, 11 * h, -11 * h, 0.9}, true);
  const auto rep = grad_check([](const std::vector<Tensor>& in) { return ad::sum_all(ad::relu(in[0])); }, {x}, h);
  EXPECT_LT(rep.max_rel_error, 1e-6);
}

TEST(GradCheck, NonFiniteIsReported) {
  const Tensor x = Tensor::row({1000.0}, true);
  EXPECT_THROW(grad_check([](const std::vector<Tensor>& in) { return ad::sum_all(ad::exp(in[0])); }, {x}),
               std::runtime_error);
}

TEST(GradCheck, WholeSuiteBelowTolerance) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (const auto& c : run_gradcheck_suite(seed)) {
      EXPECT_LT(c.report.max_rel_error, 1e-4) << c.name << " seed " << seed;
      EXPECT_GT(c.report.coordinates, 0u) << c.name;
    }
  }
}
