#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "danae/nn/adam.hpp"
#include "danae/nn/autodiff.hpp"
#include "danae/nn/checkpoint.hpp"
#include "danae/nn/conv.hpp"
#include "nn_helpers.hpp"
#include "oracles.hpp"

using namespace danae;
using namespace danae::nn;

namespace {

ConvSpec simple_spec(std::size_t dilation, std::size_t padding, bool transposed = false) {
  ConvSpec s;
  s.dilation = dilation;
  s.padding = padding;
  s.transposed = transposed;
  return s;
}

std::vector<double> as_vector(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

}  // namespace

TEST(Tensor, ShapeAndGradSlot) {
  Tensor t(2, 3, 4, 1.5);
  EXPECT_EQ(t.size(), 24u);
  EXPECT_FALSE(t.has_grad());
  t.ensure_grad();
  EXPECT_EQ(t.grad().size(), t.size());
  t(1, 2, 3) = 9.0;
  EXPECT_EQ(t.values()[23], 9.0);
  EXPECT_THROW(Tensor::from(1, 2, 2, {1, 2, 3}), ShapeError);
}

TEST(Conv1d, IdentityKernel) {
  const auto y = conv1d(Tensor::row({1, 2, 3, 4}), Tensor::row({0, 1, 0}), Tensor::row({0}), simple_spec(1, 1));
  EXPECT_EQ(as_vector(y), (std::vector<double>{1, 2, 3, 4}));
}

TEST(Conv1d, BoxKernel) {
  const auto y = conv1d(Tensor::row({1, 1, 1, 1}), Tensor::row({1, 1, 1}), Tensor::row({0}), simple_spec(1, 1));
  EXPECT_EQ(as_vector(y), (std::vector<double>{2, 3, 3, 2}));
}

TEST(Conv1d, DilatedMatchesNaiveOracle) {
  const Tensor x = Tensor::row({1, 0, 0, 0, 1});
  const Tensor w = Tensor::row({1, 1, 1});
  const auto y = conv1d(x, w, Tensor::row({0}), simple_spec(2, 2));
  const auto want = oracle::naive_conv1d(testgen::to_signal(x), {{{1, 1, 1}}}, {0.0}, 2, 2);
  // y[p] = x[p-2] + x[p] + x[p+2]
  EXPECT_EQ(want[0][0], (std::vector<double>{1, 0, 2, 0, 1}));
  EXPECT_EQ(as_vector(y), want[0][0]);
}

TEST(Conv1d, BiasPerOutputChannel) {
  ConvSpec s = simple_spec(1, 1);
  s.out_channels = 2;
  Tensor w(2, 1, 3);
  const Tensor b = Tensor::row({0.5, -2.0});
  const auto y = conv1d(Tensor::row({1, 2, 3}), w, b, s);
  for (std::size_t l = 0; l < 3; ++l) {
    EXPECT_EQ(y(0, l), 0.5);
    EXPECT_EQ(y(1, l), -2.0);
  }
}

TEST(Conv1d, ShapeErrors) {
  EXPECT_THROW(conv1d(Tensor::row({1}), Tensor::row({1, 1, 1}), Tensor::row({0}), simple_spec(1, 0)), ShapeError);
  EXPECT_THROW(conv1d(Tensor(2, 4), Tensor::row({1, 1, 1}), Tensor::row({0}), simple_spec(1, 1)), ShapeError);
  EXPECT_THROW(conv1d(Tensor::row({1, 2}), Tensor::row({1, 1, 1}), Tensor::row({0}), simple_spec(1, 1, true)),
               ShapeError);
  ConvSpec even = simple_spec(1, 1);
  even.kernel_size = 2;
  EXPECT_THROW(even.validate(), ShapeError);
  ConvSpec strided = simple_spec(1, 1);
  strided.stride = 2;
  EXPECT_THROW(strided.validate(), ShapeError);
}

TEST(Conv1dTransposed, SingleSampleScatter) {
  const auto y = conv1d_transposed(Tensor::row({1}), Tensor::row({1, 1, 1}), Tensor::row({0}), simple_spec(1, 0, true));
  EXPECT_EQ(as_vector(y), (std::vector<double>{1, 1, 1}));
}

TEST(Conv1dTransposed, IdentityRoundTrip) {
  std::mt19937_64 rng(3);
  const Tensor x = testgen::random_tensor(rng, 2, 1, 9);
  const Tensor w = Tensor::row({0, 1, 0});
  const Tensor b = Tensor::row({0});
  const auto back = conv1d_transposed(conv1d(x, w, b, simple_spec(3, 3)), w, b, simple_spec(3, 3, true));
  ASSERT_TRUE(back.same_shape(x));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(back.values()[i], x.values()[i]);
}

TEST(Conv1dTransposed, ShapeError) {
  // 1 - 2*5 + 2 < 1
  EXPECT_THROW(
      conv1d_transposed(Tensor::row({1}), Tensor::row({1, 1, 1}), Tensor::row({0}), simple_spec(1, 5, true)),
      ShapeError);
}

TEST(ConvProperties, RandomShapesMatchOracleAndAdjoint) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testgen::conv_oracle_trial(rng);
    EXPECT_LT(g.forward, 1e-12) << "trial " << trial;
    EXPECT_LT(g.transposed, 1e-12) << "trial " << trial;
    EXPECT_LT(g.adjoint, 1e-10) << "trial " << trial;
  }
}

TEST(ConvProperties, DilatedPaddingPreservesLength) {
  for (std::size_t k : {1u, 3u, 5u, 7u})
    for (std::size_t d = 1; d <= 8; ++d)
      for (std::size_t len : {1u, 5u, 20u, 33u}) {
        ConvSpec s;
        s.kernel_size = k;
        s.dilation = d;
        s.padding = d * (k - 1) / 2;
        EXPECT_EQ(s.output_length(len), len);
        s.transposed = true;
        EXPECT_EQ(s.output_length(len), len);
      }
}

TEST(Activation, Definition) {
  EXPECT_EQ(as_vector(activation(Tensor::row({0, 0, 0}))), (std::vector<double>{0, 0, 0}));
  const auto y = activation(Tensor::row({1, -1}));
  EXPECT_EQ(y.values()[0], 1.0);
  EXPECT_DOUBLE_EQ(y.values()[1], -0.01);
}

TEST(Activation, Monotone) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> step(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Tensor a = testgen::random_tensor(rng, 1, 2, 8, 3.0);
    Tensor b = a;
    for (double& v : b.values()) v += step(rng);
    const auto ya = activation(a), yb = activation(b);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(ya.values()[i], yb.values()[i]);
  }
}

TEST(L2Loss, Examples) {
  const Tensor t = Tensor::row({0.3, -1.0, 2.0});
  EXPECT_EQ(l2_loss(t, t), 0.0);
  const Tensor shifted = Tensor::row({0.4, -0.9, 2.1});
  EXPECT_NEAR(l2_loss(shifted, t), 0.01, 1e-15);
  EXPECT_DOUBLE_EQ(l2_loss(Tensor::row({1, 2}), Tensor::row({0, 0})), 2.5);
  const auto g = l2_loss_grad(Tensor::row({1, 2}), Tensor::row({0, 0}));
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], 2.0);
  EXPECT_THROW(l2_loss(Tensor::row({1, 2}), Tensor::row({1})), ShapeError);
}


class LayerGradCheck : public ::testing::TestWithParam<testgen::OneLayerCase::Kind> {};

TEST_P(LayerGradCheck, MatchesCentralDifferences) {
  std::mt19937_64 rng(17 + static_cast<int>(GetParam()));
  const auto errors = testgen::layer_grad_errors(rng, GetParam(), 20);
  for (std::size_t probe = 0; probe < errors.size(); ++probe) EXPECT_LT(errors[probe], 1e-4) << "probe " << probe;
}

INSTANTIATE_TEST_SUITE_P(AllLayerKinds, LayerGradCheck,
                         ::testing::Values(testgen::OneLayerCase::Kind::conv, testgen::OneLayerCase::Kind::transposed,
                                           testgen::OneLayerCase::Kind::activation, testgen::OneLayerCase::Kind::add));

TEST(Backward, ZeroNetworkHasZeroGradients) {
  ConvSpec s;
  s.in_channels = 2;
  s.out_channels = 2;
  s.padding = 1;
  ConvLayer layer(s);
  std::mt19937_64 rng(1);
  Tape tape;
  const auto in = tape.leaf(testgen::random_tensor(rng, 1, 2, 6));
  const auto out = tape.conv(tape.activation(tape.conv(in, layer)), layer);
  const auto loss = tape.l2_loss(out, Tensor(1, 2, 6));
  layer.zero_grad();
  tape.backward(loss);
  for (double g : layer.weight.grad()) EXPECT_EQ(g, 0.0);
  for (double g : layer.bias.grad()) EXPECT_EQ(g, 0.0);
}

TEST(Backward, DuplicatedPathDoublesGradient) {
  ConvSpec s;
  s.padding = 1;
  std::mt19937_64 rng(2);
  ConvLayer layer(s);
  testgen::fill_uniform(layer.weight, rng);
  testgen::fill_uniform(layer.bias, rng);
  const Tensor x = testgen::random_tensor(rng, 1, 1, 5);

  // Seeding backward at the output gives d(sum y)/d(params), linear in y.
  Tape single;
  const auto y1 = single.conv(single.leaf(x), layer);
  layer.zero_grad();
  single.backward(y1);
  const std::vector<double> gw1(layer.weight.grad().begin(), layer.weight.grad().end());
  const double gb1 = layer.bias.grad()[0];

  Tape twice;
  const auto in = twice.leaf(x);
  const auto y2 = twice.add(twice.conv(in, layer), twice.conv(in, layer));
  layer.zero_grad();
  twice.backward(y2);
  for (std::size_t i = 0; i < gw1.size(); ++i) EXPECT_DOUBLE_EQ(layer.weight.grad()[i], 2.0 * gw1[i]);
  EXPECT_DOUBLE_EQ(layer.bias.grad()[0], 2.0 * gb1);
}

TEST(Backward, StateErrors) {
  Tape empty;
  EXPECT_THROW(empty.backward(0), StateError);
  Tape tape;
  const auto in = tape.leaf(Tensor::row({1, 2}));
  EXPECT_THROW(tape.grad(in), StateError);
  EXPECT_THROW(tape.backward(5), StateError);
  Tape eval(false);
  const auto x = eval.leaf(Tensor::row({1}));
  EXPECT_THROW(eval.backward(x), StateError);
}

TEST(Adam, ZeroGradientLeavesParamsUnchanged) {
  Tensor p = Tensor::row({0.5, -1.0, 3.0});
  p.zero_grad();
  AdamState st;
  std::vector<Tensor*> params{&p};
  adam_step(params, st);
  EXPECT_EQ(as_vector(p), (std::vector<double>{0.5, -1.0, 3.0}));
  EXPECT_EQ(st.step_count, 1u);
}

TEST(Adam, FirstStepHandEvaluation) {
  Tensor p = Tensor::row({0.0});
  p.ensure_grad();
  p.grad()[0] = 1.0;
  AdamState st;
  std::vector<Tensor*> params{&p};
  adam_step(params, st);
  // m_hat = 1, v_hat = 1 after bias correction.
  EXPECT_NEAR(p.values()[0], -0.002 / (1.0 + 1e-8), 1e-18);
  EXPECT_GE(st.v[0][0], 0.0);
}

TEST(Adam, FirstStepIsScaleFree) {
  auto first_step = [](double g) {
    Tensor p = Tensor::row({0.0});
    p.ensure_grad();
    p.grad()[0] = g;
    AdamState st;
    std::vector<Tensor*> params{&p};
    adam_step(params, st);
    return p.values()[0];
  };
  EXPECT_NEAR(std::abs(first_step(10.0)), std::abs(first_step(0.1)), 1e-6);
}

TEST(Adam, StepCountAndMomentShapes) {
  Tensor a(2, 3), b = Tensor::row({1});
  a.zero_grad();
  b.zero_grad();
  std::mt19937_64 rng(4);
  AdamState st;
  std::vector<Tensor*> params{&a, &b};
  for (int i = 0; i < 5; ++i) {
    testgen::fill_uniform(a, rng);
    std::copy(a.values().begin(), a.values().end(), a.grad().begin());
    adam_step(params, st);
    EXPECT_EQ(st.step_count, static_cast<std::size_t>(i + 1));
  }
  ASSERT_EQ(st.m.size(), 2u);
  EXPECT_EQ(st.m[0].size(), a.size());
  EXPECT_EQ(st.v[1].size(), b.size());
  for (const auto& v : st.v)
    for (double x : v) EXPECT_GE(x, 0.0);
}

TEST(Determinism, ForwardIsBitwiseRepeatable) {
  std::mt19937_64 rng(8);
  ConvSpec s;
  s.in_channels = 3;
  s.out_channels = 4;
  s.dilation = 3;
  s.padding = 3;
  ConvLayer layer(s);
  testgen::fill_uniform(layer.weight, rng);
  const Tensor x = testgen::random_tensor(rng, 4, 3, 20);
  const auto a = conv1d(x, layer.weight, layer.bias, s);
  const auto b = conv1d(x, layer.weight, layer.bias, s);
  EXPECT_EQ(as_vector(a), as_vector(b));
}

TEST(Checkpoint, RoundTripIsExact) {
  std::mt19937_64 rng(9);
  Checkpoint ck;
  ck.window_length = 20;
  for (bool transposed : {false, true}) {
    ConvSpec s;
    s.in_channels = 2;
    s.out_channels = 3;
    s.dilation = 4;
    s.padding = 4;
    s.transposed = transposed;
    ConvLayer l(s);
    testgen::fill_uniform(l.weight, rng);
    testgen::fill_uniform(l.bias, rng);
    ck.layers.push_back({transposed ? "t" : "c", l});
  }
  const auto path = (std::filesystem::temp_directory_path() / "danae_ckpt_roundtrip.bin").string();
  save_checkpoint(path, ck);
  const auto back = load_checkpoint(path);
  ASSERT_EQ(back.layers.size(), 2u);
  EXPECT_EQ(back.window_length, 20u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.layers[i].name, ck.layers[i].name);
    EXPECT_EQ(back.layers[i].layer.spec.transposed, ck.layers[i].layer.spec.transposed);
    EXPECT_EQ(back.layers[i].layer.spec.dilation, 4u);
    EXPECT_EQ(as_vector(back.layers[i].layer.weight), as_vector(ck.layers[i].layer.weight));
    EXPECT_EQ(as_vector(back.layers[i].layer.bias), as_vector(ck.layers[i].layer.bias));
  }
  std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsBadMagicAndTruncation) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto bad = (dir / "danae_ckpt_bad.bin").string();
  std::ofstream(bad, std::ios::binary) << "NOTACKPT\x01\x00\x00\x00";
  EXPECT_THROW(load_checkpoint(bad), ParseError);

  Checkpoint ck;
  ck.window_length = 20;
  ck.layers.push_back({"c", ConvLayer(ConvSpec{})});
  const auto good = (dir / "danae_ckpt_trunc.bin").string();
  save_checkpoint(good, ck);
  std::filesystem::resize_file(good, std::filesystem::file_size(good) - 4);
  EXPECT_THROW(load_checkpoint(good), ParseError);
  EXPECT_THROW(load_checkpoint((dir / "danae_no_such_file.bin").string()), IoError);
  std::filesystem::remove(bad);
  std::filesystem::remove(good);
}
