//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "s2g/tensor.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "s2g/checkpoint.hpp"
#include "s2g/rng.hpp"

namespace s2g {
namespace {

constexpr double kTight = 1e-12;
constexpr double kGradTol = 1e-4;

Tensor uniform_pm2(Rng &rng, std::vector<std::size_t> shape) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i)
    t.at(i) = rng.uniform() * 4.0 - 2.0;
  return t;
}

TEST(Tensor, ShapeAndData) {
  Tensor t({2, 3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  t.at(1, 2) = 7.0;
  EXPECT_DOUBLE_EQ(t.at(5), 7.0);
  EXPECT_THROW(Tensor({2, 2}, {1.0, 2.0, 3.0}), DimensionError);
}

TEST(Linear, IdentityWeightZeroBias) {
  Tape tape;
  Var x = tape.leaf(Tensor({2, 2}, {1.0, 2.0, 3.0, 4.0}));
  Var w = tape.leaf(Tensor({2, 2}, {1.0, 0.0, 0.0, 1.0}));
  Var b = tape.leaf(Tensor({2}, {0.0, 0.0}));
  const Tensor &out = tape.value(tape.linear(x, w, b));
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_DOUBLE_EQ(out.at(i), tape.value(x).at(i));
}

TEST(Linear, HandSum) {
  Tape tape;
  Var x = tape.leaf(Tensor({1, 2}, {1.0, 2.0}));
  Var w = tape.leaf(Tensor({2, 1}, {1.0, 1.0}));
  Var b = tape.leaf(Tensor({1}, {0.0}));
  EXPECT_DOUBLE_EQ(tape.value(tape.linear(x, w, b)).at(0), 3.0);
}

TEST(Linear, MatchesTripleLoopReference) {
  Rng rng(11);
  Tensor a = uniform_pm2(rng, {3, 4});
  Tensor b = uniform_pm2(rng, {4, 2});
  Tensor bias = uniform_pm2(rng, {2});
  Tape tape;
  const Tensor &out = tape.value(
      tape.linear(tape.leaf(a), tape.leaf(b), tape.leaf(bias)));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      double acc = bias.at(j);
      for (std::size_t k = 0; k < 4; ++k) acc += a.at(i, k) * b.at(k, j);
      EXPECT_NEAR(out.at(i, j), acc, kTight);
    }
  }
}

TEST(Linear, ShapeMismatchThrows) {
  Tape tape;
  Var x = tape.leaf(Tensor({1, 3}));
  Var w = tape.leaf(Tensor({2, 1}));
  Var b = tape.leaf(Tensor({1}));
  EXPECT_THROW(tape.linear(x, w, b), DimensionError);
}

TEST(Silu, PinnedValues) {
  Tape tape;
  Var x = tape.leaf(Tensor({3}, {0.0, 1.0, 40.0}));
  const Tensor &out = tape.value(tape.silu(x));
  EXPECT_DOUBLE_EQ(out.at(0), 0.0);
  EXPECT_NEAR(out.at(1), 0.73105857863000490, kTight);
  EXPECT_NEAR(out.at(2), 40.0, 1e-9);
}

TEST(Softmax, ConstantRowIsUniform) {
  Tape tape;
  Var x = tape.leaf(Tensor({1, 4}, {0.3, 0.3, 0.3, 0.3}));
  const Tensor &out = tape.value(tape.softmax_rows(x));
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(out.at(0, j), 0.25, kTight);
}

TEST(Softmax, PinnedTwoEntryRow) {
  Tape tape;
  Var x = tape.leaf(Tensor({1, 2}, {0.0, std::log(3.0)}));
  const Tensor &out = tape.value(tape.softmax_rows(x));
  EXPECT_NEAR(out.at(0, 0), 0.25, kTight);
  EXPECT_NEAR(out.at(0, 1), 0.75, kTight);
}

TEST(Softmax, ShiftInvarianceAndRowSums) {
  Rng rng(5);
  Tensor x = uniform_pm2(rng, {6, 8});
  Tensor shifted = x;
  for (std::size_t i = 0; i < shifted.rows(); ++i)
    for (std::size_t j = 0; j < shifted.cols(); ++j)
      shifted.at(i, j) += 123.456;
  Tape tape;
  const Tensor &a = tape.value(tape.softmax_rows(tape.leaf(x)));
  const Tensor &b = tape.value(tape.softmax_rows(tape.leaf(shifted)));
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_NEAR(a.at(i), b.at(i), kTight);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a.at(i, j);
    EXPECT_NEAR(s, 1.0, kTight);
  }
}

AttentionWeights make_attention_weights(Tape &tape, Rng &rng, std::size_t d_q,
                                        std::size_t d_s) {
  AttentionWeights w;
  w.wq = tape.leaf(uniform_pm2(rng, {d_q, d_q}));
  w.bq = tape.leaf(uniform_pm2(rng, {d_q}));
  w.wk = tape.leaf(uniform_pm2(rng, {d_s, d_q}));
  w.bk = tape.leaf(uniform_pm2(rng, {d_q}));
  w.wv = tape.leaf(uniform_pm2(rng, {d_s, d_q}));
  w.bv = tape.leaf(uniform_pm2(rng, {d_q}));
  w.wo = tape.leaf(uniform_pm2(rng, {d_q, d_q}));
  w.bo = tape.leaf(uniform_pm2(rng, {d_q}));
  return w;
}

TEST(Attention, EqualKeysAverageValues) {
  Rng rng(7);
  Tape tape;
  const std::size_t d_q = 4, d_s = 3, c = 5;
  AttentionWeights w = make_attention_weights(tape, rng, d_q, d_s);
  // Identical context rows make every attention row uniform, so the output
  // must match attending over the single distinct row replicated c times.
  Tensor ctx_row = uniform_pm2(rng, {1, d_s});
  Tensor ctx({c, d_s});
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = 0; j < d_s; ++j) ctx.at(i, j) = ctx_row.at(0, j);
  Tensor query = uniform_pm2(rng, {2, d_q});
  AttentionOutput full =
      multi_head_attention(tape, tape.leaf(query), tape.leaf(ctx), w, 2);
  AttentionOutput single =
      multi_head_attention(tape, tape.leaf(query), tape.leaf(ctx_row), w, 2);
  const Tensor &af = tape.value(full.out);
  const Tensor &as = tape.value(single.out);
  ASSERT_TRUE(af.same_shape(as));
  for (std::size_t i = 0; i < af.size(); ++i)
    EXPECT_NEAR(af.at(i), as.at(i), 1e-10);
  for (Var head : full.head_weights) {
    const Tensor &attn = tape.value(head);
    for (std::size_t i = 0; i < attn.size(); ++i)
      EXPECT_NEAR(attn.at(i), 1.0 / static_cast<double>(c), kTight);
  }
}

TEST(Attention, TwoHeadMatchesBruteForce) {
  Rng rng(13);
  Tape tape;
  const std::size_t d_q = 6, d_s = 4, q = 3, c = 5, heads = 2;
  const std::size_t d_head = d_q / heads;
  AttentionWeights w = make_attention_weights(tape, rng, d_q, d_s);
  Tensor query = uniform_pm2(rng, {q, d_q});
  Tensor ctx = uniform_pm2(rng, {c, d_s});
  AttentionOutput got =
      multi_head_attention(tape, tape.leaf(query), tape.leaf(ctx), w, heads);

  // Unbatched reference: explicit projection, per-head softmax, concat,
  // output projection. No shared code with the tape ops.
  auto project = [&](const Tensor &x, Var wv_, Var bv_) {
    const Tensor &wm = tape.value(wv_);
    const Tensor &bm = tape.value(bv_);
    Tensor out({x.rows(), wm.cols()});
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t j = 0; j < wm.cols(); ++j) {
        double acc = bm.at(j);
        for (std::size_t k = 0; k < x.cols(); ++k)
          acc += x.at(i, k) * wm.at(k, j);
        out.at(i, j) = acc;
      }
    return out;
  };
  Tensor qp = project(query, w.wq, w.bq);
  Tensor kp = project(ctx, w.wk, w.bk);
  Tensor vp = project(ctx, w.wv, w.bv);
  Tensor merged({q, d_q});
  for (std::size_t h = 0; h < heads; ++h) {
    for (std::size_t i = 0; i < q; ++i) {
      std::vector<double> scores(c);
      double mx = -1e300;
      for (std::size_t jj = 0; jj < c; ++jj) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d_head; ++k)
          acc += qp.at(i, h * d_head + k) * kp.at(jj, h * d_head + k);
        scores[jj] = acc / std::sqrt(static_cast<double>(d_head));
        mx = std::max(mx, scores[jj]);
      }
      double z = 0.0;
      for (double &s : scores) {
        s = std::exp(s - mx);
        z += s;
      }
      for (std::size_t k = 0; k < d_head; ++k) {
        double acc = 0.0;
        for (std::size_t jj = 0; jj < c; ++jj)
          acc += (scores[jj] / z) * vp.at(jj, h * d_head + k);
        merged.at(i, h * d_head + k) = acc;
      }
    }
  }
  Tensor expect = project(merged, w.wo, w.bo);
  const Tensor &out = tape.value(got.out);
  ASSERT_TRUE(out.same_shape(expect));
  for (std::size_t i = 0; i < out.size(); ++i)
    EXPECT_NEAR(out.at(i), expect.at(i), 1e-10);
  ASSERT_EQ(got.head_weights.size(), heads);
}

TEST(Attention, IdenticalQueryRowsGiveIdenticalOutputs) {
  Rng rng(17);
  Tape tape;
  AttentionWeights w = make_attention_weights(tape, rng, 4, 3);
  Tensor qrow = uniform_pm2(rng, {1, 4});
  Tensor query({3, 4});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) query.at(i, j) = qrow.at(0, j);
  Tensor ctx = uniform_pm2(rng, {6, 3});
  AttentionOutput out =
      multi_head_attention(tape, tape.leaf(query), tape.leaf(ctx), w, 2);
  const Tensor &o = tape.value(out.out);
  for (std::size_t i = 1; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      EXPECT_NEAR(o.at(i, j), o.at(0, j), kTight);
}

TEST(Backward, QuadraticLoss) {
  Tape tape;
  Var x = tape.leaf(Tensor({4}, {1.0, -2.0, 3.0, 0.5}), true);
  tape.backward(tape.sum(tape.square(x)));
  Tensor g = tape.grad(x);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_DOUBLE_EQ(g.at(i), 2.0 * tape.value(x).at(i));
}

TEST(Backward, UnreachedParameterGetsZero) {
  Tape tape;
  Var x = tape.leaf(Tensor({2}, {1.0, 2.0}), true);
  Var p = tape.leaf(Tensor({3}, {5.0, 6.0, 7.0}), true);
  tape.backward(tape.sum(tape.square(x)));
  Tensor gp = tape.grad(p);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(gp.at(i), 0.0);
}

TEST(Backward, NonScalarLossThrows) {
  Tape tape;
  Var x = tape.leaf(Tensor({2}, {1.0, 2.0}), true);
  EXPECT_THROW(tape.backward(tape.square(x)), DimensionError);
}

TEST(GradCheck, LinearFunctionIsExact) {
  auto f = [](Tape &t, const std::vector<Var> &v) {
    return t.sum(t.scale(v[0], 3.0));
  };
  Rng rng(23);
  GradCheckReport r = grad_check(f, {uniform_pm2(rng, {3, 3})});
  EXPECT_LT(r.max_rel_err, 1e-9);
}

TEST(GradCheck, EveryPrimitiveOp) {
  Rng rng(29);
  struct Case {
    const char *name;
    std::function<Var(Tape &, const std::vector<Var> &)> f;
    std::vector<Tensor> point;
  };
  // Each case reduces to a scalar through a fixed random weighting so that
  // every output coordinate influences the loss.
  Tensor wsum = uniform_pm2(rng, {4, 3});
  auto weighted = [wsum](Tape &t, Var x) {
    return t.sum(t.mul(x, t.leaf(wsum)));
  };
  std::vector<Case> cases;
  cases.push_back({"add",
                   [weighted](Tape &t, const std::vector<Var> &v) {
                     return weighted(t, t.add(v[0], v[1]));
                   },
                   {uniform_pm2(rng, {4, 3}), uniform_pm2(rng, {4, 3})}});
  cases.push_back({"sub_mul",
                   [weighted](Tape &t, const std::vector<Var> &v) {
                     return weighted(t, t.mul(t.sub(v[0], v[1]), v[1]));
                   },
                   {uniform_pm2(rng, {4, 3}), uniform_pm2(rng, {4, 3})}});
  cases.push_back({"silu",
                   [weighted](Tape &t, const std::vector<Var> &v) {
                     return weighted(t, t.silu(v[0]));
                   },
                   {uniform_pm2(rng, {4, 3})}});
  cases.push_back({"sigmoid_softplus",
                   [weighted](Tape &t, const std::vector<Var> &v) {
                     return weighted(t, t.sigmoid(t.softplus(v[0])));
                   },
                   {uniform_pm2(rng, {4, 3})}});
  cases.push_back({"sqrt_shift_square",
                   [weighted](Tape &t, const std::vector<Var> &v) {
                     return weighted(t, t.sqrt_shift(t.square(v[0]), 0.1));
                   },
                   {uniform_pm2(rng, {4, 3})}});
  cases.push_back({"reciprocal",
                   [weighted](Tape &t, const std::vector<Var> &v) {
                     return weighted(
                         t, t.reciprocal(t.add_scalar(t.square(v[0]), 1.0)));
                   },
                   {uniform_pm2(rng, {4, 3})}});
  cases.push_back({"softmax",
                   [weighted](Tape &t, const std::vector<Var> &v) {
                     return weighted(t, t.softmax_rows(v[0]));
                   },
                   {uniform_pm2(rng, {4, 3})}});
  cases.push_back({"matmul_transpose",
                   [weighted](Tape &t, const std::vector<Var> &v) {
                     return weighted(t, t.matmul(v[0], t.transpose(v[1])));
                   },
                   {uniform_pm2(rng, {4, 5}), uniform_pm2(rng, {3, 5})}});
  cases.push_back({"linear",
                   [weighted](Tape &t, const std::vector<Var> &v) {
                     return weighted(t, t.linear(v[0], v[1], v[2]));
                   },
                   {uniform_pm2(rng, {4, 5}), uniform_pm2(rng, {5, 3}),
                    uniform_pm2(rng, {3})}});
  cases.push_back({"layer_norm",
                   [weighted](Tape &t, const std::vector<Var> &v) {
                     return weighted(t, t.layer_norm_rows(v[0], v[1], v[2]));
                   },
                   {uniform_pm2(rng, {4, 3}), uniform_pm2(rng, {3}),
                    uniform_pm2(rng, {3})}});
  cases.push_back({"row_sum_scale_rows",
                   [weighted](Tape &t, const std::vector<Var> &v) {
                     return weighted(t, t.scale_rows(v[0], t.row_sum(v[1])));
                   },
                   {uniform_pm2(rng, {4, 3}), uniform_pm2(rng, {4, 2})}});
  cases.push_back(
      {"concat_slice",
       [weighted](Tape &t, const std::vector<Var> &v) {
         Var cat = t.concat_cols({v[0], v[1]});
         return weighted(t, t.slice_cols(cat, 1, 4));
       },
       {uniform_pm2(rng, {4, 2}), uniform_pm2(rng, {4, 3})}});
  cases.push_back(
      {"concat_rows_slice_rows",
       [weighted](Tape &t, const std::vector<Var> &v) {
         Var cat = t.concat_rows({v[0], v[1]});
         return weighted(t, t.slice_rows(cat, 1, 5));
       },
       {uniform_pm2(rng, {2, 3}), uniform_pm2(rng, {4, 3})}});
  cases.push_back(
      {"gather_segment",
       [weighted](Tape &t, const std::vector<Var> &v) {
         Var g = t.gather_rows(v[0], {0, 2, 2, 1});
         return weighted(t, t.segment_sum(g, {0, 1, 2, 2}, 4));
       },
       {uniform_pm2(rng, {3, 3})}});
  cases.push_back({"zero_com",
                   [weighted](Tape &t, const std::vector<Var> &v) {
                     return weighted(t, t.zero_com_rows(v[0]));
                   },
                   {uniform_pm2(rng, {4, 3})}});
  cases.push_back({"add_scalar_scale",
                   [weighted](Tape &t, const std::vector<Var> &v) {
                     return weighted(t, t.scale(t.add_scalar(v[0], 0.7), -1.3));
                   },
                   {uniform_pm2(rng, {4, 3})}});
  for (auto &c : cases) {
    GradCheckReport r = grad_check(c.f, c.point);
    EXPECT_LT(r.max_rel_err, kGradTol) << c.name;
    EXPECT_GT(r.coords_checked, 0u) << c.name;
  }
}

TEST(GradCheck, TwoLayerMlp) {
  Rng rng(31);
  auto f = [](Tape &t, const std::vector<Var> &v) {
    Var h = t.silu(t.linear(v[0], v[1], v[2]));
    Var o = t.linear(h, v[3], v[4]);
    return t.sum(t.square(o));
  };
  GradCheckReport r = grad_check(
      f, {uniform_pm2(rng, {3, 4}), uniform_pm2(rng, {4, 8}),
          uniform_pm2(rng, {8}), uniform_pm2(rng, {8, 2}),
          uniform_pm2(rng, {2})});
  EXPECT_LT(r.max_rel_err, kGradTol);
}

TEST(GradCheck, MultiHeadAttention) {
  Rng rng(37);
  auto f = [](Tape &t, const std::vector<Var> &v) {
    AttentionWeights w{v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]};
    AttentionOutput out = multi_head_attention(t, v[0], v[1], w, 2);
    return t.sum(t.square(out.out));
  };
  GradCheckReport r = grad_check(
      f, {uniform_pm2(rng, {2, 4}), uniform_pm2(rng, {3, 3}),
          uniform_pm2(rng, {4, 4}), uniform_pm2(rng, {4}),
          uniform_pm2(rng, {3, 4}), uniform_pm2(rng, {4}),
          uniform_pm2(rng, {3, 4}), uniform_pm2(rng, {4}),
          uniform_pm2(rng, {4, 4}), uniform_pm2(rng, {4})});
  EXPECT_LT(r.max_rel_err, kGradTol);
}

TEST(GradCheck, NonFiniteEvaluationThrows) {
  auto f = [](Tape &t, const std::vector<Var> &v) {
    return t.sum(t.sqrt_shift(v[0], -1.0));
  };
  EXPECT_THROW(grad_check(f, {Tensor({1}, {0.5})}), Error);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Rng rng(41);
  Checkpoint ckpt;
  ckpt.tensors.emplace("layer0.weight", Tensor::randn(rng, {7, 5}));
  ckpt.tensors.emplace("layer0.bias", Tensor::randn(rng, {5}));
  Tensor odd({4}, {1e-300, -0.0, 3.141592653589793, -1e308});
  ckpt.tensors.emplace("odd", odd);
  ckpt.meta_json = R"({"stage":"test","steps":42})";

  const std::string path =
      (std::filesystem::temp_directory_path() / "s2g_ckpt_test.bin").string();
  save_checkpoint(path, ckpt);
  Checkpoint back = load_checkpoint(path);
  ASSERT_EQ(back.tensors.size(), ckpt.tensors.size());
  for (const auto &[name, t] : ckpt.tensors) {
    const Tensor &r = back.tensors.at(name);
    ASSERT_TRUE(r.same_shape(t)) << name;
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(r.at(i)),
                std::bit_cast<std::uint64_t>(t.at(i)))
          << name << "[" << i << "]";
    }
  }
  EXPECT_NE(back.meta_json.find("\"steps\":42"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Checkpoint, BadMagicRejected) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "s2g_ckpt_bad.bin").string();
  {
    std::FILE *f = std::fopen(path.c_str(), "wb");
    ASSERT_NE(f, nullptr);
    std::fputs("NOTASTATE________", f);
    std::fclose(f);
  }
  EXPECT_THROW(load_checkpoint(path), Error);
  std::filesystem::remove(path);
}

TEST(Rng, DeterministicStreams) {
  Rng a(123), b(123), c(124);
  bool saw_difference = false;
  for (int i = 0; i < 100; ++i) {
    const double va = a.normal();
    EXPECT_DOUBLE_EQ(va, b.normal());
    if (va != c.normal()) saw_difference = true;
  }
  EXPECT_TRUE(saw_difference);
}

}  // namespace
}  // namespace s2g
