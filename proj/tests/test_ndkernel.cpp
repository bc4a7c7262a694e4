#include "support.hpp"

#include "equiloc/error.hpp"
#include "equiloc/ndkernel/activation.hpp"
#include "equiloc/ndkernel/adam.hpp"
#include "equiloc/ndkernel/batchnorm.hpp"
#include "equiloc/ndkernel/conv.hpp"
#include "equiloc/ndkernel/init.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace equiloc;
using namespace equiloc::testing;
using nd::Shape4;
using nd::Tensor4;

namespace {

Tensor4 row(std::vector<double> v) {
    const std::size_t w = v.size();
    return Tensor4({1, 1, 1, w}, std::move(v));
}

}  // namespace

TEST(Tensor, RejectsZeroDimensionAndWrongValueCount) {
    EXPECT_THROW(Tensor4({1, 0, 2, 2}), ShapeError);
    EXPECT_THROW(Tensor4({1, 1, 2, 2}, std::vector<double>(3)), ShapeError);
}

TEST(Tensor, RequireSameShapeNamesDimension) {
    try {
        nd::require_same_shape({1, 2, 3, 4}, {1, 2, 5, 4}, "test");
        FAIL();
    } catch (const ShapeError& e) {
        EXPECT_EQ(e.dimension(), "height");
        EXPECT_EQ(e.expected(), 3u);
        EXPECT_EQ(e.actual(), 5u);
    }
}

TEST(Tensor, ShiftMovesAndZeroFills) {
    Tensor4 t({1, 1, 3, 3});
    t.at(0, 0, 0, 0) = 7;
    const Tensor4 s = nd::shift(t, 1, 2);
    EXPECT_EQ(s.at(0, 0, 1, 2), 7);
    EXPECT_EQ(s.at(0, 0, 0, 0), 0);
    EXPECT_EQ(nd::shift(s, -1, -2), t);
}

TEST(Conv, BoxFilterExample) {
    const Tensor4 out = nd::conv2d(row({0, 0, 1, 0, 0}), row({1, 1, 1}), {0.0});
    EXPECT_EQ(out, row({0, 1, 1, 1, 0}));
}

TEST(Conv, CentredIdentityExample) {
    EXPECT_EQ(nd::conv2d(row({1, 2, 3}), row({0, 1, 0}), {0.0}), row({1, 2, 3}));
}

TEST(Conv, MatchesNaiveReferenceAcrossShapes) {
    // Odd channel counts and widths exercise the remainder paths of the blocked kernels.
    struct Case { std::size_t n, cin, cout, h, w, k; };
    const Case cases[] = {{1, 1, 1, 5, 5, 1},  {2, 3, 5, 7, 9, 3},   {1, 2, 7, 11, 13, 5}, {2, 5, 3, 9, 17, 7},
                          {1, 4, 9, 6, 23, 3}, {1, 3, 2, 13, 10, 9}, {3, 1, 4, 8, 8, 5},   {1, 6, 6, 5, 31, 7}};
    std::uint64_t seed = 1;
    for (const Case& c : cases) {
        const Tensor4 in = random_tensor({c.n, c.cin, c.h, c.w}, seed++);
        const Tensor4 w = random_tensor({c.cout, c.cin, c.k, c.k}, seed++);
        const auto b = random_vector(c.cout, seed++);
        EXPECT_LT(nd::max_abs_diff(nd::conv2d(in, w, b), naive_conv(in, w, b)), 1e-12)
            << "k=" << c.k << " cin=" << c.cin << " cout=" << c.cout << " w=" << c.w;
    }
}

TEST(Conv, ShapeErrorsNameTheDimension) {
    const Tensor4 in({1, 2, 5, 5});
    try {
        nd::conv2d(in, Tensor4({1, 3, 3, 3}), {0.0});
        FAIL();
    } catch (const ShapeError& e) {
        EXPECT_EQ(e.dimension(), "channel");
    }
    EXPECT_THROW(nd::conv2d(in, Tensor4({1, 2, 2, 3}), {0.0}), ShapeError);
    EXPECT_THROW(nd::conv2d(in, Tensor4({2, 2, 3, 3}), {0.0}), ShapeError);  // bias length
    nd::ConvLayerSpec spec{2, 1, 5};
    try {
        nd::conv2d(in, Tensor4({1, 2, 3, 3}), {0.0}, spec);
        FAIL();
    } catch (const ShapeError& e) {
        EXPECT_EQ(e.dimension(), "kernel height");
    }
}

TEST(Conv, SpecRejectsUnsupportedKernels) {
    EXPECT_THROW((nd::ConvLayerSpec{1, 1, 4}.validate()), DomainError);
    EXPECT_THROW((nd::ConvLayerSpec{1, 1, 9}.validate()), DomainError);
    EXPECT_THROW((nd::ConvLayerSpec{0, 1, 3}.validate()), DomainError);
    EXPECT_NO_THROW((nd::ConvLayerSpec{1, 1, 7}.validate()));
}

TEST(Conv, BackwardMatchesFiniteDifferences) {
    struct Case { std::size_t n, cin, cout, h, w, k; };
    const Case cases[] = {{2, 2, 3, 5, 6, 3}, {1, 3, 4, 6, 5, 5}, {1, 2, 5, 7, 9, 7}, {2, 1, 1, 4, 4, 1}};
    std::uint64_t seed = 100;
    for (const Case& c : cases) {
        Tensor4 in = random_tensor({c.n, c.cin, c.h, c.w}, seed++);
        Tensor4 w = random_tensor({c.cout, c.cin, c.k, c.k}, seed++);
        std::vector<double> b = random_vector(c.cout, seed++);
        const Tensor4 r = random_tensor({c.n, c.cout, c.h, c.w}, seed++);
        const auto loss = [&] { return dot(nd::conv2d(in, w, b).values(), r.values()); };
        const nd::ConvGrads g = nd::conv2d_backward(in, w, r);

        EXPECT_LT(finite_difference_check(in.values(), g.input.values(), loss).worst, 1e-3);
        EXPECT_LT(finite_difference_check(w.values(), g.weights.values(), loss).worst, 1e-3);
        EXPECT_LT(finite_difference_check(b, g.bias, loss).worst, 1e-3);
    }
}

TEST(Conv, BackwardWithoutInputGradLeavesPlaceholder) {
    const Tensor4 in = random_tensor({1, 2, 5, 5}, 7);
    const Tensor4 w = random_tensor({3, 2, 3, 3}, 8);
    const nd::ConvGrads full = nd::conv2d_backward(in, w, random_tensor({1, 3, 5, 5}, 9));
    const nd::ConvGrads part = nd::conv2d_backward(in, w, random_tensor({1, 3, 5, 5}, 9), false);
    EXPECT_EQ(part.input.shape(), (Shape4{1, 1, 1, 1}));
    EXPECT_EQ(part.weights, full.weights);
    EXPECT_EQ(part.bias, full.bias);
}

TEST(Conv, Deterministic) {
    const Tensor4 in = random_tensor({2, 3, 12, 12}, 11);
    const Tensor4 w = random_tensor({4, 3, 5, 5}, 12);
    const auto b = random_vector(4, 13);
    EXPECT_EQ(nd::conv2d(in, w, b), nd::conv2d(in, w, b));
}

TEST(BatchNorm, TwoPointNormalization) {
    auto p = nd::BatchNormParams::identity(1);
    const Tensor4 out = nd::batchnorm(Tensor4({2, 1, 1, 1}, {1.0, 3.0}), p, nd::Mode::Train);
    EXPECT_NEAR(out.values()[0], -1.0, 1e-5);
    EXPECT_NEAR(out.values()[1], 1.0, 1e-5);

    p.gamma = {2.0};
    p.beta = {1.0};
    const Tensor4 aff = nd::batchnorm(Tensor4({2, 1, 1, 1}, {1.0, 3.0}), p, nd::Mode::Train);
    EXPECT_NEAR(aff.values()[0], -1.0, 1e-5);
    EXPECT_NEAR(aff.values()[1], 3.0, 1e-5);
}

TEST(BatchNorm, RunningStatisticsUseMomentumAndUnbiasedVariance) {
    auto p = nd::BatchNormParams::identity(1);
    nd::batchnorm(Tensor4({2, 1, 1, 1}, {1.0, 3.0}), p, nd::Mode::Train);
    EXPECT_DOUBLE_EQ(p.running_mean[0], 0.1 * 2.0);
    EXPECT_DOUBLE_EQ(p.running_var[0], 0.9 * 1.0 + 0.1 * 2.0);  // unbiased variance of {1, 3} is 2
}

TEST(BatchNorm, SingleValuePerChannelRejectedInTrainMode) {
    auto p = nd::BatchNormParams::identity(2);
    EXPECT_THROW(nd::batchnorm(Tensor4({1, 2, 1, 1}), p, nd::Mode::Train), DomainError);
    EXPECT_NO_THROW(nd::batchnorm(Tensor4({1, 2, 1, 1}), p, nd::Mode::Eval));
}

TEST(BatchNorm, TrainBackwardMatchesFiniteDifferences) {
    Tensor4 x = random_tensor({3, 2, 4, 3}, 21, -2.0, 2.0);
    auto p = nd::BatchNormParams::identity(2);
    p.gamma = {1.5, -0.7};
    p.beta = {0.3, 0.2};
    const Tensor4 r = random_tensor(x.shape(), 22);
    const auto loss = [&] {
        auto q = p;
        return dot(nd::batchnorm(x, q, nd::Mode::Train).values(), r.values());
    };
    nd::BatchNormCache cache;
    auto q = p;
    nd::batchnorm(x, q, nd::Mode::Train, &cache);
    const nd::BatchNormGrads g = nd::batchnorm_backward(r, p, cache);

    EXPECT_LT(finite_difference_check(x.values(), g.input.values(), loss).worst, 1e-3);
    EXPECT_LT(finite_difference_check(p.gamma, g.gamma, loss).worst, 1e-3);
    EXPECT_LT(finite_difference_check(p.beta, g.beta, loss).worst, 1e-3);
}

TEST(BatchNorm, EvalBackwardMatchesFiniteDifferences) {
    Tensor4 x = random_tensor({2, 3, 3, 3}, 31);
    auto p = nd::BatchNormParams::identity(3);
    p.gamma = {0.5, 2.0, -1.0};
    p.beta = {0.1, -0.2, 0.0};
    p.running_mean = {0.3, -0.1, 0.2};
    p.running_var = {0.5, 2.0, 1.2};
    const Tensor4 r = random_tensor(x.shape(), 32);
    const auto loss = [&] { return dot(nd::batchnorm(x, p, nd::Mode::Eval).values(), r.values()); };
    const nd::BatchNormGrads g = nd::batchnorm_backward_eval(x, r, p);
    EXPECT_LT(finite_difference_check(x.values(), g.input.values(), loss).worst, 1e-3);
    EXPECT_LT(finite_difference_check(p.gamma, g.gamma, loss).worst, 1e-3);
    EXPECT_LT(finite_difference_check(p.beta, g.beta, loss).worst, 1e-3);
}

TEST(Relu, Examples) {
    EXPECT_EQ(nd::relu(row({-1, 0, 2})), row({0, 0, 2}));
    const Tensor4 neg = row({-3, -2, -1});
    EXPECT_EQ(nd::relu(neg), row({0, 0, 0}));
    EXPECT_EQ(nd::relu_backward(neg, row({5, 6, 7})), row({0, 0, 0}));
    EXPECT_EQ(nd::relu_backward(row({-1, 0, 2}), row({1, 1, 1})), row({0, 0, 1}));
}

TEST(Relu, BackwardMatchesFiniteDifferences) {
    // Keep inputs away from the kink so central differences are well defined.
    Tensor4 x = random_tensor({2, 2, 4, 4}, 41);
    for (double& v : x.values())
        if (std::abs(v) < 0.05) v += 0.1;
    const Tensor4 r = random_tensor(x.shape(), 42);
    const auto loss = [&] { return dot(nd::relu(x).values(), r.values()); };
    EXPECT_LT(finite_difference_check(x.values(), nd::relu_backward(x, r).values(), loss).worst, 1e-3);
}

TEST(Adam, ZeroGradientAtFirstStepLeavesParameters) {
    std::vector<double> p = {1.0, -2.0, 3.0};
    const std::vector<double> g(3, 0.0);
    nd::AdamState s(3, 1e-3);
    nd::adam_step(p, g, s);
    EXPECT_EQ(p, (std::vector<double>{1.0, -2.0, 3.0}));
    EXPECT_EQ(s.step, 1u);
}

TEST(Adam, FirstStepMovesByLearningRateTimesSign) {
    // Bias correction makes m_hat = g and v_hat = g^2 at step 1.
    std::vector<double> p = {0.0, 0.0, 0.0};
    const std::vector<double> g = {0.5, -3.0, 1e-3};
    nd::AdamState s(3, 0.01);
    nd::adam_step(p, g, s);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(p[i], -0.01 * g[i] / (std::abs(g[i]) + 1e-8), 1e-15);
}

TEST(Adam, SecondStepMatchesHandComputation) {
    std::vector<double> p = {1.0};
    nd::AdamState s(1, 0.1);
    nd::adam_step(p, std::vector<double>{2.0}, s);
    nd::adam_step(p, std::vector<double>{-1.0}, s);
    const double m = 0.9 * (0.1 * 2.0) + 0.1 * -1.0;
    const double v = 0.999 * (0.001 * 4.0) + 0.001 * 1.0;
    const double mhat = m / (1 - 0.81), vhat = v / (1 - 0.999 * 0.999);
    const double first = 1.0 - 0.1 * 2.0 / (2.0 + 1e-8);
    EXPECT_NEAR(p[0], first - 0.1 * mhat / (std::sqrt(vhat) + 1e-8), 1e-12);
}

TEST(Adam, LengthMismatchIsShapeError) {
    std::vector<double> p(3);
    nd::AdamState s(3, 1e-3);
    EXPECT_THROW(nd::adam_step(p, std::vector<double>(2), s), ShapeError);
    nd::AdamState bad(2, 1e-3);
    EXPECT_THROW(nd::adam_step(p, std::vector<double>(3), bad), ShapeError);
}

TEST(Init, SameSeedSameWeightsDifferentSeedDifferent) {
    const nd::ConvLayerSpec spec{3, 4, 5};
    const auto a = nd::init_params(spec, 17);
    const auto b = nd::init_params(spec, 17);
    const auto c = nd::init_params(spec, 18);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_NE(a.weights, c.weights);
    EXPECT_EQ(a.bias, std::vector<double>(4, 0.0));
    const double limit = std::sqrt(6.0 / (3 * 25));
    for (double w : a.weights.values()) EXPECT_LE(std::abs(w), limit);
}

TEST(Rng, StreamsAreReproducibleAndIndependent) {
    nd::Rng a(5), b(5);
    for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next(), b.next());
    EXPECT_NE(nd::derive_seed(1, 0), nd::derive_seed(1, 1));
    EXPECT_NE(nd::derive_seed(1, 0), nd::derive_seed(2, 0));
    EXPECT_EQ(nd::derive_seed(9, 3), nd::derive_seed(9, 3));
}

TEST(Rng, BelowStaysInRangeAndUniformInUnitInterval) {
    nd::Rng r(77);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto k = r.below(7);
        ASSERT_LT(k, 7u);
        ++hits[k];
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
    for (int h : hits) EXPECT_GT(h, 800);
}
