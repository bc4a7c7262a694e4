#include "support.hpp"

#include "equiloc/error.hpp"
#include "equiloc/model/autoencoder.hpp"
#include "equiloc/model/checkpoint.hpp"
#include "equiloc/train/loss.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

using namespace equiloc;
using namespace equiloc::model;
using nd::Tensor4;

namespace {

std::vector<nd::ConvLayerSpec> kernels(std::initializer_list<std::size_t> ks) {
    std::vector<nd::ConvLayerSpec> out;
    for (std::size_t k : ks) out.push_back({1, 1, k});
    return out;
}

std::vector<std::size_t> sizes(const std::vector<nd::ConvLayerSpec>& layers) {
    std::vector<std::size_t> out;
    for (const auto& l : layers) out.push_back(l.kernel_size);
    return out;
}

ModelConfig small_config(std::uint64_t seed = 1) {
    ModelConfig mc;
    mc.height = mc.width = 16;
    mc.channels = 4;
    mc.s_psi = 5;
    mc.s_phi = 7;
    mc.seed = seed;
    return mc;
}

Tensor4 square_image(std::size_t size, std::size_t top, std::size_t left, std::size_t side) {
    Tensor4 t({1, 1, size, size});
    for (std::size_t y = top; y < top + side; ++y)
        for (std::size_t x = left; x < left + side; ++x) t.at(0, 0, y, x) = 1.0;
    return t;
}

// Single 1x1 identity layer: the encoder map is the image itself.
NetworkSpec identity_spec(std::size_t in) { return NetworkSpec{{{in, 1, 1}}}; }

void make_identity(ConvStack& stack, std::size_t channel) {
    auto& w = stack.layer(0).conv.weights;
    w.fill(0.0);
    w.at(0, channel, 0, 0) = 1.0;
    stack.layer(0).conv.bias.assign(1, 0.0);
}

}  // namespace

TEST(ReceptiveField, Examples) {
    EXPECT_EQ(receptive_field(kernels({3, 3, 3, 3, 1})), 9);
    EXPECT_EQ(receptive_field(kernels({1, 1, 1, 1, 1})), 1);
    EXPECT_EQ(receptive_field(kernels({7, 7, 7, 7, 1})), 25);
}

TEST(PlanLayers, GreedyPlansHitTheTarget) {
    EXPECT_EQ(sizes(plan_layers(9)), (std::vector<std::size_t>{7, 3, 1, 1, 1}));
    EXPECT_EQ(sizes(plan_layers(1)), (std::vector<std::size_t>{1, 1, 1, 1, 1}));
    EXPECT_EQ(sizes(plan_layers(25)), (std::vector<std::size_t>{7, 7, 7, 7, 1}));
    for (int rf = 1; rf <= 31; rf += 2) EXPECT_EQ(receptive_field(plan_layers(rf)), rf);
}

TEST(PlanLayers, UnreachableTargetListsFeasibleSet) {
    try {
        plan_layers(33);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("1..31"), std::string::npos);
    }
    EXPECT_THROW(plan_layers(8), DomainError);
    EXPECT_THROW(plan_layers(0), DomainError);
}

TEST(PlanLayers, ChannelWiring) {
    const auto layers = plan_layers(13, 3, 8, 1);
    EXPECT_EQ(layers.front().in_channels, 3u);
    EXPECT_EQ(layers.front().out_channels, 8u);
    EXPECT_EQ(layers.back().out_channels, 1u);
    EXPECT_NO_THROW(NetworkSpec{layers}.validate());
}

TEST(PositionalEncoding, Ramps) {
    const Tensor4 pe2 = positional_encoding(2, 2);
    EXPECT_EQ(pe2.at(0, 0, 0, 0), 0.25);
    EXPECT_EQ(pe2.at(0, 0, 1, 0), 0.75);
    EXPECT_EQ(pe2.at(0, 1, 0, 1), 0.75);
    const Tensor4 pe80 = positional_encoding(80, 80);
    EXPECT_DOUBLE_EQ(pe80.at(0, 0, 0, 0), 0.00625);
    EXPECT_DOUBLE_EQ(pe80.at(0, 1, 0, 0), 0.00625);
}

TEST(Autoencoder, ShapesAndLatentCount) {
    ModelConfig mc = small_config();
    mc.height = mc.width = 80;
    mc.s_psi = 9;
    mc.s_phi = 25;
    Autoencoder ae(mc);
    const ForwardResult fr = ae.forward(square_image(80, 30, 30, 9));
    EXPECT_EQ(fr.reconstruction.shape(), (nd::Shape4{1, 1, 80, 80}));
    ASSERT_EQ(fr.latents.size(), 1u);
    EXPECT_EQ(fr.latents[0].size(), 1u);
}

TEST(Autoencoder, PassThroughEncoderFindsBrightPixel) {
    Autoencoder ae(identity_spec(1), NetworkSpec{plan_layers(3, 3, 2, 1)}, 32, 32, {0.01}, {0.8}, 3);
    make_identity(ae.encoder(), 0);
    Tensor4 img({1, 1, 32, 32});
    img.at(0, 0, 10, 20) = 1.0;
    const auto z = ae.encode(img)[0][0];
    EXPECT_NEAR(z.y, 10.5, 1e-4);
    EXPECT_NEAR(z.x, 20.5, 1e-4);

    const auto zs = ae.encode(nd::shift(img, 2, 3))[0][0];
    EXPECT_NEAR(zs.y - z.y, 2.0, 1e-4);
    EXPECT_NEAR(zs.x - z.x, 3.0, 1e-4);
}

TEST(Autoencoder, IdenticalBatchItemsGiveIdenticalLatents) {
    Autoencoder ae(small_config());
    const Tensor4 one = square_image(16, 4, 6, 3);
    Tensor4 two({2, 1, 16, 16});
    std::copy(one.values().begin(), one.values().end(), two.plane(0, 0).begin());
    std::copy(one.values().begin(), one.values().end(), two.plane(1, 0).begin());
    const auto z = ae.encode(two);
    EXPECT_EQ(z[0][0], z[1][0]);
}

TEST(Autoencoder, PassThroughDecoderRendersTheGaussian) {
    Autoencoder ae(NetworkSpec{plan_layers(3, 1, 2, 1)}, identity_spec(3), 20, 24, {0.5}, {1.1}, 5);
    make_identity(ae.decoder(), 0);
    const eqv::LatentPoint z{7.3, 12.8};
    const Tensor4 out = ae.decode({{z}});
    const eqv::Map2D g = eqv::render_gaussian2d(z, 20, 24, {1.1});
    for (std::size_t i = 0; i < g.values.size(); ++i) ASSERT_DOUBLE_EQ(out.values()[i], g.values[i]);
}

TEST(Autoencoder, DecodeRejectsLatentOutsideImage) {
    Autoencoder ae(small_config());
    EXPECT_THROW(ae.decode({{{-0.5, 3.0}}}), DomainError);
    EXPECT_THROW(ae.decode({{{3.0, 16.5}}}), DomainError);
    EXPECT_THROW(ae.decode({{{3.0, 3.0}, {4.0, 4.0}}}), ShapeError);
}

TEST(Autoencoder, ShapeErrorsNameTheDimension) {
    Autoencoder ae(small_config());
    try {
        ae.encode(Tensor4({1, 1, 16, 15}));
        FAIL();
    } catch (const ShapeError& e) {
        EXPECT_EQ(e.dimension(), "width");
    }
    EXPECT_THROW(ae.encode(Tensor4({1, 2, 16, 16})), ShapeError);
}

TEST(Autoencoder, BackwardMatchesFiniteDifferences) {
    ModelConfig mc = small_config(11);
    mc.height = mc.width = 9;
    mc.channels = 2;
    mc.s_psi = 3;
    mc.s_phi = 3;
    Autoencoder ae(mc);
    Tensor4 images = equiloc::testing::random_tensor({2, 1, 9, 9}, 12, 0.0, 0.3);
    images.at(0, 0, 4, 4) += 1.0;
    images.at(1, 0, 3, 5) += 1.0;

    const Tensor4 target = equiloc::testing::random_tensor({2, 1, 9, 9}, 13, 0.0, 1.0);

    const auto loss = [&] { return train::mse_loss(ae.forward_for_training(images).reconstruction, target); };
    ae.zero_grad();
    const auto fr = ae.forward_for_training(images);
    const Tensor4 gin = ae.backward(train::mse_loss_grad(fr.reconstruction, target), true);
    auto params = ae.params();
    for (std::size_t k = 0; k < params.size(); ++k) {
        const std::vector<double> analytic(params[k].grad.begin(), params[k].grad.end());
        EXPECT_LT(equiloc::testing::finite_difference_check(params[k].value, analytic, loss, 1e-6).worst, 1e-3) << "block " << k;
    }
    EXPECT_LT(equiloc::testing::finite_difference_check(images.values(), gin.values(), loss, 1e-6).worst, 1e-3);
}

TEST(Autoencoder, GradientsAccumulateUntilZeroed) {
    Autoencoder ae(small_config());
    const Tensor4 img = square_image(16, 5, 5, 3);
    const auto step = [&] {
        const auto fr = ae.forward_for_training(img);
        ae.backward(train::mse_loss_grad(fr.reconstruction, img));
    };
    ae.zero_grad();
    step();
    const auto once = ae.params();
    const std::vector<double> g1(once.back().grad.begin(), once.back().grad.end());
    step();
    const auto twice = ae.params();
    for (std::size_t i = 0; i < g1.size(); ++i) EXPECT_NEAR(twice.back().grad[i], 2 * g1[i], 1e-12);
    ae.zero_grad();
    for (const auto& p : ae.params())
        for (double g : p.grad) ASSERT_EQ(g, 0.0);
}

TEST(Autoencoder, ParamViewsSurviveZeroGrad) {
    Autoencoder ae(small_config());
    const auto before = ae.params();
    ae.zero_grad();
    const auto after = ae.params();
    ASSERT_EQ(before.size(), after.size());
    for (std::size_t k = 0; k < before.size(); ++k) {
        EXPECT_EQ(before[k].value.data(), after[k].value.data());
        EXPECT_EQ(before[k].grad.data(), after[k].grad.data());
    }
}

TEST(Autoencoder, SameSeedSameModel) {
    Autoencoder a(small_config(4)), b(small_config(4)), c(small_config(5));
    const Tensor4 img = square_image(16, 3, 8, 4);
    EXPECT_EQ(a.forward(img).reconstruction, b.forward(img).reconstruction);
    EXPECT_NE(a.forward(img).reconstruction, c.forward(img).reconstruction);
}

TEST(Checkpoint, RoundTripIsBitwise) {
    Autoencoder ae(small_config(21));
    // Move the batchnorm statistics away from their defaults first.
    const Tensor4 batch = equiloc::testing::random_tensor({3, 1, 16, 16}, 22, 0.0, 1.0);
    ae.forward_for_training(batch);

    const std::string text = checkpoint_to_string(ae);
    Autoencoder back = checkpoint_from_string(text);
    EXPECT_EQ(checkpoint_to_string(back), text);
    const Tensor4 a = ae.forward(batch).reconstruction;
    const Tensor4 b = back.forward(batch).reconstruction;
    EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)), 0);
    EXPECT_EQ(back.softargmax_config().temperature, ae.softargmax_config().temperature);
    EXPECT_EQ(back.render_config().sigma, ae.render_config().sigma);
    EXPECT_EQ(back.seed(), ae.seed());

    const auto path = (std::filesystem::temp_directory_path() / "equiloc_ckpt_test.json").string();
    save_checkpoint(ae, path);
    const Tensor4 c = load_checkpoint(path).forward(batch).reconstruction;
    EXPECT_EQ(std::memcmp(a.data(), c.data(), a.size() * sizeof(double)), 0);
    std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsGarbage) {
    EXPECT_THROW(checkpoint_from_string("not json"), DomainError);
    EXPECT_THROW(checkpoint_from_string("{\"format\": \"other\"}"), DomainError);
    EXPECT_THROW(load_checkpoint("/nonexistent/ckpt.json"), IoError);
}
