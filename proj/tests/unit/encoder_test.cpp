#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <stdexcept>
#include <vector>

#include "actcluster/data/synthetic.hpp"
#include "actcluster/data/windows.hpp"
#include "actcluster/encoder/checkpoint.hpp"
#include "actcluster/encoder/encoder.hpp"
#include "actcluster/encoder/trainer.hpp"
#include "gradcheck.hpp"

using namespace actc;
namespace gc = actc::gradcheck;

namespace {

WindowSet small_windows(Index span = 700, Index step = 60)
{
    SyntheticConfig cfg;
    cfg.span_length = span;
    return make_windows(generate_synthetic(cfg), 512, step);
}

double max_abs_diff(const ParamSet& a, const ParamSet& b)
{
    double worst = 0;
    for (const auto& [name, p] : a.entries()) {
        worst = std::max(worst, (p.value.data() - b[name].data()).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace

TEST_CASE("temporal length chain of the default encoder")
{
    const EncoderConfig cfg;
    CHECK(cfg.length_chain() == std::vector<Index>{512, 232, 116, 39, 19, 13, 6, 3, 1});
    CHECK(cfg.per_channel_features() == 32);
    CHECK(Encoder(cfg, 3, 1).params()["project.weight"].dim(0) == 96);
    CHECK(Encoder(cfg, 117, 1).params()["project.weight"].dim(0) == 3744);

    Rng rng(3);
    const Encoder enc(cfg, 2, 5);
    const Tensor z = enc.encode(gc::random_tensor({4, 2, 512}, rng));
    CHECK(z.shape() == std::vector<Index>{4, 32});
    CHECK(enc.encode(gc::random_tensor({2, 512}, rng)).shape() == std::vector<Index>{1, 32});
}

TEST_CASE("shared filters make the conv stack channel-equivariant")
{
    Rng rng(11);
    const Encoder enc(EncoderConfig{}, 3, 9);
    const Tensor x = gc::random_tensor({2, 3, 512}, rng);
    const int perm[3] = {2, 0, 1};
    Tensor permuted({2, 3, 512});
    for (Index b = 0; b < 2; ++b) {
        for (Index c = 0; c < 3; ++c) {
            for (Index t = 0; t < 512; ++t) permuted.at(b, c, t) = x.at(b, perm[c], t);
        }
    }
    const Tensor f = enc.conv_features(x);
    const Tensor fp = enc.conv_features(permuted);
    for (Index b = 0; b < 2; ++b) {
        for (Index c = 0; c < 3; ++c) {
            for (Index j = 0; j < f.dim(2); ++j) {
                CHECK(fp.at(b, c, j) == doctest::Approx(f.at(b, perm[c], j)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("training is deterministic for a fixed seed")
{
    const WindowSet ws = small_windows();
    std::vector<double> weights(ws.windows.size(), 1.0);
    TrainConfig tc;
    tc.epochs = 2;
    tc.batch_size = 16;
    auto run = [&] {
        Encoder enc(EncoderConfig{}, ws.channels, 21);
        Mlp head = make_classifier_head(32, ws.classes, 22);
        pseudo_label_train({&enc, nullptr, &head}, ws, ws.labels, weights, tc, 23);
        return std::pair(enc, head);
    };
    const auto [e1, h1] = run();
    const auto [e2, h2] = run();
    CHECK(max_abs_diff(e1.params(), e2.params()) == 0.0);
    CHECK(max_abs_diff(h1.params(), h2.params()) == 0.0);
    CHECK(e1.encode_all(ws) == e2.encode_all(ws));
}

TEST_CASE("loss falls when every window carries the same label")
{
    const WindowSet ws = small_windows();
    std::vector<int> labels(ws.windows.size(), 0);
    std::vector<double> weights(ws.windows.size(), 1.0);
    TrainConfig tc;
    tc.epochs = 4;
    tc.batch_size = 16;
    Encoder enc(EncoderConfig{}, ws.channels, 1);
    Mlp head = make_classifier_head(32, 3, 2);
    const TrainStats stats = pseudo_label_train({&enc, nullptr, &head}, ws, labels, weights, tc, 3);
    REQUIRE(stats.epoch_loss.size() == 4);
    CHECK(stats.epoch_loss.back() < stats.epoch_loss.front());
    CHECK(stats.examples == ws.size());
}

TEST_CASE("a window at weight 1 trains like two copies at weight 0.5")
{
    Rng rng(4);
    const Tensor x = gc::random_tensor({3, 2, 512}, rng);
    Tensor doubled({6, 2, 512});
    doubled.data() << x.data(), x.data();
    const std::vector<int> targets{0, 1, 1};
    const std::vector<int> targets2{0, 1, 1, 0, 1, 1};
    const std::vector<double> w1{1, 1, 1};
    const std::vector<double> w2(6, 0.5);

    Encoder enc_a(EncoderConfig{}, 2, 7), enc_b(EncoderConfig{}, 2, 7);
    Mlp head_a = make_classifier_head(32, 2, 8), head_b = make_classifier_head(32, 2, 8);
    const BatchResult a = batch_gradients({&enc_a, nullptr, &head_a}, x, targets, w1);
    const BatchResult b = batch_gradients({&enc_b, nullptr, &head_b}, doubled, targets2, w2);
    CHECK(a.loss == doctest::Approx(b.loss).epsilon(1e-12));
    // biases feeding batchnorm have zero true gradient, so compare against the largest entry overall
    double scale = 0;
    for (const auto& [name, g] : a.encoder_grads) scale = std::max(scale, g.data().cwiseAbs().maxCoeff());
    for (const auto& [name, g] : a.encoder_grads) {
        CHECK((g.data() - b.encoder_grads.at(name).data()).cwiseAbs().maxCoeff() < 1e-9 * scale);
    }
    for (const auto& [name, g] : a.head_grads) {
        CHECK((g.data() - b.head_grads.at(name).data()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("training rejects inputs it cannot use")
{
    const WindowSet ws = small_windows(600, 100);
    Encoder enc(EncoderConfig{}, ws.channels, 1);
    Mlp head = make_classifier_head(32, 3, 2);
    std::vector<double> zero(ws.windows.size(), 0.0);
    CHECK_THROWS_AS(pseudo_label_train({&enc, nullptr, &head}, ws, ws.labels, zero, {}, 1), std::invalid_argument);
    std::vector<double> short_weights(1, 1.0);
    CHECK_THROWS_AS(pseudo_label_train({&enc, nullptr, &head}, ws, ws.labels, short_weights, {}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(pseudo_label_train({&enc, nullptr, nullptr}, ws, ws.labels, zero, {}, 1), std::invalid_argument);
}

TEST_CASE("checkpoint round trip reproduces the embedding")
{
    const WindowSet ws = small_windows(600, 50);
    Encoder enc(EncoderConfig{}, ws.channels, 31);
    Mlp head = make_classifier_head(32, ws.classes, 32);
    std::vector<double> weights(ws.windows.size(), 1.0);
    TrainConfig tc;
    tc.epochs = 1;
    tc.batch_size = 8;
    pseudo_label_train({&enc, nullptr, &head}, ws, ws.labels, weights, tc, 33);

    std::stringstream buffer;
    write_encoder(buffer, enc);
    const Encoder back = read_encoder(buffer);
    CHECK(back.channels() == enc.channels());
    CHECK(max_abs_diff(enc.params(), back.params()) == 0.0);
    for (std::size_t l = 0; l < 4; ++l) {
        CHECK(back.batchnorm_state()[l].running_mean == enc.batchnorm_state()[l].running_mean);
        CHECK(back.batchnorm_state()[l].running_var == enc.batchnorm_state()[l].running_var);
    }
    CHECK(back.encode_all(ws) == enc.encode_all(ws));

    std::istringstream garbage("not-a-checkpoint 1\n");
    CHECK_THROWS(read_encoder(garbage));
}

TEST_CASE("end-to-end gradients agree with central differences")
{
    Rng rng(2024);
    for (int trial = 0; trial < 6; ++trial) {
        const gc::SmoothCheck plain = gc::end_to_end_trial(rng);
        CHECK(plain.error < 1e-4);
        CHECK(plain.checked > 0);
        const gc::SmoothCheck reduced = gc::end_to_end_trial(rng, true);
        CHECK(reduced.error < 1e-4);
    }
}
