#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "actcluster/numerics/adam.hpp"
#include "actcluster/numerics/ops.hpp"
#include "actcluster/numerics/random.hpp"
#include "gradcheck.hpp"

using namespace actc;
namespace gc = actc::gradcheck;

namespace {

std::string message_of(auto&& fn)
{
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("tensor shape and data stay consistent")
{
    Tensor t({2, 3, 4});
    CHECK(t.size() == 24);
    CHECK(t.rank() == 3);
    t.at(1, 2, 3) = 5.0;
    CHECK(t[23] == 5.0);
    const Tensor r = t.reshaped({6, 4});
    CHECK(r.at(5, 3) == 5.0);
    CHECK_THROWS_AS(t.reshaped({5, 5}), std::invalid_argument);
    CHECK_THROWS_AS(Tensor({2, 2}, {1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(t.dim(3), std::out_of_range);
}

TEST_CASE("conv1d output length follows floor((L - F) / S) + 1")
{
    CHECK(ops::conv1d_output_length(512, 50, 2) == 232);
    for (Index len = 1; len <= 40; ++len) {
        for (Index f = 1; f <= len; ++f) {
            for (Index s = 1; s <= 5; ++s) {
                Tensor x({1, len});
                const Tensor y = ops::conv1d_forward(x, Tensor({1, f}), s, Tensor({1}));
                REQUIRE(y.dim(2) == (len - f) / s + 1);
            }
        }
    }
}

TEST_CASE("conv1d hand example")
{
    const Tensor x({1, 3}, {1, 2, 3});
    const Tensor w({1, 2}, {1, 1});
    const Tensor y = ops::conv1d_forward(x, w, 1, Tensor({1}));
    REQUIRE(y.shape() == std::vector<Index>{1, 1, 2});
    CHECK(y[0] == 3.0);
    CHECK(y[1] == 5.0);
}

TEST_CASE("conv1d rejects mismatched shapes with a named dimension")
{
    CHECK(message_of([] { ops::conv1d_forward(Tensor({1, 3}), Tensor({1, 5}), 1, Tensor({1})); })
              .find("filter length") != std::string::npos);
    CHECK(message_of([] { ops::conv1d_forward(Tensor({1, 2, 8}), Tensor({1, 3, 2}), 1, Tensor({1})); })
              .find("input-channel") != std::string::npos);
    CHECK(message_of([] { ops::conv1d_forward(Tensor({1, 8}), Tensor({2, 2}), 1, Tensor({3})); })
              .find("bias length") != std::string::npos);
    CHECK_THROWS_AS(ops::conv1d_forward(Tensor({1, 8}), Tensor({1, 2}), 0, Tensor({1})), std::invalid_argument);
}

TEST_CASE("maxpool examples")
{
    const Tensor x({1, 1, 4}, {4, 1, 3, 2});
    const auto p = ops::maxpool1d_forward(x, 2);
    CHECK(p.output[0] == 4.0);
    CHECK(p.output[1] == 3.0);
    CHECK(ops::maxpool1d_forward(Tensor({1, 1, 39}), 2).output.dim(2) == 19);

    // ties route the gradient to the first maximal position
    const Tensor tie({1, 1, 2}, {7, 7});
    const auto pt = ops::maxpool1d_forward(tie, 2);
    const Tensor g = ops::maxpool1d_backward(tie.shape(), pt.argmax, Tensor({1, 1, 1}, {1.5}));
    CHECK(g[0] == 1.5);
    CHECK(g[1] == 0.0);
}

TEST_CASE("batchnorm normalizes with batch statistics in train mode")
{
    Rng rng(3);
    Tensor x({400, 2});
    for (Index i = 0; i < 400; ++i) {
        x.at(i, 0) = 10.0 * standard_normal(rng) + 4.0;
        x.at(i, 1) = 7.0;  // constant column
    }
    Tensor scale({2}, {1, 1});
    Tensor shift({2}, {0, 0.25});
    auto state = ops::BatchNormState::init(2);
    const Tensor y = ops::batchnorm_forward(x, scale, shift, state, ops::BatchNormMode::train);
    double mean = 0, sq = 0;
    for (Index i = 0; i < 400; ++i) {
        mean += y.at(i, 0) / 400.0;
        sq += y.at(i, 0) * y.at(i, 0) / 400.0;
        REQUIRE(y.at(i, 1) == doctest::Approx(0.25).epsilon(1e-12));
    }
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(sq - mean * mean - 1.0) < 1e-6);
    // running statistics moved by momentum 0.1 toward the batch values
    CHECK(state.running_mean[1] == doctest::Approx(0.7));
    CHECK(state.running_var[1] == doctest::Approx(0.9));

    auto one = ops::BatchNormState::init(2);
    CHECK_THROWS_AS(ops::batchnorm_forward(Tensor({1, 2}), scale, shift, one, ops::BatchNormMode::train),
                    std::invalid_argument);
    // eval mode accepts a single example
    CHECK_NOTHROW(ops::batchnorm_forward(Tensor({1, 2}), scale, shift, one, ops::BatchNormMode::eval));
}

TEST_CASE("dense examples")
{
    const Tensor x({1, 2}, {1, 2});
    const Tensor w({2, 3}, {1, 0, 1, 0, 1, 1});
    const Tensor y = ops::dense_forward(x, w, Tensor({3}));
    CHECK(y[0] == 1.0);
    CHECK(y[1] == 2.0);
    CHECK(y[2] == 3.0);

    const Tensor eye({2, 2}, {1, 0, 0, 1});
    CHECK(ops::dense_forward(x, eye, Tensor({2})).data() == x.data());
    CHECK_THROWS_AS(ops::dense_forward(x, Tensor({3, 2}), Tensor({2})), std::invalid_argument);
}

TEST_CASE("softmax cross-entropy values")
{
    const Tensor sure({1, 3}, {1000, 0, 0});
    CHECK(ops::softmax_cross_entropy(sure, std::vector<int>{0}, std::vector<double>{1}).loss < 1e-12);
    const Tensor flat({2, 4});
    CHECK(ops::softmax_cross_entropy(flat, std::vector<int>{1, 3}, std::vector<double>{1, 1}).loss
          == doctest::Approx(std::log(4.0)).epsilon(1e-14));
    CHECK_THROWS_AS(ops::softmax_cross_entropy(flat, std::vector<int>{0, 0}, std::vector<double>{0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ops::softmax_cross_entropy(flat, std::vector<int>{0, 4}, std::vector<double>{1, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ops::softmax_cross_entropy(flat, std::vector<int>{0, 0}, std::vector<double>{1, -1}),
                    std::invalid_argument);
}

TEST_CASE("weight 2 equals listing the example twice")
{
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Index k = gc::draw(rng, 2, 5);
        const Tensor a = gc::random_tensor({1, k}, rng, -3, 3);
        const Tensor b = gc::random_tensor({1, k}, rng, -3, 3);
        const int ta = static_cast<int>(gc::draw(rng, 0, k - 1));
        const int tb = static_cast<int>(gc::draw(rng, 0, k - 1));

        Tensor weighted({2, k});
        Tensor duplicated({3, k});
        for (Index j = 0; j < k; ++j) {
            weighted.at(0, j) = duplicated.at(0, j) = duplicated.at(1, j) = a[j];
            weighted.at(1, j) = duplicated.at(2, j) = b[j];
        }
        const auto w = ops::softmax_cross_entropy(weighted, std::vector<int>{ta, tb}, std::vector<double>{2, 1});
        const auto d = ops::softmax_cross_entropy(duplicated, std::vector<int>{ta, ta, tb}, std::vector<double>{1, 1, 1});
        CHECK(std::abs(w.loss - d.loss) < 1e-12);
        for (Index j = 0; j < k; ++j) {
            // d loss / d a collects both copies
            CHECK(std::abs(w.grad.at(0, j) - (d.grad.at(0, j) + d.grad.at(1, j))) < 1e-12);
            CHECK(std::abs(w.grad.at(1, j) - d.grad.at(2, j)) < 1e-12);
        }
    }
}

TEST_CASE("backward passes agree with central differences")
{
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        CHECK(gc::conv1d_trial(rng) < 1e-6);
        CHECK(gc::maxpool_trial(rng) < 1e-6);
        CHECK(gc::batchnorm_trial(rng, ops::BatchNormMode::train) < 1e-5);
        CHECK(gc::batchnorm_trial(rng, ops::BatchNormMode::eval) < 1e-6);
        CHECK(gc::dense_trial(rng) < 1e-6);
        CHECK(gc::relu_trial(rng) < 1e-6);
        CHECK(gc::cross_entropy_trial(rng) < 1e-6);
        CHECK(gc::mlp_trial(rng).error < 1e-6);
    }
}

TEST_CASE("adam update rule")
{
    ParamSet ps;
    ps.add("w", Tensor({3}, {1.0, -2.0, 0.5}));
    const Tensor before = ps["w"];
    adam_step(ps, GradSet{{"w", Tensor({3})}});
    CHECK(ps["w"].data() == before.data());

    ParamSet fresh;
    fresh.add("w", Tensor({3}, {1.0, -2.0, 0.5}));
    adam_step(fresh, GradSet{{"w", Tensor({3}, {0.3, -7.0, 1e-3})}});
    // first bias-corrected step moves each coordinate by lr * g / (|g| + eps)
    CHECK(std::abs(fresh["w"][0] - (1.0 - 1e-3)) < 1e-6);
    CHECK(std::abs(fresh["w"][1] - (-2.0 + 1e-3)) < 1e-6);
    CHECK(std::abs(fresh["w"][2] - (0.5 - 1e-3)) < 1e-6);
    CHECK(fresh.step() == 1);

    ParamSet bad;
    bad.add("layer.weight", Tensor({1}));
    CHECK(message_of([&] { adam_step(bad, GradSet{{"layer.weight", Tensor({1}, {NAN})}}); }).find("layer.weight")
          != std::string::npos);
}

TEST_CASE("adam descends a convex quadratic")
{
    // f(w) = sum_i c_i (w_i - t_i)^2
    ParamSet ps;
    ps.add("w", Tensor({4}, {3, -2, 1, 0.5}));
    const Eigen::Vector4d c(1.0, 2.0, 0.5, 4.0);
    const Eigen::Vector4d target(0.1, 0.2, -0.3, 0.4);
    const AdamConfig cfg;  // lr 1e-3: 200 steps stay well short of the minimum
    auto loss = [&] {
        return (c.array() * (ps["w"].data().array() - target.array()).square()).sum();
    };
    double prev = loss();
    for (int step = 1; step <= 200; ++step) {
        Tensor g({4});
        g.data() = 2.0 * c.array() * (ps["w"].data().array() - target.array());
        adam_step(ps, GradSet{{"w", g}}, cfg);
        const double now = loss();
        if (step > 10) CHECK(now < prev);
        prev = now;
    }
}

TEST_CASE("seed derivation and sampling")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t stream = 0; stream < 8; ++stream) {
        for (std::uint64_t counter = 0; counter < 100; ++counter) seen.insert(derive_seed(42, stream, counter));
    }
    CHECK(seen.size() == 800);

    Rng rng(5);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[uniform_index(rng, 7)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);

    std::vector<int> a{0, 1, 2, 3, 4, 5, 6, 7};
    std::vector<int> b = a;
    Rng r1(9), r2(9);
    shuffle(a.begin(), a.end(), r1);
    shuffle(b.begin(), b.end(), r2);
    CHECK(a == b);
}
