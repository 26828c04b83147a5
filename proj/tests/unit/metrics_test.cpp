#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "actcluster/data/synthetic.hpp"
#include "actcluster/data/windows.hpp"
#include "actcluster/metrics/hungarian.hpp"
#include "actcluster/metrics/metrics.hpp"
#include "actcluster/metrics/pointwise.hpp"
#include "actcluster/numerics/random.hpp"
#include "oracles.hpp"

using namespace actc;

namespace {

std::vector<int> random_labels(std::size_t n, int k, Rng& rng)
{
    std::vector<int> out(n);
    for (int& l : out) l = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(k)));
    return out;
}

}  // namespace

TEST_CASE("alignment of simple tables")
{
    CHECK(align_labels(contingency_from_counts(Eigen::MatrixXd::Identity(4, 4) * 5)) == std::vector<int>{0, 1, 2, 3});
    Eigen::MatrixXd anti = Eigen::MatrixXd::Zero(3, 3);
    anti(0, 2) = anti(1, 1) = anti(2, 0) = 7;
    CHECK(align_labels(contingency_from_counts(anti)) == std::vector<int>{2, 1, 0});
    // all optima equal: the lexicographically smallest wins
    CHECK(lexicographic_best_assignment(Eigen::MatrixXd::Ones(3, 3)) == std::vector<int>{0, 1, 2});
    // more clusters than classes: the spare cluster maps to a padding id
    Eigen::MatrixXd wide(3, 2);
    wide << 0, 4, 5, 0, 1, 1;
    const std::vector<int> map = align_labels(contingency_from_counts(wide));
    CHECK(map[0] == 1);
    CHECK(map[1] == 0);
    CHECK(map[2] >= 2);
}

TEST_CASE("Hungarian optimum matches enumeration of all 120 permutations")
{
    Rng rng(1);
    for (int trial = 0; trial < 1000; ++trial) {
        Eigen::MatrixXd score(5, 5);
        for (Index i = 0; i < 25; ++i) score.data()[i] = static_cast<double>(uniform_index(rng, 10));
        const double best = oracle::brute_force_assignment_score(score);
        for (const auto& assignment : {hungarian_maximize(score), lexicographic_best_assignment(score)}) {
            double total = 0;
            std::vector<int> seen(assignment);
            std::sort(seen.begin(), seen.end());
            REQUIRE(seen == std::vector<int>{0, 1, 2, 3, 4});
            for (Index r = 0; r < 5; ++r) total += score(r, assignment[static_cast<std::size_t>(r)]);
            REQUIRE(total == best);
        }
    }
}

TEST_CASE("lexicographic tie-break against enumeration")
{
    Rng rng(2);
    for (int trial = 0; trial < 300; ++trial) {
        const Index n = 2 + static_cast<Index>(uniform_index(rng, 4));
        Eigen::MatrixXd score(n, n);
        for (Index i = 0; i < n * n; ++i) score.data()[i] = static_cast<double>(uniform_index(rng, 3));
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        double best = -1;
        std::vector<int> first;
        do {  // permutations come in lexicographic order, so the first optimum is the smallest
            double s = 0;
            for (Index r = 0; r < n; ++r) s += score(r, perm[static_cast<std::size_t>(r)]);
            if (s > best) {
                best = s;
                first = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        REQUIRE(lexicographic_best_assignment(score) == first);
    }
}

TEST_CASE("accuracy and macro F1 examples")
{
    const std::vector<int> truth{0, 0, 1, 1, 2, 2};
    CHECK(accuracy(truth, truth) == 1.0);
    CHECK(macro_f1(truth, truth) == 1.0);
    CHECK(accuracy(truth, std::vector<int>{2, 2, 0, 0, 1, 1}) == 1.0);
    CHECK(accuracy(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 1, 0, 1}) == 0.5);
    CHECK_THROWS(accuracy(std::vector<int>{}, std::vector<int>{}));
    CHECK_THROWS(accuracy(std::vector<int>{0, 1}, std::vector<int>{0}));
    // class 2 never predicted, predicted class 3 has no support
    CHECK(macro_f1(std::vector<int>{0, 1, 2}, std::vector<int>{0, 1, 3}) == doctest::Approx(0.5));
}

TEST_CASE("ARI and NMI special cases")
{
    const std::vector<int> truth{0, 0, 1, 1, 2, 2};
    CHECK(ari(contingency(truth, truth)) == doctest::Approx(1.0));
    CHECK(nmi(contingency(truth, truth)) == doctest::Approx(1.0));
    const std::vector<int> one(6, 0);
    CHECK(ari(contingency(truth, one)) == 0.0);
    CHECK(nmi(contingency(truth, one)) == 0.0);
    CHECK(ari(contingency(one, one)) == 0.0);
    CHECK(nmi(contingency(one, one)) == 0.0);
}

TEST_CASE("metrics agree with the slow oracles")
{
    Rng rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 29);
        const int k = 1 + static_cast<int>(uniform_index(rng, 5));
        const std::vector<int> truth = random_labels(n, k, rng);
        const std::vector<int> pred = random_labels(n, 1 + static_cast<int>(uniform_index(rng, 5)), rng);
        const ContingencyTable table = contingency(truth, pred);
        REQUIRE(std::abs(ari(table) - oracle::ari_pairs(truth, pred)) < 1e-12);
        REQUIRE(std::abs(nmi(table) - oracle::nmi_entropy(truth, pred)) < 1e-12);
        REQUIRE(accuracy(truth, pred) == oracle::brute_force_accuracy(truth, pred));
        CHECK(ari(table) <= 1.0 + 1e-12);
        CHECK(nmi(table) >= -1e-12);
        CHECK(nmi(table) <= 1.0 + 1e-12);
    }
}

TEST_CASE("ARI and NMI ignore relabeling")
{
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const std::vector<int> truth = random_labels(25, 4, rng);
        const std::vector<int> pred = random_labels(25, 4, rng);
        std::vector<int> perm{0, 1, 2, 3};
        shuffle(perm.begin(), perm.end(), rng);
        std::vector<int> relabeled;
        for (int l : pred) relabeled.push_back(perm[static_cast<std::size_t>(l)]);
        CHECK(ari(contingency(truth, relabeled)) == doctest::Approx(ari(contingency(truth, pred))).epsilon(1e-12));
        CHECK(nmi(contingency(truth, relabeled)) == doctest::Approx(nmi(contingency(truth, pred))).epsilon(1e-12));
    }
}

TEST_CASE("contingency marginals")
{
    const ContingencyTable t = contingency(std::vector<int>{0, 1, 1, 2}, std::vector<int>{1, 1, 0, 0}, 4, 3);
    CHECK(t.classes() == 4);
    CHECK(t.clusters() == 3);
    CHECK(t.total == 4.0);
    CHECK(t.counts.sum() == 4.0);
    CHECK(t.cluster_totals == t.counts.rowwise().sum());
    CHECK(t.class_totals == t.counts.colwise().sum().transpose());
}

TEST_CASE("point-wise votes")
{
    const std::vector<Index> starts{0, 1, 2};
    // point 2 is covered by all three windows, labeled 2, 2, 1
    CHECK(pointwise_labels(std::vector<int>{2, 2, 1}, starts, 3, 6)[2] == 2);
    // ties go to the smaller label, uncovered points are -1
    const std::vector<int> tie = pointwise_labels(std::vector<int>{3, 1}, std::vector<Index>{0, 2}, 4, 8);
    CHECK(tie == std::vector<int>{3, 3, 1, 1, 1, 1, -1, -1});

    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const Index w = 1 + static_cast<Index>(uniform_index(rng, 8));
        const Index step = 1 + static_cast<Index>(uniform_index(rng, 6));
        const Index points = w + static_cast<Index>(uniform_index(rng, 40));
        std::vector<Index> s;
        for (Index o = 0; o + w <= points; o += step) s.push_back(o);
        const std::vector<int> labels = random_labels(s.size(), 4, rng);
        REQUIRE(pointwise_labels(labels, s, w, points) == oracle::vote_per_point(labels, s, w, points));
    }
}

// ARI counts pairs, which do not scale linearly when each window becomes W
// points, so only the other three metrics carry over exactly.
TEST_CASE("window and point metrics coincide when windows do not overlap")
{
    SyntheticConfig cfg;
    cfg.span_length = 256;
    const WindowSet ws = make_windows(generate_synthetic(cfg), 64, 64);
    Rng rng(6);
    std::vector<int> pred = ws.labels;
    for (int& p : pred) {
        if (uniform01(rng) < 0.3) p = static_cast<int>(uniform_index(rng, 3));
    }
    const PointLabels pts = pointwise_from_windows(ws, pred);
    CHECK(pts.truth.size() == static_cast<std::size_t>(ws.size() * 64));
    const MetricValues a = evaluate_labels(ws.labels, pred);
    const MetricValues b = evaluate_labels(pts.truth, pts.predicted);
    CHECK(a.acc == doctest::Approx(b.acc).epsilon(1e-12));
    CHECK(a.nmi == doctest::Approx(b.nmi).epsilon(1e-12));
    std::vector<int> truth_rep, pred_rep;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        truth_rep.insert(truth_rep.end(), 64, ws.labels[i]);
        pred_rep.insert(pred_rep.end(), 64, pred[i]);
    }
    CHECK(b.ari == doctest::Approx(oracle::ari_pairs(truth_rep, pred_rep)).epsilon(1e-12));
    CHECK(a.f1 == doctest::Approx(b.f1).epsilon(1e-12));
}

TEST_CASE("subject-weighted aggregation")
{
    MetricValues lo{0.4, 0.1, 0.2, 0.3}, hi{0.6, 0.3, 0.4, 0.5};
    const std::vector<MetricValues> both{lo, hi};
    const MetricValues eq = aggregate_subject_dependent(both, std::vector<double>{5, 5});
    CHECK(eq.acc == doctest::Approx(0.5));
    CHECK(eq.f1 == doctest::Approx(0.4));
    const std::vector<MetricValues> one{lo};
    CHECK(aggregate_subject_dependent(one, std::vector<double>{3}).acc == doctest::Approx(0.4));
    MetricValues perfect{1.0, 1.0, 1.0, 1.0}, half{0.5, 0.5, 0.5, 0.5};
    const std::vector<MetricValues> skewed{perfect, half};
    CHECK(aggregate_subject_dependent(skewed, std::vector<double>{10, 30}).acc == doctest::Approx(0.625));
    CHECK_THROWS(aggregate_subject_dependent(both, std::vector<double>{0, 0}));
}
