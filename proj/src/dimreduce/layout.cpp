#include "actcluster/dimreduce/layout.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "actcluster/numerics/random.hpp"

namespace actc {

namespace {

constexpr Eigen::Index kDenseLimit = 200;
constexpr double kClip = 4.0;

double clip(double v)
{
    if (!(v == v)) return 0.0;  // NaN guard
    return std::clamp(v, -kClip, kClip);
}

// Connected component id per vertex, numbered in order of first vertex.
std::vector<Eigen::Index> components(const SparseMatrix& g, Eigen::Index& count)
{
    const Eigen::Index n = g.rows();
    std::vector<Eigen::Index> comp(static_cast<std::size_t>(n), -1);
    std::vector<Eigen::Index> stack;
    count = 0;
    for (Eigen::Index s = 0; s < n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        comp[static_cast<std::size_t>(s)] = count;
        stack.push_back(s);
        while (!stack.empty()) {
            const Eigen::Index v = stack.back();
            stack.pop_back();
            for (SparseMatrix::InnerIterator it(g, v); it; ++it) {
                auto& c = comp[static_cast<std::size_t>(it.col())];
                if (c < 0) {
                    c = count;
                    stack.push_back(it.col());
                }
            }
        }
        ++count;
    }
    return comp;
}

// Flip each column so its largest-magnitude entry is positive.
void fix_signs(Eigen::MatrixXd& v)
{
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index r = 0;
        v.col(c).cwiseAbs().maxCoeff(&r);
        if (v(r, c) < 0.0) v.col(c) = -v.col(c);
    }
}

// Eigenvectors 1..dim of I - D^-1/2 A D^-1/2 for a connected graph.
bool laplacian_eigenvectors(const SparseMatrix& g, Eigen::Index dim, std::uint64_t seed, Eigen::MatrixXd& out)
{
    const Eigen::Index n = g.rows();
    Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (SparseMatrix::InnerIterator it(g, i); it; ++it) degree[i] += it.value();
    if ((degree.array() <= 0.0).any()) return false;
    const Eigen::VectorXd inv_sqrt = degree.array().rsqrt();
    const SparseMatrix m = inv_sqrt.asDiagonal() * g * inv_sqrt.asDiagonal();

    if (n <= kDenseLimit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(m)};
        if (es.info() != Eigen::Success) return false;
        // largest eigenvalues of m are the smallest of the Laplacian
        out.resize(n, dim);
        for (Eigen::Index c = 0; c < dim; ++c) out.col(c) = es.eigenvectors().col(n - 2 - c);
    } else {
        // subspace iteration on (I + m) / 2, deflated by the trivial eigenvector
        Eigen::VectorXd trivial = degree.array().sqrt();
        trivial.normalize();
        const Eigen::Index block = dim + 4;
        Rng rng(seed);
        Eigen::MatrixXd x(n, block);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = standard_normal(rng);
        Eigen::VectorXd ritz_prev = Eigen::VectorXd::Zero(block);
        Eigen::MatrixXd vectors;
        for (int it = 0; it < 500; ++it) {
            x -= trivial * (trivial.transpose() * x);
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
            const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
            x = 0.5 * (q + m * q);
            if (it % 10 != 9) continue;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(q.transpose() * x);
            if (small.info() != Eigen::Success) return false;
            vectors = q * small.eigenvectors();
            const Eigen::VectorXd ritz = small.eigenvalues();
            const double change = (ritz - ritz_prev).tail(dim).cwiseAbs().maxCoeff();
            ritz_prev = ritz;
            if (change < 1e-9) break;
        }
        if (vectors.size() == 0) return false;
        out.resize(n, dim);
        for (Eigen::Index c = 0; c < dim; ++c) out.col(c) = vectors.col(block - 1 - c);
    }
    if (!out.allFinite()) return false;
    fix_signs(out);
    return true;
}

}  // namespace

std::pair<double, double> fit_ab(double spread, double min_dist)
{
    constexpr int samples = 300;
    Eigen::VectorXd x(samples);
    Eigen::VectorXd y(samples);
    for (int i = 0; i < samples; ++i) {
        x[i] = 3.0 * spread * i / (samples - 1);
        y[i] = x[i] < min_dist ? 1.0 : std::exp(-(x[i] - min_dist) / spread);
    }
    auto residuals = [&](double a, double b, Eigen::MatrixXd* jac) {
        Eigen::VectorXd r(samples);
        if (jac) jac->resize(samples, 2);
        for (int i = 0; i < samples; ++i) {
            const double p = x[i] > 0.0 ? std::pow(x[i], 2.0 * b) : 0.0;
            const double f = 1.0 / (1.0 + a * p);
            r[i] = f - y[i];
            if (jac) {
                (*jac)(i, 0) = -p * f * f;
                (*jac)(i, 1) = x[i] > 0.0 ? -2.0 * a * p * std::log(x[i]) * f * f : 0.0;
            }
        }
        return r;
    };

    double a = 1.0;
    double b = 1.0;
    double lambda = 1e-3;
    Eigen::MatrixXd jac;
    double cost = residuals(a, b, &jac).squaredNorm();
    for (int it = 0; it < 500; ++it) {
        const Eigen::VectorXd r = residuals(a, b, &jac);
        const Eigen::Matrix2d jtj = jac.transpose() * jac;
        const Eigen::Vector2d g = jac.transpose() * r;
        if (g.norm() < 1e-14) break;
        Eigen::Matrix2d damped = jtj;
        damped.diagonal() += lambda * jtj.diagonal();
        const Eigen::Vector2d delta = damped.ldlt().solve(-g);
        const double na = a + delta[0];
        const double nb = b + delta[1];
        const double next = na > 0.0 && nb > 0.0 ? residuals(na, nb, nullptr).squaredNorm() : cost + 1.0;
        if (next < cost) {
            const bool done = cost - next < 1e-16 * std::max(1.0, cost);
            a = na;
            b = nb;
            cost = next;
            lambda = std::max(lambda * 0.1, 1e-12);
            if (done) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    return {a, b};
}

Eigen::MatrixXd random_layout(Eigen::Index n, Eigen::Index dim, std::uint64_t seed)
{
    Rng rng(seed);
    Eigen::MatrixXd out(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index d = 0; d < dim; ++d) out(i, d) = uniform(rng, -10.0, 10.0);
    return out;
}

bool spectral_layout(const SparseMatrix& graph, Eigen::Index dim, std::uint64_t seed, Eigen::MatrixXd& out)
{
    const Eigen::Index n = graph.rows();
    Eigen::Index count = 0;
    const auto comp = components(graph, count);
    Eigen::MatrixXd layout = Eigen::MatrixXd::Zero(n, dim);

    for (Eigen::Index c = 0; c < count; ++c) {
        std::vector<Eigen::Index> members;
        for (Eigen::Index i = 0; i < n; ++i)
            if (comp[static_cast<std::size_t>(i)] == c) members.push_back(i);
        const auto size = static_cast<Eigen::Index>(members.size());
        Eigen::MatrixXd local;
        if (size > dim + 1) {
            std::vector<Eigen::Index> position(static_cast<std::size_t>(n), -1);
            for (Eigen::Index r = 0; r < size; ++r) position[static_cast<std::size_t>(members[static_cast<std::size_t>(r)])] = r;
            std::vector<Eigen::Triplet<double>> triplets;
            for (Eigen::Index r = 0; r < size; ++r)
                for (SparseMatrix::InnerIterator it(graph, members[static_cast<std::size_t>(r)]); it; ++it)
                    triplets.emplace_back(r, position[static_cast<std::size_t>(it.col())], it.value());
            SparseMatrix sub(size, size);
            sub.setFromTriplets(triplets.begin(), triplets.end());
            if (!laplacian_eigenvectors(sub, dim, derive_seed(seed, 0, static_cast<std::uint64_t>(c)), local)) {
                return false;
            }
        } else {
            local = random_layout(size, dim, derive_seed(seed, 1, static_cast<std::uint64_t>(c)));
        }
        const double scale = local.cwiseAbs().maxCoeff();
        if (scale > 0.0) local /= scale;
        Eigen::RowVectorXd offset = Eigen::RowVectorXd::Zero(dim);
        if (count > 1) {
            // components on a circle (or a line in one dimension), well apart
            const double angle = 6.283185307179586 * static_cast<double>(c) / static_cast<double>(count);
            const double radius = 2.0 * static_cast<double>(count);
            offset[0] = radius * std::cos(angle);
            if (dim > 1) offset[1] = radius * std::sin(angle);
        }
        for (Eigen::Index r = 0; r < size; ++r) layout.row(members[static_cast<std::size_t>(r)]) = local.row(r) + offset;
    }
    const double scale = layout.cwiseAbs().maxCoeff();
    if (!layout.allFinite() || scale <= 0.0) return false;
    out = layout * (10.0 / scale);
    return true;
}

Eigen::MatrixXd optimize_layout(const SparseMatrix& graph, Eigen::MatrixXd embedding, const UmapConfig& config,
                                double a, double b)
{
    const Eigen::Index n = graph.rows();
    const Eigen::Index dim = embedding.cols();
    const int epochs = std::max(1, config.epochs);

    double w_max = 0.0;
    for (Eigen::Index i = 0; i < graph.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(graph, i); it; ++it) w_max = std::max(w_max, it.value());
    if (w_max <= 0.0) return embedding;

    // edges too weak to be sampled even once are dropped
    std::vector<Eigen::Index> head;
    std::vector<Eigen::Index> tail;
    std::vector<double> epochs_per_sample;
    for (Eigen::Index i = 0; i < graph.outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(graph, i); it; ++it) {
            if (it.value() < w_max / epochs) continue;
            head.push_back(i);
            tail.push_back(it.col());
            epochs_per_sample.push_back(w_max / it.value());
        }
    }
    const std::size_t edges = head.size();
    const double neg_rate = std::max(1, config.negative_sample_rate);
    std::vector<double> epochs_per_negative(edges);
    std::vector<double> next_sample(epochs_per_sample);
    std::vector<double> next_negative(edges);
    for (std::size_t e = 0; e < edges; ++e) {
        epochs_per_negative[e] = epochs_per_sample[e] / neg_rate;
        next_negative[e] = epochs_per_negative[e];
    }

    // row-major working copy: each update touches one or two whole rows
    std::vector<double> y(static_cast<std::size_t>(n * dim));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index d = 0; d < dim; ++d) y[static_cast<std::size_t>(i * dim + d)] = embedding(i, d);
    auto row = [&](Eigen::Index i) { return y.data() + i * dim; };
    auto dist2 = [&](const double* p, const double* q) {
        double s = 0.0;
        for (Eigen::Index d = 0; d < dim; ++d) s += (p[d] - q[d]) * (p[d] - q[d]);
        return s;
    };

    Rng rng(derive_seed(config.seed, seed_stream::umap, 2));
    for (int epoch = 0; epoch < epochs; ++epoch) {
        const double alpha = config.learning_rate * (1.0 - static_cast<double>(epoch) / epochs);
        for (std::size_t e = 0; e < edges; ++e) {
            if (next_sample[e] > epoch) continue;
            const Eigen::Index j = head[e];
            double* current = row(j);
            double* other = row(tail[e]);
            double d2 = dist2(current, other);
            double coeff = 0.0;
            if (d2 > 0.0) {
                const double pb = std::exp(b * std::log(d2));  // d2^b; d2^(b-1) = pb / d2
                coeff = -2.0 * a * b * (pb / d2) / (a * pb + 1.0);
            }
            for (Eigen::Index d = 0; d < dim; ++d) {
                const double g = clip(coeff * (current[d] - other[d]));
                current[d] += g * alpha;
                other[d] -= g * alpha;
            }
            next_sample[e] += epochs_per_sample[e];

            const auto negatives = static_cast<int>((epoch - next_negative[e]) / epochs_per_negative[e]);
            for (int p = 0; p < negatives; ++p) {
                const auto k = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
                if (k == j) continue;
                other = row(k);
                d2 = dist2(current, other);
                if (d2 <= 0.0) continue;
                coeff = 2.0 * config.repulsion_strength * b / ((0.001 + d2) * (a * std::exp(b * std::log(d2)) + 1.0));
                for (Eigen::Index d = 0; d < dim; ++d) current[d] += clip(coeff * (current[d] - other[d])) * alpha;
            }
            next_negative[e] += negatives * epochs_per_negative[e];
        }
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index d = 0; d < dim; ++d) embedding(i, d) = y[static_cast<std::size_t>(i * dim + d)];
    return embedding;
}

}  // namespace actc
