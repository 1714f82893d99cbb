#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "repunlearn/gaussian.hpp"
#include "repunlearn/losses.hpp"

using namespace repunlearn;

namespace {

Transformation identity_map(std::size_t dim) {
    Rng rng(0);
    return init_transformation(dim, 0, {}, rng);
}

Transformation constant_map(std::span<const double> value) {
    Rng rng(0);
    Transformation f = init_transformation(value.size(), 0, {}, rng);
    std::vector<double> params(f.num_params(), 0.0);
    for (std::size_t j = 0; j < value.size(); ++j) {
        params[value.size() * value.size() + j] = value[j];
    }
    f.set_params(params);
    return f;
}

ZeroShotMetadata two_class_meta(const Matrix& prototypes,
                                std::vector<std::size_t> class_counts,
                                std::vector<std::size_t> forget_counts) {
    ZeroShotMetadata meta;
    meta.prototypes = prototypes;
    meta.class_counts = std::move(class_counts);
    meta.forget_class_counts = std::move(forget_counts);
    meta.total = 0;
    meta.forget_total = 0;
    for (std::size_t c : meta.class_counts) meta.total += c;
    for (std::size_t c : meta.forget_class_counts) meta.forget_total += c;
    return meta;
}

}  // namespace

TEST_CASE("retain_loss: identity map gives zero, hand value checks out") {
    Rng rng(1);
    const Matrix z = oracles::random_matrix(16, 2, 3.0, rng);
    CHECK(retain_loss(z, identity_map(2)) == 0.0);

    Matrix single(1, 2);
    single.data = {1.0, 2.0};
    const std::vector<double> zero_target{0.0, 0.0};
    CHECK(retain_loss(single, constant_map(zero_target)) ==
          doctest::Approx(2.5).epsilon(1e-15));

    Matrix empty(0, 2);
    CHECK_THROWS_AS((void)retain_loss(empty, identity_map(2)), std::invalid_argument);
}

TEST_CASE("retain_loss: equals the mean identity-covariance Gaussian KL") {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t b = 1 + rng.below(12);
        const Matrix z = oracles::random_matrix(b, 3, 2.0, rng);
        const Transformation f = oracles::random_transformation(3, rng.below(3), 8, 0.4, rng);
        const Matrix out = apply(f, z);
        double kl_mean = 0.0;
        for (std::size_t i = 0; i < b; ++i) {
            kl_mean += gaussian_kl_identity_cov(out.row(i), z.row(i));
        }
        kl_mean /= static_cast<double>(b);
        const double loss = retain_loss(z, f);
        CHECK(std::abs(loss - kl_mean) <= 1e-13 * std::max(1.0, std::abs(loss)));
    }
}

TEST_CASE("forget_loss: hand value, duplication invariance, constant-map floor") {
    Matrix zf(1, 2);
    zf.data = {0.0, 0.0};
    Matrix zref(2, 2);
    zref.data = {1.0, 0.0, 0.0, 1.0};
    CHECK(forget_loss(zf, zref, identity_map(2)) == doctest::Approx(0.5).epsilon(1e-15));

    // Duplicating the reference batch leaves the value unchanged.
    Matrix doubled(4, 2);
    doubled.data = {1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0};
    CHECK(forget_loss(zf, doubled, identity_map(2)) ==
          doctest::Approx(forget_loss(zf, zref, identity_map(2))).epsilon(1e-14));

    // Mapping every forget row to the reference mean hits the constant-map
    // minimum (1 / 2B) sum_j |z_j - mean|^2.
    Rng rng(3);
    const Matrix big_ref = oracles::random_matrix(20, 2, 2.0, rng);
    const std::vector<double> mean = column_mean(big_ref);
    double floor_value = 0.0;
    for (std::size_t j = 0; j < big_ref.rows; ++j) {
        floor_value += squared_distance(big_ref.row(j), mean);
    }
    floor_value /= 2.0 * static_cast<double>(big_ref.rows);
    const Matrix zf2 = oracles::random_matrix(7, 2, 2.0, rng);
    const double at_mean = forget_loss(zf2, big_ref, constant_map(mean));
    CHECK(at_mean == doctest::Approx(floor_value).epsilon(1e-12));
    // Any other constant target is strictly worse.
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> other = mean;
        other[0] += rng.gaussian(0.0, 1.0);
        other[1] += rng.gaussian(0.0, 1.0);
        CHECK(forget_loss(zf2, big_ref, constant_map(other)) >= at_mean);
    }

    Matrix empty(0, 2);
    CHECK_THROWS_AS((void)forget_loss(empty, zref, identity_map(2)), std::invalid_argument);
    CHECK_THROWS_AS((void)forget_loss(zf, empty, identity_map(2)), std::invalid_argument);
}

TEST_CASE("zs_retain_loss: hand value and fully-forgotten class neutrality") {
    Matrix w(2, 2);
    w.data = {0.0, 0.0, 2.0, 0.0};
    auto meta = two_class_meta(w, {1, 1}, {0, 0});
    const std::vector<double> zero{0.0, 0.0};
    CHECK(zs_retain_loss(meta, constant_map(zero)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(zs_retain_loss(meta, identity_map(2)) == 0.0);

    // Forgetting class 1 entirely removes its contribution no matter where
    // f sends its prototype.
    auto forgotten = two_class_meta(w, {5, 3}, {0, 3});
    const std::vector<double> far{100.0, -50.0};
    Transformation f = constant_map(far);
    const double val = zs_retain_loss(forgotten, f);
    const double expect = 0.5 * squared_distance(w.row(0), std::span<const double>(far));
    CHECK(val == doctest::Approx(expect).epsilon(1e-12));

    auto empty_retain = two_class_meta(w, {2, 2}, {2, 2});
    CHECK_THROWS_AS((void)zs_retain_loss(empty_retain, f), std::invalid_argument);
}

TEST_CASE("zs_forget_loss: hand value, count-scaling and permutation invariance") {
    Matrix w(2, 2);
    w.data = {0.0, 0.0, 2.0, 0.0};
    Matrix zf(1, 2);
    zf.data = {5.0, 5.0};  // irrelevant, mapped to (0, 0)
    const std::vector<double> zero{0.0, 0.0};
    auto meta = two_class_meta(w, {1, 1}, {0, 0});
    CHECK(zs_forget_loss(zf, meta, constant_map(zero)) == doctest::Approx(1.0).epsilon(1e-15));

    // Scaling every class count by the same factor leaves the value unchanged.
    auto scaled = two_class_meta(w, {7, 7}, {0, 0});
    CHECK(zs_forget_loss(zf, scaled, constant_map(zero)) ==
          doctest::Approx(1.0).epsilon(1e-14));

    // Permuting class order leaves the value unchanged.
    Rng rng(4);
    const Matrix protos = oracles::random_matrix(4, 3, 2.0, rng);
    const std::vector<std::size_t> counts{3, 9, 1, 7};
    auto meta4 = two_class_meta(protos, counts, {0, 0, 0, 0});
    const Matrix zf2 = oracles::random_matrix(5, 3, 2.0, rng);
    const Transformation f = oracles::random_transformation(3, 1, 8, 0.3, rng);
    const double base = zs_forget_loss(zf2, meta4, f);
    const std::vector<std::size_t> perm{2, 0, 3, 1};
    Matrix protos_p(4, 3);
    std::vector<std::size_t> counts_p(4);
    for (std::size_t c = 0; c < 4; ++c) {
        counts_p[c] = counts[perm[c]];
        for (std::size_t j = 0; j < 3; ++j) protos_p(c, j) = protos(perm[c], j);
    }
    auto meta_p = two_class_meta(protos_p, counts_p, {0, 0, 0, 0});
    CHECK(zs_forget_loss(zf2, meta_p, f) == doctest::Approx(base).epsilon(1e-13));

    // Quadratic minimization oracle: among constant maps, the count-weighted
    // prototype centroid minimizes the loss.
    std::vector<double> centroid(3, 0.0);
    double total = 0.0;
    for (std::size_t c = 0; c < 4; ++c) total += static_cast<double>(counts[c]);
    for (std::size_t c = 0; c < 4; ++c) {
        for (std::size_t j = 0; j < 3; ++j) {
            centroid[j] += static_cast<double>(counts[c]) / total * protos(c, j);
        }
    }
    const double at_centroid = zs_forget_loss(zf2, meta4, constant_map(centroid));
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> other = centroid;
        for (double& v : other) v += rng.gaussian(0.0, 0.5);
        CHECK(zs_forget_loss(zf2, meta4, constant_map(other)) >= at_centroid);
    }
}

TEST_CASE("total_loss: composition and beta domain") {
    CHECK(total_loss(1.5, 0.0, 1e-3) == 1.5);
    CHECK(total_loss(1.0, 2.0, 1e-4) == doctest::Approx(1.0002).epsilon(1e-15));
    CHECK(total_loss(1.0, 2.0, 1e-3) == doctest::Approx(1.002).epsilon(1e-15));
    CHECK_THROWS_AS((void)total_loss(1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)total_loss(1.0, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("losses: nonnegative on random instances") {
    Rng rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = 1 + rng.below(4);
        const Transformation f = oracles::random_transformation(d, rng.below(3), 6, 0.5, rng);
        const Matrix z = oracles::random_matrix(1 + rng.below(10), d, 2.0, rng);
        const Matrix ref = oracles::random_matrix(1 + rng.below(10), d, 2.0, rng);
        CHECK(retain_loss(z, f) >= 0.0);
        CHECK(forget_loss(z, ref, f) >= 0.0);
        const std::size_t C = 2 + rng.below(3);
        const Matrix protos = oracles::random_matrix(C, d, 2.0, rng);
        std::vector<std::size_t> counts(C);
        std::vector<std::size_t> fcounts(C);
        for (std::size_t c = 0; c < C; ++c) {
            counts[c] = 1 + rng.below(20);
            fcounts[c] = rng.below(counts[c]);
        }
        auto meta = two_class_meta(protos, counts, fcounts);
        CHECK(zs_retain_loss(meta, f) >= 0.0);
        CHECK(zs_forget_loss(z, meta, f) >= 0.0);
    }
}

TEST_CASE("loss gradients: match finite differences across depths") {
    Rng rng(6);
    for (std::size_t depth : {0u, 1u, 2u}) {
        double worst = 0.0;
        for (int point = 0; point < 50; ++point) {
            const Transformation base = oracles::random_transformation(2, depth, 8, 0.4, rng);
            const Matrix z = oracles::random_matrix(4, 2, 2.0, rng);
            const Matrix ref = oracles::random_matrix(5, 2, 2.0, rng);
            const Matrix protos = oracles::random_matrix(3, 2, 2.0, rng);
            auto meta = two_class_meta(protos, {4, 5, 7}, {1, 0, 2});

            const std::vector<double> params = base.flatten_params();

            struct Case {
                std::function<double(const Transformation&)> value;
                std::function<double(const Transformation&, std::vector<double>&)> grad;
            };
            const std::vector<Case> cases = {
                {[&](const Transformation& f) { return retain_loss(z, f); },
                 [&](const Transformation& f, std::vector<double>& g) {
                     return retain_loss_grad(z, f, 1.0, g);
                 }},
                {[&](const Transformation& f) { return forget_loss(z, ref, f); },
                 [&](const Transformation& f, std::vector<double>& g) {
                     return forget_loss_grad(z, ref, f, 1.0, g);
                 }},
                {[&](const Transformation& f) { return zs_retain_loss(meta, f); },
                 [&](const Transformation& f, std::vector<double>& g) {
                     return zs_retain_loss_grad(meta, f, 1.0, g);
                 }},
                {[&](const Transformation& f) { return zs_forget_loss(z, meta, f); },
                 [&](const Transformation& f, std::vector<double>& g) {
                     return zs_forget_loss_grad(z, meta, f, 1.0, g);
                 }},
            };
            for (const auto& c : cases) {
                Transformation probe = base;
                std::vector<double> analytic(probe.num_params(), 0.0);
                (void)c.grad(probe, analytic);
                auto loss_at = [&](const std::vector<double>& q) {
                    Transformation t = base;
                    t.set_params(q);
                    return c.value(t);
                };
                worst = std::max(worst,
                                 oracles::max_relative_fd_error(loss_at, params, analytic));
            }
        }
        CHECK(worst <= 1e-4);
    }
}

TEST_CASE("loss gradients: scale parameter multiplies the gradient") {
    Rng rng(7);
    const Transformation f = oracles::random_transformation(2, 1, 6, 0.3, rng);
    const Matrix z = oracles::random_matrix(4, 2, 2.0, rng);
    std::vector<double> g1(f.num_params(), 0.0);
    std::vector<double> g2(f.num_params(), 0.0);
    (void)retain_loss_grad(z, f, 1.0, g1);
    (void)retain_loss_grad(z, f, 2.5, g2);
    for (std::size_t i = 0; i < g1.size(); ++i) {
        CHECK(g2[i] == doctest::Approx(2.5 * g1[i]).epsilon(1e-12));
    }
}
