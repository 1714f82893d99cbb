#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "oracles.hpp"
#include "repunlearn/dataset.hpp"
#include "repunlearn/json_io.hpp"

using namespace repunlearn;

namespace {

MixtureConfig default_config(std::uint64_t seed = 1) {
    MixtureConfig cfg;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("toy mixture: defaults give N=1500 with uniform class frequencies") {
    const ToyMixture mix = generate_toy_mixture(default_config());
    CHECK(mix.train.size() == 1500);
    CHECK(mix.test.size() == 1500);
    for (std::size_t c = 0; c < 6; ++c) CHECK(mix.train.class_counts[c] == 250);
    validate_dataset(mix.train);
    validate_dataset(mix.test);
}

TEST_CASE("toy mixture: class 0 mean starts at (radius, 0)") {
    const ToyMixture mix = generate_toy_mixture(default_config());
    CHECK(mix.class_means(0, 0) == 5.0);
    CHECK(std::abs(mix.class_means(0, 1)) < 1e-12);
    // Class 3 sits opposite on the circle.
    CHECK(mix.class_means(3, 0) == doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("toy mixture: per-class sample means concentrate around the class means") {
    const MixtureConfig cfg = default_config(1);
    const ToyMixture mix = generate_toy_mixture(cfg);
    const double bound = 3.0 * cfg.sample_std / std::sqrt(static_cast<double>(cfg.n_per_class));
    for (std::size_t c = 0; c < cfg.num_classes; ++c) {
        std::vector<double> mean(cfg.dim, 0.0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < mix.train.size(); ++i) {
            if (mix.train.labels[i] != c) continue;
            auto row = mix.train.features.row(i);
            for (std::size_t j = 0; j < cfg.dim; ++j) mean[j] += row[j];
            count += 1;
        }
        for (std::size_t j = 0; j < cfg.dim; ++j) {
            mean[j] /= static_cast<double>(count);
            CHECK(std::abs(mean[j] - mix.class_means(c, j)) < bound);
        }
    }
}

TEST_CASE("toy mixture: train and test are distinct, seeds change the data") {
    const ToyMixture a = generate_toy_mixture(default_config(1));
    const ToyMixture b = generate_toy_mixture(default_config(2));
    CHECK(a.train.features.data != a.test.features.data);
    CHECK(a.train.features.data != b.train.features.data);
    const ToyMixture a2 = generate_toy_mixture(default_config(1));
    CHECK(a.train.features.data == a2.train.features.data);
    CHECK(a.test.features.data == a2.test.features.data);
}

TEST_CASE("toy mixture: rejects invalid configs") {
    MixtureConfig cfg = default_config();
    cfg.num_classes = 1;
    CHECK_THROWS_AS((void)generate_toy_mixture(cfg), std::invalid_argument);
    cfg = default_config();
    cfg.sample_std = 0.0;
    CHECK_THROWS_AS((void)generate_toy_mixture(cfg), std::invalid_argument);
    cfg = default_config();
    cfg.dim = 1;
    CHECK_THROWS_AS((void)generate_toy_mixture(cfg), std::invalid_argument);
}

TEST_CASE("split_class_unlearn: counts come straight from the labels") {
    const ToyMixture mix = generate_toy_mixture(default_config());
    const UnlearnSplit s = split_class_unlearn(mix.train, {0});
    validate_split(s);
    CHECK(s.forget_total == 250);
    CHECK(s.retain_total == 1250);
    CHECK(s.forget_class_counts[0] == 250);
    for (std::size_t c = 1; c < 6; ++c) CHECK(s.forget_class_counts[c] == 0);
    // Counting oracle straight over labels.
    std::size_t direct = 0;
    for (std::size_t y : mix.train.labels) direct += (y == 0) ? 1 : 0;
    CHECK(direct == s.forget_total);
}

TEST_CASE("split_class_unlearn: rejects empty and full forget sets") {
    const ToyMixture mix = generate_toy_mixture(default_config());
    CHECK_THROWS_AS((void)split_class_unlearn(mix.train, {}), std::invalid_argument);
    CHECK_THROWS_AS((void)split_class_unlearn(mix.train, {0, 1, 2, 3, 4, 5}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)split_class_unlearn(mix.train, {17}), std::invalid_argument);
}

TEST_CASE("split_random_unlearn: size, determinism, multinomial spread") {
    const ToyMixture mix = generate_toy_mixture(default_config());
    Rng rng(11);
    const UnlearnSplit s = split_random_unlearn(mix.train, 0.10, rng);
    validate_split(s);
    CHECK(s.forget_total == 150);  // round(0.1 * 1500)
    Rng rng2(11);
    const UnlearnSplit s2 = split_random_unlearn(mix.train, 0.10, rng2);
    CHECK(s.forget_indices == s2.forget_indices);
    // Per-class forget counts stay within ~4.5 sigma of the multinomial mean 25.
    for (std::size_t c = 0; c < 6; ++c) {
        CHECK(s.forget_class_counts[c] >= 5);
        CHECK(s.forget_class_counts[c] <= 45);
    }
    Rng rng3(12);
    CHECK_THROWS_AS((void)split_random_unlearn(mix.train, 0.0, rng3), std::invalid_argument);
    CHECK_THROWS_AS((void)split_random_unlearn(mix.train, 1.0, rng3), std::invalid_argument);
}

TEST_CASE("retain_class_prior: zero case, uniform case, exact ratio") {
    const ToyMixture mix = generate_toy_mixture(default_config());
    const UnlearnSplit s = split_class_unlearn(mix.train, {0});
    const auto prior = retain_class_prior(s.total, s.class_counts, s.forget_class_counts);
    CHECK(prior[0] == 0.0);
    for (std::size_t c = 1; c < 6; ++c) CHECK(prior[c] == 0.2);

    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const double fraction = 0.05 + 0.9 * rng.uniform();
        Rng srng(rng.next_u64());
        const UnlearnSplit r = split_random_unlearn(mix.train, fraction, srng);
        const auto p = retain_class_prior(r.total, r.class_counts, r.forget_class_counts);
        double sum = 0.0;
        for (std::size_t c = 0; c < p.size(); ++c) {
            // The subtraction form equals the direct count ratio exactly.
            CHECK(p[c] == static_cast<double>(r.retain_class_counts[c]) /
                              static_cast<double>(r.retain_total));
            CHECK(p[c] >= 0.0);
            sum += p[c];
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("retain_class_prior: rejects impossible counts") {
    const std::vector<std::size_t> counts{10, 10};
    const std::vector<std::size_t> bad{11, 0};
    CHECK_THROWS_AS((void)retain_class_prior(20, counts, bad), std::invalid_argument);
    const std::vector<std::size_t> all{10, 10};
    CHECK_THROWS_AS((void)retain_class_prior(20, counts, all), std::invalid_argument);
}

TEST_CASE("dataset csv: header contract and exact round trip") {
    MixtureConfig cfg = default_config();
    cfg.n_per_class = 5;
    cfg.test_n_per_class = 5;
    const ToyMixture mix = generate_toy_mixture(cfg);
    const std::string path = "test_dataset_roundtrip.csv";
    write_dataset_csv(mix.train, path);

    const std::string text = read_text_file(path);
    CHECK(text.substr(0, text.find('\n')) == "f0,f1,f2,f3,f4,f5,f6,f7,f8,f9,label");
    CHECK(text.find("\r\n") == std::string::npos);

    const LabeledDataset back = read_dataset_csv(path);
    CHECK(back.size() == mix.train.size());
    CHECK(back.labels == mix.train.labels);
    for (std::size_t i = 0; i < back.features.data.size(); ++i) {
        CHECK(back.features.data[i] == mix.train.features.data[i]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("gather_rows: records accessed rows in order") {
    const ToyMixture mix = generate_toy_mixture(default_config());
    AccessLog log;
    const std::vector<std::size_t> idx{5, 2, 999};
    const Matrix got = gather_rows(mix.train, idx, &log);
    CHECK(got.rows == 3);
    CHECK(log.rows == idx);
    CHECK(got(0, 0) == mix.train.features(5, 0));
}
