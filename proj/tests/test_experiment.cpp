#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "repunlearn/experiment.hpp"
#include "repunlearn/json_io.hpp"
#include "repunlearn/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace repunlearn;

namespace {

ExperimentConfig quick_config(const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.dataset.seed = 1;
    cfg.dataset.n_per_class = 60;
    cfg.dataset.test_n_per_class = 60;
    cfg.hidden_dims = {16};
    cfg.training.epochs = 15;
    cfg.training.batch_size = 64;
    cfg.training.seed = 7;
    cfg.finetune_epochs = 3;
    cfg.unlearn.max_epochs = 10;
    cfg.unlearn.batch_retain = 32;
    cfg.unlearn.batch_forget = 32;
    cfg.unlearn.batch_reference = 32;
    cfg.unlearn.seed = 99;
    cfg.mia_thresholds = 21;
    cfg.seeds = {0};
    cfg.output_dir = out_dir;
    return cfg;
}

// Drops the timing columns (unlearn_s, retrain_s, speedup) from a report CSV.
std::string strip_timing_columns(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        std::vector<std::string> row;
        while (std::getline(cells, cell, ',')) row.push_back(cell);
        for (std::size_t i = 0; i + 3 < row.size(); ++i) {
            if (i > 0) out << ",";
            out << row[i];
        }
        out << "\n";
    }
    return out.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config: parse, serialize, reparse round-trips to an equal value") {
    const ExperimentConfig cfg = quick_config("cfg_out");
    const std::string text = serialize_config(cfg);
    const ExperimentConfig back = parse_config(text);
    CHECK(config_equal(cfg, back));
    CHECK(serialize_config(back) == text);
}

TEST_CASE("config: rejects bad fields") {
    CHECK_THROWS(parse_config("{\"dataset\":{},\"model\":{},\"unlearn\":{\"regime\":\"x\"}}"));
    CHECK_THROWS(parse_config("not json"));
    ExperimentConfig cfg = quick_config("x");
    std::string text = serialize_config(cfg);
    const auto pos = text.find("\"seeds\":[0]");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 11, "\"seeds\":[]");
    CHECK_THROWS_AS((void)parse_config(text), std::invalid_argument);
}

TEST_CASE("gen-data: byte-identical across reruns, documented header") {
    TempDir dir("repunlearn_gen_test");
    ExperimentConfig cfg = quick_config((dir.path / "a").string());
    std::string train_a;
    write_toy_csvs(cfg, &train_a);
    cfg.output_dir = (dir.path / "b").string();
    std::string train_b;
    write_toy_csvs(cfg, &train_b);
    const std::string a = read_text_file(train_a);
    const std::string b = read_text_file(train_b);
    CHECK(a == b);
    CHECK(a.substr(0, a.find('\n')) == "f0,f1,f2,f3,f4,f5,f6,f7,f8,f9,label");
    CHECK(std::count(a.begin(), a.end(), '\n') == 361);  // header + 6 * 60 rows
}

TEST_CASE("run_experiment: emits the four method rows and the expected artifacts") {
    TempDir dir("repunlearn_run_test");
    const ExperimentConfig cfg = quick_config(dir.path.string());
    const RunOutput out = run_experiment(cfg);
    REQUIRE(out.per_seed.size() == 1);
    REQUIRE(out.per_seed[0].reports.size() == 4);
    CHECK(out.per_seed[0].reports[0].method == "original");
    CHECK(out.per_seed[0].reports[1].method == "retrain");
    CHECK(out.per_seed[0].reports[2].method == "finetune");
    CHECK(out.per_seed[0].reports[3].method == "rep_unl");
    for (const auto& r : out.per_seed[0].reports) {
        CHECK(r.retain_accuracy >= 0.0);
        CHECK(r.retain_accuracy <= 100.0);
        CHECK(r.mia_accuracy >= 50.0);
        CHECK(r.test_ce >= 0.0);
    }
    CHECK(fs::exists(dir.path / "report.csv"));
    CHECK(fs::exists(dir.path / "report_aggregate.csv"));
    CHECK(fs::exists(dir.path / "model_seed0.json"));
    CHECK(fs::exists(dir.path / "retrain_seed0.json"));
    CHECK(fs::exists(dir.path / "finetune_seed0.json"));
    CHECK(fs::exists(dir.path / "transformation_seed0.json"));
    const std::string csv = read_text_file((dir.path / "report.csv").string());
    CHECK(csv.substr(0, csv.find('\n')) == eval_report_csv_header());
}

TEST_CASE("run_experiment: multi-seed aggregate carries populated std columns") {
    TempDir dir("repunlearn_agg_test");
    ExperimentConfig cfg = quick_config(dir.path.string());
    cfg.seeds = {0, 1, 2};
    (void)run_experiment(cfg);
    std::istringstream in(read_text_file((dir.path / "report_aggregate.csv").string()));
    std::string header;
    std::getline(in, header);
    CHECK(header.find("retain_acc_mean,retain_acc_std") != std::string::npos);
    std::string line;
    bool some_spread = false;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        std::vector<std::string> row;
        while (std::getline(cells, cell, ',')) row.push_back(cell);
        REQUIRE(row.size() == 12);
        // retain_acc_std column; seeds differ, so some method shows spread.
        if (std::stod(row[2]) > 0.0) some_spread = true;
    }
    CHECK(some_spread);
}

TEST_CASE("pipeline: transformation dimension must match the representation") {
    Rng rng(77);
    const FeedForwardNet net = init_net({4, 8, 2, 3}, rng);
    const Transformation wrong = init_transformation(3, 0, {}, rng);
    Pipeline p{&net, &wrong};
    Matrix x(2, 4);
    CHECK_THROWS_AS((void)predict_pipeline(p, x), std::invalid_argument);
}

TEST_CASE("run_experiment: byte-identical outside the timing columns") {
    TempDir dir("repunlearn_det_test");
    ExperimentConfig cfg = quick_config((dir.path / "r1").string());
    cfg.seeds = {0, 1};
    const RunOutput first = run_experiment(cfg);
    cfg.output_dir = (dir.path / "r2").string();
    const RunOutput second = run_experiment(cfg);

    CHECK(strip_timing_columns(read_text_file(first.report_csv_path)) ==
          strip_timing_columns(read_text_file(second.report_csv_path)));
    CHECK(strip_timing_columns(read_text_file(first.aggregate_csv_path)) ==
          strip_timing_columns(read_text_file(second.aggregate_csv_path)));
    for (const std::string name :
         {"model_seed0.json", "retrain_seed0.json", "finetune_seed0.json",
          "transformation_seed0.json", "model_seed1.json", "transformation_seed1.json"}) {
        CHECK(read_text_file((fs::path(cfg.output_dir) / name).string()) ==
              read_text_file((dir.path / "r1" / name).string()));
    }
}

TEST_CASE("run_experiment: zero-shot regime touches only forget rows after training") {
    TempDir dir("repunlearn_zs_test");
    ExperimentConfig cfg = quick_config(dir.path.string());
    cfg.regime = UnlearnRegime::ZeroShot;
    cfg.unlearn.depth = 1;
    cfg.unlearn.hidden_width = 16;
    const RunOutput out = run_experiment(cfg);
    const auto& sr = out.per_seed[0];
    CHECK(!sr.unlearn_accessed_rows.empty());
    std::set<std::size_t> forget(sr.split.forget_indices.begin(), sr.split.forget_indices.end());
    for (std::size_t row : sr.unlearn_accessed_rows) {
        CHECK(forget.count(row) == 1);
    }
    CHECK(out.per_seed[0].reports[3].method == "rep_unl_zs");
}

TEST_CASE("run_experiment: random mode splits and evaluates over train subsets") {
    TempDir dir("repunlearn_rand_test");
    ExperimentConfig cfg = quick_config(dir.path.string());
    cfg.mode = UnlearnMode::Random;
    cfg.forget_fraction = 0.1;
    const RunOutput out = run_experiment(cfg);
    CHECK(out.per_seed[0].split.forget_total == 36);  // round(0.1 * 360)
    CHECK(out.per_seed[0].split.mode == SplitMode::Random);
}

TEST_CASE("sweep: degenerate 1x1 grid reproduces the run cell") {
    TempDir dir("repunlearn_sweep1_test");
    ExperimentConfig cfg = quick_config((dir.path / "run").string());
    const RunOutput run = run_experiment(cfg);
    const EvalReport& cell = run.per_seed[0].reports[3];

    cfg.output_dir = (dir.path / "sweep").string();
    SweepGrid grid;
    grid.betas = {cfg.unlearn.beta};
    grid.depths = {cfg.unlearn.depth};
    const std::string path = run_sweep(cfg, grid);
    const std::string csv = read_text_file(path);

    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "beta,depth,seed,metric,value");
    std::map<std::string, double> values;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string beta, depth, seed, metric, value;
        std::getline(cells, beta, ',');
        std::getline(cells, depth, ',');
        std::getline(cells, seed, ',');
        std::getline(cells, metric, ',');
        std::getline(cells, value, ',');
        values[metric] = std::stod(value);
    }
    CHECK(values.at("retain_acc") == cell.retain_accuracy);
    CHECK(values.at("forget_acc") == cell.forget_accuracy);
    CHECK(values.at("mia_acc") == cell.mia_accuracy);
    CHECK(values.at("test_ce") == cell.test_ce);
}

TEST_CASE("sweep: parallel jobs produce the identical csv") {
    TempDir dir("repunlearn_sweepj_test");
    ExperimentConfig cfg = quick_config((dir.path / "s1").string());
    cfg.seeds = {0, 1, 2};
    cfg.unlearn.max_epochs = 5;
    SweepGrid grid;
    grid.betas = {1e-3, 1e-2};
    grid.depths = {0, 1};
    const std::string p1 = run_sweep(cfg, grid, 1);
    cfg.output_dir = (dir.path / "s2").string();
    const std::string p2 = run_sweep(cfg, grid, 3);
    CHECK(read_text_file(p1) == read_text_file(p2));
    // 2 betas x 2 depths x 3 seeds x 4 metrics rows + header.
    const std::string csv = read_text_file(p1);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 49);
}

TEST_CASE("verify_bounds: deterministic csv, empty request keeps the header") {
    TempDir dir("repunlearn_bounds_test");
    const std::string p1 = (dir.path / "b1.csv").string();
    const std::string p2 = (dir.path / "b2.csv").string();
    const BoundSummary s1 = verify_bounds(5, 4000, 11, p1);
    const BoundSummary s2 = verify_bounds(5, 4000, 11, p2);
    CHECK(s1.bound_passes == s2.bound_passes);
    CHECK(read_text_file(p1) == read_text_file(p2));
    CHECK(s1.reports.size() == 25);

    const std::string p3 = (dir.path / "b3.csv").string();
    const BoundSummary s3 = verify_bounds(0, 4000, 11, p3);
    CHECK(s3.instances == 0);
    CHECK(read_text_file(p3) == "instance_seed,quantity,estimate,stderr,bound,margin,verdict\n");
}

TEST_CASE("plot: trained representations form distinct clusters") {
    MixtureConfig dcfg;
    dcfg.seed = 1;
    const ToyMixture mix = generate_toy_mixture(dcfg);
    TrainConfig tc;
    tc.epochs = 100;
    tc.seed = 7;
    const FeedForwardNet net = train_classifier(tc, mix.train, {10, 32, 2, 6});
    Pipeline p{&net, nullptr};

    const Matrix z = pipeline_representations(p, mix.test.features);
    CHECK(oracles::silhouette_score(z, mix.test.labels, 6) > 0.5);

    const std::string svg = representation_scatter_svg(p, mix.test, {0});
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(svg.find("<path") != std::string::npos);  // forget-class star markers
    CHECK(svg.find("class 0 (forget)") != std::string::npos);

    LabeledDataset empty;
    empty.class_counts = {};
    CHECK_THROWS_AS((void)representation_scatter_svg(p, empty, {}), std::invalid_argument);
}

TEST_CASE("plot: unlearning pulls forget points toward the retain centroids") {
    MixtureConfig dcfg;
    dcfg.seed = 1;
    const ToyMixture mix = generate_toy_mixture(dcfg);
    TrainConfig tc;
    tc.epochs = 40;
    tc.seed = 7;
    const FeedForwardNet net = train_classifier(tc, mix.train, {10, 32, 2, 6});
    const UnlearnSplit split = split_class_unlearn(mix.train, {0});

    UnlearnConfig ucfg;
    ucfg.beta = 1e-2;
    ucfg.depth = 2;
    ucfg.hidden_width = 32;
    ucfg.max_epochs = 200;
    ucfg.seed = 5;
    const UnlearnResult res = unlearn_standard(net, mix.train, split, ucfg);

    // Oracle: retain-class centroids of the original representations; compare
    // the forget points' mean distance to the nearest centroid before/after.
    const Matrix z0 = representations(net, mix.test.features);
    Matrix centroids(5, 2);
    std::vector<std::size_t> counts(5, 0);
    for (std::size_t i = 0; i < mix.test.size(); ++i) {
        const std::size_t y = mix.test.labels[i];
        if (y == 0) continue;
        centroids(y - 1, 0) += z0(i, 0);
        centroids(y - 1, 1) += z0(i, 1);
        counts[y - 1] += 1;
    }
    for (std::size_t c = 0; c < 5; ++c) {
        centroids(c, 0) /= static_cast<double>(counts[c]);
        centroids(c, 1) /= static_cast<double>(counts[c]);
    }
    auto mean_nearest = [&](const Matrix& z) {
        double total = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < mix.test.size(); ++i) {
            if (mix.test.labels[i] != 0) continue;
            double best = 1e300;
            for (std::size_t c = 0; c < 5; ++c) {
                best = std::min(best, squared_distance(z.row(i), centroids.row(c)));
            }
            total += std::sqrt(best);
            n += 1;
        }
        return total / static_cast<double>(n);
    };
    Pipeline after{&net, &res.transformation};
    const Matrix z1 = pipeline_representations(after, mix.test.features);
    CHECK(mean_nearest(z1) < mean_nearest(z0));
}

#ifdef CLI_BIN_PATH
TEST_CASE("cli binary: exit codes follow stage success") {
    TempDir dir("repunlearn_cli_test");
    const std::string cfg_path = (dir.path / "cfg.json").string();
    ExperimentConfig cfg = quick_config((dir.path / "out").string());
    write_text_file(cfg_path, serialize_config(cfg));

    const std::string good = std::string(CLI_BIN_PATH) + " --config " + cfg_path +
                             " gen-data > /dev/null 2>&1";
    CHECK(std::system(good.c_str()) == 0);

    const std::string bad = std::string(CLI_BIN_PATH) + " --config " + cfg_path +
                            "_missing gen-data > /dev/null 2>&1";
    CHECK(std::system(bad.c_str()) != 0);
}
#endif
