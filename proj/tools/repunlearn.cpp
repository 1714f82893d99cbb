// Experiment harness CLI. Subcommands: gen-data, train, unlearn, sweep,
// eval, verify-bounds, plot-repr, run.
#include <clocale>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "repunlearn/experiment.hpp"
#include "repunlearn/json_io.hpp"
#include "repunlearn/log.hpp"
#include "repunlearn/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace repunlearn;

namespace {

ExperimentConfig load_with_overrides(const std::string& config_path,
                                     const std::optional<std::string>& out_dir,
                                     const std::optional<std::uint64_t>& seed) {
    ExperimentConfig cfg = load_config(config_path);
    if (out_dir.has_value()) cfg.output_dir = *out_dir;
    if (seed.has_value()) cfg.seeds = {*seed};
    return cfg;
}

int cmd_gen_data(const ExperimentConfig& cfg) {
    std::string train_path;
    std::string test_path;
    write_toy_csvs(cfg, &train_path, &test_path);
    std::cout << train_path << "\n" << test_path << "\n";
    return 0;
}

int cmd_train(const ExperimentConfig& cfg) {
    const ToyMixture mixture = generate_toy_mixture(cfg.dataset);
    TrainConfig tc = cfg.training;
    const FeedForwardNet net = train_classifier(tc, mixture.train, model_layer_dims(cfg));
    fs::create_directories(cfg.output_dir);
    const std::string path = cfg.output_dir + "/model.json";
    save_net_json(net, path, &tc);
    Pipeline p{&net, nullptr};
    std::cout << path << "\n";
    std::cout << "train_accuracy=" << accuracy(p, mixture.train) << "\n";
    std::cout << "test_accuracy=" << accuracy(p, mixture.test) << "\n";
    return 0;
}

int cmd_unlearn(const ExperimentConfig& cfg, const std::string& model_path) {
    const ToyMixture mixture = generate_toy_mixture(cfg.dataset);
    FeedForwardNet net;
    if (!model_path.empty()) {
        net = load_net_json(model_path);
    } else {
        net = train_classifier(cfg.training, mixture.train, model_layer_dims(cfg));
    }

    UnlearnSplit split;
    if (cfg.mode == UnlearnMode::Class) {
        split = split_class_unlearn(mixture.train, cfg.forget_classes);
    } else {
        Rng rng(derive_seed(cfg.unlearn.seed, 6));
        split = split_random_unlearn(mixture.train, cfg.forget_fraction, rng);
    }

    UnlearnResult res;
    if (cfg.regime == UnlearnRegime::Standard) {
        res = unlearn_standard(net, mixture.train, split, cfg.unlearn);
    } else {
        const ZeroShotMetadata meta = make_zero_shot_metadata(net, split);
        const Matrix forget_features = gather_rows(mixture.train, split.forget_indices);
        res = unlearn_zero_shot(net, forget_features, meta, cfg.unlearn);
    }
    fs::create_directories(cfg.output_dir);
    const std::string path = cfg.output_dir + "/transformation.json";
    save_transformation_json(res.transformation, path);
    std::cout << path << "\n";
    std::cout << "epochs_run=" << res.epochs_run << " converged=" << (res.converged ? 1 : 0)
              << "\n";
    return 0;
}

int cmd_run(const ExperimentConfig& cfg) {
    const RunOutput out = run_experiment(cfg);
    std::cout << out.report_csv_path << "\n" << out.aggregate_csv_path << "\n";
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const SweepGrid& grid, std::size_t jobs) {
    const std::string path = run_sweep(cfg, grid, jobs);
    std::cout << path << "\n";
    return 0;
}

int cmd_eval(const ExperimentConfig& cfg, const std::string& model_path,
             const std::string& transformation_path, const std::string& retrain_path) {
    const ToyMixture mixture = generate_toy_mixture(cfg.dataset);
    const FeedForwardNet net = load_net_json(model_path);
    Transformation f;
    Pipeline p{&net, nullptr};
    if (!transformation_path.empty()) {
        f = load_transformation_json(transformation_path);
        p.transformation = &f;
    }
    std::cout << "test_accuracy=" << accuracy(p, mixture.test) << "\n";
    if (cfg.mode == UnlearnMode::Class) {
        std::set<std::size_t> retain_classes;
        for (std::size_t c = 0; c < cfg.dataset.num_classes; ++c) {
            if (cfg.forget_classes.count(c) == 0) retain_classes.insert(c);
        }
        std::cout << "retain_class_accuracy=" << accuracy(p, mixture.test, retain_classes)
                  << "\n";
        std::cout << "forget_class_accuracy=" << accuracy(p, mixture.test, cfg.forget_classes)
                  << "\n";
    }
    if (!retrain_path.empty()) {
        const FeedForwardNet retrain_net = load_net_json(retrain_path);
        std::cout << "test_ce_vs_retrain=" << test_ce_vs_retrain(p, retrain_net, mixture.test)
                  << "\n";
    }
    return 0;
}

int cmd_verify_bounds(const ExperimentConfig& cfg, std::size_t instances, std::size_t samples,
                      std::uint64_t seed) {
    fs::create_directories(cfg.output_dir);
    const std::string path = cfg.output_dir + "/bounds.csv";
    const BoundSummary summary = verify_bounds(instances, samples, seed, path);
    std::cout << path << "\n";
    std::cout << "instances=" << summary.instances << " bound_passes=" << summary.bound_passes
              << " jensen_passes=" << summary.jensen_passes << "\n";
    return summary.instances == 0 ||
                   (summary.bound_passes == summary.instances &&
                    summary.jensen_passes == summary.instances)
               ? 0
               : 1;
}

int cmd_plot_repr(const ExperimentConfig& cfg, const std::string& model_path,
                  const std::string& transformation_path, const std::string& out_svg) {
    const ToyMixture mixture = generate_toy_mixture(cfg.dataset);
    FeedForwardNet net;
    if (!model_path.empty()) {
        net = load_net_json(model_path);
    } else {
        net = train_classifier(cfg.training, mixture.train, model_layer_dims(cfg));
    }
    Transformation f;
    Pipeline p{&net, nullptr};
    if (!transformation_path.empty()) {
        f = load_transformation_json(transformation_path);
        p.transformation = &f;
    }
    const std::string path = out_svg.empty() ? cfg.output_dir + "/representation.svg" : out_svg;
    fs::create_directories(fs::path(path).parent_path().empty()
                               ? "."
                               : fs::path(path).parent_path().string());
    write_representation_svg(p, mixture.train,
                             cfg.mode == UnlearnMode::Class ? cfg.forget_classes
                                                            : std::set<std::size_t>{},
                             path);
    std::cout << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    // Number formatting in CSV/JSON artifacts is locale-independent.
    std::setlocale(LC_NUMERIC, "C");

    CLI::App app{"representation unlearning experiment harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed_override;
    std::size_t jobs = 1;
    app.add_option("--config", config_path, "experiment config JSON")->required();
    app.add_option("--out", out_dir, "output directory override");
    app.add_option("--seed", seed_override, "single run seed override");
    app.add_option("--jobs", jobs, "parallel sweep seeds");

    auto* gen = app.add_subcommand("gen-data", "write train/test CSVs");
    auto* train = app.add_subcommand("train", "train the original classifier");
    auto* unlearn = app.add_subcommand("unlearn", "fit a transformation for the configured regime");
    std::string model_path;
    unlearn->add_option("--model", model_path, "model JSON (trains one when absent)");
    auto* run = app.add_subcommand("run", "full protocol: train, unlearn, baselines, evaluate");
    auto* sweep = app.add_subcommand("sweep", "beta x depth grid");
    std::vector<double> sweep_betas{1e-4, 1e-3, 1e-2, 1e-1};
    std::vector<std::size_t> sweep_depths{0, 1, 2};
    sweep->add_option("--betas", sweep_betas, "beta grid values");
    sweep->add_option("--depths", sweep_depths, "depth grid values");
    auto* eval = app.add_subcommand("eval", "evaluate a saved pipeline");
    std::string eval_model;
    std::string eval_transformation;
    std::string eval_retrain;
    eval->add_option("--model", eval_model, "model JSON")->required();
    eval->add_option("--transformation", eval_transformation, "transformation JSON");
    eval->add_option("--retrain", eval_retrain, "retrain-baseline model JSON");
    auto* bounds = app.add_subcommand("verify-bounds", "certify the variational bounds");
    std::size_t bound_instances = 100;
    std::size_t bound_samples = 20000;
    std::uint64_t bound_seed = 2024;
    bounds->add_option("--instances", bound_instances, "number of random instances");
    bounds->add_option("--samples", bound_samples, "Monte Carlo samples per estimate");
    bounds->add_option("--bound-seed", bound_seed, "base seed for instances");
    auto* plot = app.add_subcommand("plot-repr", "scatter SVG of 2-D representations");
    std::string plot_model;
    std::string plot_transformation;
    std::string plot_out;
    plot->add_option("--model", plot_model, "model JSON (trains one when absent)");
    plot->add_option("--transformation", plot_transformation, "transformation JSON");
    plot->add_option("--svg", plot_out, "output SVG path");

    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig cfg = load_with_overrides(config_path, out_dir, seed_override);
        if (gen->parsed()) return cmd_gen_data(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (unlearn->parsed()) return cmd_unlearn(cfg, model_path);
        if (run->parsed()) return cmd_run(cfg);
        if (sweep->parsed()) {
            SweepGrid grid;
            grid.betas = sweep_betas;
            grid.depths = sweep_depths;
            return cmd_sweep(cfg, grid, jobs);
        }
        if (eval->parsed()) return cmd_eval(cfg, eval_model, eval_transformation, eval_retrain);
        if (bounds->parsed()) return cmd_verify_bounds(cfg, bound_instances, bound_samples, bound_seed);
        if (plot->parsed()) return cmd_plot_repr(cfg, plot_model, plot_transformation, plot_out);
    } catch (const std::exception& e) {
        log::error(e.what());
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
