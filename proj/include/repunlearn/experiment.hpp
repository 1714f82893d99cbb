// Config-driven experiment stages shared by the CLI and the test suites.
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "repunlearn/bounds.hpp"
#include "repunlearn/dataset.hpp"
#include "repunlearn/metrics.hpp"
#include "repunlearn/network.hpp"
#include "repunlearn/unlearn.hpp"

namespace repunlearn {

enum class UnlearnRegime { Standard, ZeroShot };
enum class UnlearnMode { Class, Random };

struct ExperimentConfig {
    MixtureConfig dataset;
    std::vector<std::size_t> hidden_dims{32};
    std::size_t representation_dim{2};
    TrainConfig training;
    std::size_t finetune_epochs{10};
    double finetune_learning_rate{1e-3};
    UnlearnConfig unlearn;
    UnlearnRegime regime{UnlearnRegime::Standard};
    UnlearnMode mode{UnlearnMode::Class};
    std::set<std::size_t> forget_classes{0};
    double forget_fraction{0.1};
    std::size_t mia_thresholds{101};
    std::vector<std::uint64_t> seeds{0};
    std::string output_dir{"out"};
};

std::vector<std::size_t> model_layer_dims(const ExperimentConfig& cfg);

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
// Canonical serialization: fixed key order, 17-significant-digit floats;
// parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

bool config_equal(const ExperimentConfig& a, const ExperimentConfig& b);

// One trained-and-unlearned bundle for a single run seed.
struct SeedRunResult {
    std::uint64_t seed{0};
    std::vector<EvalReport> reports;              // original, retrain, finetune, unlearned
    std::vector<std::size_t> unlearn_accessed_rows;  // dataset rows read after training
    UnlearnSplit split;
};

struct RunOutput {
    std::vector<SeedRunResult> per_seed;
    std::string report_csv_path;
    std::string aggregate_csv_path;
};

// Full protocol: train the original model, run the configured unlearning
// regime plus the retraining and fine-tuning baselines, evaluate everything,
// write one CSV row per (method, seed) plus a mean/std aggregate, and save
// model and transformation artifacts under cfg.output_dir.
RunOutput run_experiment(const ExperimentConfig& cfg);

// gen-data: train/test CSVs under the output dir.
void write_toy_csvs(const ExperimentConfig& cfg, std::string* train_path = nullptr,
                    std::string* test_path = nullptr);

struct SweepGrid {
    std::vector<double> betas{1e-4, 1e-3, 1e-2, 1e-1};
    std::vector<std::size_t> depths{0, 1, 2};
};

// Long-format rows: beta, depth, seed, metric, value. Cells are independent;
// `jobs` seeds run concurrently, output order is fixed regardless.
std::string run_sweep(const ExperimentConfig& cfg, const SweepGrid& grid, std::size_t jobs = 1);

// Bound certification over randomized channel instances.
struct BoundSummary {
    std::size_t instances{0};
    std::size_t bound_passes{0};    // instances where every MI bound held
    std::size_t jensen_passes{0};   // instances where the ordering held
    std::vector<BoundReport> reports;
};

BoundSummary verify_bounds(std::size_t n_instances, std::size_t n_samples,
                           std::uint64_t base_seed, const std::string& csv_path);

}  // namespace repunlearn
