#include "repunlearn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "repunlearn/json_io.hpp"
#include "repunlearn/log.hpp"

namespace fs = std::filesystem;

namespace repunlearn {

std::vector<std::size_t> model_layer_dims(const ExperimentConfig& cfg) {
    std::vector<std::size_t> dims;
    dims.push_back(cfg.dataset.dim);
    dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
    dims.push_back(cfg.representation_dim);
    dims.push_back(cfg.dataset.num_classes);
    return dims;
}

namespace {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (j.contains(key)) return j.at(key).get<T>();
    return fallback;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    ExperimentConfig cfg;

    const auto& d = j.at("dataset");
    cfg.dataset.num_classes = get_or<std::size_t>(d, "classes", 6);
    cfg.dataset.dim = get_or<std::size_t>(d, "dim", 10);
    cfg.dataset.radius = get_or<double>(d, "radius", 5.0);
    cfg.dataset.mean_noise_std = get_or<double>(d, "mean_noise_std", 0.5);
    cfg.dataset.sample_std = get_or<double>(d, "sample_std", 1.0);
    cfg.dataset.n_per_class = get_or<std::size_t>(d, "n_per_class", 250);
    cfg.dataset.test_n_per_class =
        get_or<std::size_t>(d, "test_n_per_class", cfg.dataset.n_per_class);
    cfg.dataset.seed = get_or<std::uint64_t>(d, "seed", 1);

    const auto& m = j.at("model");
    cfg.hidden_dims = get_or<std::vector<std::size_t>>(m, "hidden_dims", {32});
    cfg.representation_dim = get_or<std::size_t>(m, "representation_dim", 2);
    cfg.training.epochs = get_or<std::size_t>(m, "epochs", 100);
    cfg.training.batch_size = get_or<std::size_t>(m, "batch_size", 128);
    cfg.training.learning_rate = get_or<double>(m, "learning_rate", 1e-3);
    cfg.training.weight_decay = get_or<double>(m, "weight_decay", 5e-4);
    cfg.training.optimizer = get_or<std::string>(m, "optimizer", "adam");
    cfg.training.seed = get_or<std::uint64_t>(m, "seed", 7);

    if (j.contains("finetune")) {
        const auto& ft = j.at("finetune");
        cfg.finetune_epochs = get_or<std::size_t>(ft, "epochs", 10);
        cfg.finetune_learning_rate = get_or<double>(ft, "learning_rate", 1e-3);
    }

    const auto& u = j.at("unlearn");
    const std::string regime = get_or<std::string>(u, "regime", "standard");
    if (regime == "standard") {
        cfg.regime = UnlearnRegime::Standard;
    } else if (regime == "zero_shot") {
        cfg.regime = UnlearnRegime::ZeroShot;
    } else {
        throw std::invalid_argument("config: unknown regime " + regime);
    }
    const std::string mode = get_or<std::string>(u, "mode", "class");
    if (mode == "class") {
        cfg.mode = UnlearnMode::Class;
    } else if (mode == "random") {
        cfg.mode = UnlearnMode::Random;
    } else {
        throw std::invalid_argument("config: unknown mode " + mode);
    }
    if (u.contains("forget_classes")) {
        cfg.forget_classes.clear();
        for (const auto& c : u.at("forget_classes")) {
            cfg.forget_classes.insert(c.get<std::size_t>());
        }
    }
    cfg.forget_fraction = get_or<double>(u, "fraction", 0.1);
    cfg.unlearn.beta = get_or<double>(u, "beta", 1e-3);
    cfg.unlearn.depth = get_or<std::size_t>(u, "depth", 0);
    cfg.unlearn.hidden_width = get_or<std::size_t>(u, "hidden_width", 32);
    cfg.unlearn.learning_rate = get_or<double>(u, "learning_rate", 1e-3);
    cfg.unlearn.batch_retain = get_or<std::size_t>(u, "batch_retain", 64);
    cfg.unlearn.batch_forget = get_or<std::size_t>(u, "batch_forget", 64);
    cfg.unlearn.batch_reference = get_or<std::size_t>(u, "batch_reference", 64);
    cfg.unlearn.max_epochs = get_or<std::size_t>(u, "max_epochs", 200);
    cfg.unlearn.tolerance = get_or<double>(u, "tolerance", 1e-5);
    cfg.unlearn.seed = get_or<std::uint64_t>(u, "seed", 99);

    if (j.contains("eval")) {
        const auto& e = j.at("eval");
        cfg.mia_thresholds = get_or<std::size_t>(e, "mia_thresholds", 101);
        cfg.seeds = get_or<std::vector<std::uint64_t>>(e, "seeds", {0});
    }
    cfg.output_dir = get_or<std::string>(j, "output_dir", "out");

    if (cfg.seeds.empty()) throw std::invalid_argument("config: seeds must be nonempty");
    validate_config(cfg.dataset);
    validate_unlearn_config(cfg.unlearn);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    return parse_config(read_text_file(path));
}

std::string serialize_config(const ExperimentConfig& cfg) {
    JsonWriter w;
    w.begin_object();
    w.key("dataset").begin_object();
    w.key("classes").value_uint(cfg.dataset.num_classes);
    w.key("dim").value_uint(cfg.dataset.dim);
    w.key("radius").value(cfg.dataset.radius);
    w.key("mean_noise_std").value(cfg.dataset.mean_noise_std);
    w.key("sample_std").value(cfg.dataset.sample_std);
    w.key("n_per_class").value_uint(cfg.dataset.n_per_class);
    w.key("test_n_per_class").value_uint(cfg.dataset.test_n_per_class);
    w.key("seed").value_uint(cfg.dataset.seed);
    w.end_object();
    w.key("model").begin_object();
    w.key("hidden_dims").value_array(std::span<const std::size_t>(cfg.hidden_dims));
    w.key("representation_dim").value_uint(cfg.representation_dim);
    w.key("epochs").value_uint(cfg.training.epochs);
    w.key("batch_size").value_uint(cfg.training.batch_size);
    w.key("learning_rate").value(cfg.training.learning_rate);
    w.key("weight_decay").value(cfg.training.weight_decay);
    w.key("optimizer").value(cfg.training.optimizer);
    w.key("seed").value_uint(cfg.training.seed);
    w.end_object();
    w.key("finetune").begin_object();
    w.key("epochs").value_uint(cfg.finetune_epochs);
    w.key("learning_rate").value(cfg.finetune_learning_rate);
    w.end_object();
    w.key("unlearn").begin_object();
    w.key("regime").value(cfg.regime == UnlearnRegime::Standard ? "standard" : "zero_shot");
    w.key("mode").value(cfg.mode == UnlearnMode::Class ? "class" : "random");
    {
        std::vector<std::size_t> fc(cfg.forget_classes.begin(), cfg.forget_classes.end());
        w.key("forget_classes").value_array(std::span<const std::size_t>(fc));
    }
    w.key("fraction").value(cfg.forget_fraction);
    w.key("beta").value(cfg.unlearn.beta);
    w.key("depth").value_uint(cfg.unlearn.depth);
    w.key("hidden_width").value_uint(cfg.unlearn.hidden_width);
    w.key("learning_rate").value(cfg.unlearn.learning_rate);
    w.key("batch_retain").value_uint(cfg.unlearn.batch_retain);
    w.key("batch_forget").value_uint(cfg.unlearn.batch_forget);
    w.key("batch_reference").value_uint(cfg.unlearn.batch_reference);
    w.key("max_epochs").value_uint(cfg.unlearn.max_epochs);
    w.key("tolerance").value(cfg.unlearn.tolerance);
    w.key("seed").value_uint(cfg.unlearn.seed);
    w.end_object();
    w.key("eval").begin_object();
    w.key("mia_thresholds").value_uint(cfg.mia_thresholds);
    {
        std::vector<std::size_t> seeds(cfg.seeds.begin(), cfg.seeds.end());
        w.key("seeds").value_array(std::span<const std::size_t>(seeds));
    }
    w.end_object();
    w.key("output_dir").value(cfg.output_dir);
    w.end_object();
    return w.str() + "\n";
}

bool config_equal(const ExperimentConfig& a, const ExperimentConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

namespace {

std::uint64_t stage_seed(std::uint64_t base, std::uint64_t stage, std::uint64_t run_seed) {
    return derive_seed(derive_seed(base, stage), run_seed);
}

LabeledDataset subset_rows(const LabeledDataset& data, std::span<const std::size_t> idx) {
    LabeledDataset out;
    out.features = take_rows(data.features, idx);
    out.labels.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out.labels[i] = data.labels[idx[i]];
    out.class_counts.assign(data.num_classes(), 0);
    for (std::size_t y : out.labels) out.class_counts[y] += 1;
    return out;
}

UnlearnSplit make_split(const ExperimentConfig& cfg, const LabeledDataset& train,
                        std::uint64_t run_seed) {
    if (cfg.mode == UnlearnMode::Class) {
        return split_class_unlearn(train, cfg.forget_classes);
    }
    Rng rng(stage_seed(cfg.unlearn.seed, 6, run_seed));
    return split_random_unlearn(train, cfg.forget_fraction, rng);
}

struct MethodEval {
    std::string name;
    Pipeline pipeline;
    double unlearn_seconds{0.0};
};

SeedRunResult run_one_seed(const ExperimentConfig& cfg, const ToyMixture& mixture,
                           std::uint64_t run_seed, const std::string& out_dir) {
    const LabeledDataset& train = mixture.train;
    const LabeledDataset& test = mixture.test;
    const std::vector<std::size_t> dims = model_layer_dims(cfg);

    SeedRunResult result;
    result.seed = run_seed;
    log::info("run seed ", run_seed, ": training original model");

    // 1. Original model.
    TrainConfig tc = cfg.training;
    tc.seed = stage_seed(cfg.training.seed, 1, run_seed);
    FeedForwardNet net;
    try {
        net = train_classifier(tc, train, dims);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage train: ") + e.what());
    }

    // 2. Split and retain/forget materializations.
    result.split = make_split(cfg, train, run_seed);
    const LabeledDataset retain_data = subset_rows(train, result.split.retain_indices);
    const LabeledDataset forget_data = subset_rows(train, result.split.forget_indices);

    // 3. Retraining baseline.
    TrainConfig rc = cfg.training;
    rc.seed = stage_seed(cfg.training.seed, 2, run_seed);
    FeedForwardNet retrain_net;
    double retrain_seconds = 0.0;
    try {
        auto [trained, secs] = timed([&] { return retrain_baseline(rc, retain_data, dims); });
        retrain_net = std::move(trained);
        retrain_seconds = secs;
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage retrain: ") + e.what());
    }

    // 4. Fine-tuning baseline.
    FeedForwardNet finetune_net;
    double finetune_seconds = 0.0;
    try {
        auto [tuned, secs] = timed([&] {
            return fine_tune_baseline(net, retain_data, cfg.finetune_epochs,
                                      cfg.finetune_learning_rate,
                                      stage_seed(cfg.training.seed, 3, run_seed),
                                      cfg.training.weight_decay);
        });
        finetune_net = std::move(tuned);
        finetune_seconds = secs;
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage finetune: ") + e.what());
    }

    // 5. Representation unlearning. Post-training row reads are audited.
    // The seed matches sweep cell 0, so a degenerate 1x1 sweep reproduces
    // this run exactly.
    UnlearnConfig uc = cfg.unlearn;
    uc.seed = derive_seed(stage_seed(cfg.unlearn.seed, 4, run_seed), 0);
    AccessLog access;
    UnlearnResult unlearned;
    double unlearn_seconds = 0.0;
    try {
        if (cfg.regime == UnlearnRegime::Standard) {
            auto [res, secs] =
                timed([&] { return unlearn_standard(net, train, result.split, uc, &access); });
            unlearned = std::move(res);
            unlearn_seconds = secs;
        } else {
            const ZeroShotMetadata meta = make_zero_shot_metadata(net, result.split);
            const Matrix forget_features =
                gather_rows(train, result.split.forget_indices, &access);
            auto [res, secs] =
                timed([&] { return unlearn_zero_shot(net, forget_features, meta, uc); });
            unlearned = std::move(res);
            unlearn_seconds = secs;
        }
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage unlearn: ") + e.what());
    }
    result.unlearn_accessed_rows = access.rows;

    // 6. Artifacts.
    if (!out_dir.empty()) {
        const std::string tag = "_seed" + std::to_string(run_seed) + ".json";
        save_net_json(net, out_dir + "/model" + tag, &tc);
        save_net_json(retrain_net, out_dir + "/retrain" + tag, &rc);
        save_net_json(finetune_net, out_dir + "/finetune" + tag);
        save_transformation_json(unlearned.transformation, out_dir + "/transformation" + tag);
    }

    // 7. Metrics.
    const std::string unl_name =
        cfg.regime == UnlearnRegime::Standard ? "rep_unl" : "rep_unl_zs";
    const std::vector<MethodEval> methods = {
        {"original", Pipeline{&net, nullptr}, 0.0},
        {"retrain", Pipeline{&retrain_net, nullptr}, retrain_seconds},
        {"finetune", Pipeline{&finetune_net, nullptr}, finetune_seconds},
        {unl_name, Pipeline{&net, &unlearned.transformation}, unlearn_seconds},
    };

    std::optional<std::set<std::size_t>> retain_filter;
    std::optional<std::set<std::size_t>> forget_filter;
    if (cfg.mode == UnlearnMode::Class) {
        forget_filter = cfg.forget_classes;
        std::set<std::size_t> retain_classes;
        for (std::size_t c = 0; c < cfg.dataset.num_classes; ++c) {
            if (cfg.forget_classes.count(c) == 0) retain_classes.insert(c);
        }
        retain_filter = std::move(retain_classes);
    }

    try {
        for (const auto& m : methods) {
            EvalReport r;
            r.method = m.name;
            r.seed = run_seed;
            if (cfg.mode == UnlearnMode::Class) {
                // Class unlearning reports test accuracy on retain vs forget classes.
                r.retain_accuracy = accuracy(m.pipeline, test, retain_filter);
                r.forget_accuracy = accuracy(m.pipeline, test, forget_filter);
            } else {
                // Random unlearning reports training-set accuracy on the two row subsets.
                r.retain_accuracy = accuracy(m.pipeline, retain_data);
                r.forget_accuracy = accuracy(m.pipeline, forget_data);
            }
            r.mia_accuracy = membership_inference(m.pipeline, forget_data, test,
                                                  cfg.mia_thresholds,
                                                  stage_seed(cfg.unlearn.seed, 5, run_seed));
            r.test_ce = test_ce_vs_retrain(m.pipeline, retrain_net, test);
            r.unlearn_seconds = m.unlearn_seconds;
            r.retrain_seconds = retrain_seconds;
            r.speedup = m.unlearn_seconds > 0.0 ? retrain_seconds / m.unlearn_seconds : 0.0;
            result.reports.push_back(std::move(r));
        }
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage eval: ") + e.what());
    }
    return result;
}

}  // namespace

RunOutput run_experiment(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    const ToyMixture mixture = generate_toy_mixture(cfg.dataset);

    RunOutput out;
    for (std::uint64_t s : cfg.seeds) {
        out.per_seed.push_back(run_one_seed(cfg, mixture, s, cfg.output_dir));
    }

    // Per-seed rows.
    std::ostringstream csv;
    csv << eval_report_csv_header() << "\n";
    for (const auto& sr : out.per_seed) {
        for (const auto& r : sr.reports) csv << eval_report_csv_row(r) << "\n";
    }
    out.report_csv_path = cfg.output_dir + "/report.csv";
    write_text_file(out.report_csv_path, csv.str());

    // Aggregate mean/std per method over seeds (sample std, 0 for one seed).
    std::ostringstream agg;
    agg << "method,retain_acc_mean,retain_acc_std,forget_acc_mean,forget_acc_std,"
           "mia_acc_mean,mia_acc_std,test_ce_mean,test_ce_std,unlearn_s_mean,retrain_s_mean,"
           "speedup_mean\n";
    std::vector<std::string> method_order;
    for (const auto& r : out.per_seed.front().reports) method_order.push_back(r.method);
    for (const std::string& name : method_order) {
        std::vector<const EvalReport*> rows;
        for (const auto& sr : out.per_seed) {
            for (const auto& r : sr.reports) {
                if (r.method == name) rows.push_back(&r);
            }
        }
        auto mean_std = [&](auto field) {
            double mean = 0.0;
            for (const auto* r : rows) mean += field(*r);
            mean /= static_cast<double>(rows.size());
            double var = 0.0;
            if (rows.size() > 1) {
                for (const auto* r : rows) {
                    var += (field(*r) - mean) * (field(*r) - mean);
                }
                var /= static_cast<double>(rows.size() - 1);
            }
            return std::pair{mean, std::sqrt(var)};
        };
        const auto [ra, ra_s] = mean_std([](const EvalReport& r) { return r.retain_accuracy; });
        const auto [fa, fa_s] = mean_std([](const EvalReport& r) { return r.forget_accuracy; });
        const auto [mi, mi_s] = mean_std([](const EvalReport& r) { return r.mia_accuracy; });
        const auto [ce, ce_s] = mean_std([](const EvalReport& r) { return r.test_ce; });
        const auto [us, us_s] = mean_std([](const EvalReport& r) { return r.unlearn_seconds; });
        const auto [rs, rs_s] = mean_std([](const EvalReport& r) { return r.retrain_seconds; });
        const auto [sp, sp_s] = mean_std([](const EvalReport& r) { return r.speedup; });
        (void)us_s; (void)rs_s; (void)sp_s;
        agg << name << "," << format_double17(ra) << "," << format_double17(ra_s) << ","
            << format_double17(fa) << "," << format_double17(fa_s) << "," << format_double17(mi)
            << "," << format_double17(mi_s) << "," << format_double17(ce) << ","
            << format_double17(ce_s) << "," << format_double17(us) << "," << format_double17(rs)
            << "," << format_double17(sp) << "\n";
    }
    out.aggregate_csv_path = cfg.output_dir + "/report_aggregate.csv";
    write_text_file(out.aggregate_csv_path, agg.str());
    return out;
}

void write_toy_csvs(const ExperimentConfig& cfg, std::string* train_path, std::string* test_path) {
    fs::create_directories(cfg.output_dir);
    const ToyMixture mixture = generate_toy_mixture(cfg.dataset);
    const std::string train_file = cfg.output_dir + "/train.csv";
    const std::string test_file = cfg.output_dir + "/test.csv";
    write_dataset_csv(mixture.train, train_file);
    write_dataset_csv(mixture.test, test_file);
    if (train_path != nullptr) *train_path = train_file;
    if (test_path != nullptr) *test_path = test_file;
}

namespace {

struct SweepCellRow {
    double beta;
    std::size_t depth;
    std::uint64_t seed;
    std::string metric;
    double value;
};

std::vector<SweepCellRow> sweep_one_seed(const ExperimentConfig& cfg, const SweepGrid& grid,
                                         const ToyMixture& mixture, std::uint64_t run_seed) {
    const LabeledDataset& train = mixture.train;
    const LabeledDataset& test = mixture.test;
    const std::vector<std::size_t> dims = model_layer_dims(cfg);

    TrainConfig tc = cfg.training;
    tc.seed = stage_seed(cfg.training.seed, 1, run_seed);
    const FeedForwardNet net = train_classifier(tc, train, dims);

    const UnlearnSplit split = make_split(cfg, train, run_seed);
    const LabeledDataset retain_data = subset_rows(train, split.retain_indices);
    const LabeledDataset forget_data = subset_rows(train, split.forget_indices);

    TrainConfig rc = cfg.training;
    rc.seed = stage_seed(cfg.training.seed, 2, run_seed);
    const FeedForwardNet retrain_net = retrain_baseline(rc, retain_data, dims);

    std::optional<std::set<std::size_t>> retain_filter;
    std::optional<std::set<std::size_t>> forget_filter;
    if (cfg.mode == UnlearnMode::Class) {
        forget_filter = cfg.forget_classes;
        std::set<std::size_t> retain_classes;
        for (std::size_t c = 0; c < cfg.dataset.num_classes; ++c) {
            if (cfg.forget_classes.count(c) == 0) retain_classes.insert(c);
        }
        retain_filter = std::move(retain_classes);
    }

    std::vector<SweepCellRow> rows;
    std::size_t cell_index = 0;
    for (double beta : grid.betas) {
        for (std::size_t depth : grid.depths) {
            UnlearnConfig uc = cfg.unlearn;
            uc.beta = beta;
            uc.depth = depth;
            uc.seed = derive_seed(stage_seed(cfg.unlearn.seed, 4, run_seed), cell_index);
            cell_index += 1;

            UnlearnResult res;
            if (cfg.regime == UnlearnRegime::Standard) {
                res = unlearn_standard(net, train, split, uc);
            } else {
                const ZeroShotMetadata meta = make_zero_shot_metadata(net, split);
                const Matrix forget_features = gather_rows(train, split.forget_indices);
                res = unlearn_zero_shot(net, forget_features, meta, uc);
            }
            const Pipeline p{&net, &res.transformation};

            double retain_acc;
            double forget_acc;
            if (cfg.mode == UnlearnMode::Class) {
                retain_acc = accuracy(p, test, retain_filter);
                forget_acc = accuracy(p, test, forget_filter);
            } else {
                retain_acc = accuracy(p, retain_data);
                forget_acc = accuracy(p, forget_data);
            }
            const double mia = membership_inference(p, forget_data, test, cfg.mia_thresholds,
                                                    stage_seed(cfg.unlearn.seed, 5, run_seed));
            const double ce = test_ce_vs_retrain(p, retrain_net, test);

            rows.push_back({beta, depth, run_seed, "forget_acc", forget_acc});
            rows.push_back({beta, depth, run_seed, "mia_acc", mia});
            rows.push_back({beta, depth, run_seed, "retain_acc", retain_acc});
            rows.push_back({beta, depth, run_seed, "test_ce", ce});
        }
    }
    return rows;
}

}  // namespace

std::string run_sweep(const ExperimentConfig& cfg, const SweepGrid& grid, std::size_t jobs) {
    if (grid.betas.empty() || grid.depths.empty()) {
        throw std::invalid_argument("sweep: grid axes must be nonempty");
    }
    fs::create_directories(cfg.output_dir);
    const ToyMixture mixture = generate_toy_mixture(cfg.dataset);

    std::vector<std::vector<SweepCellRow>> per_seed(cfg.seeds.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
            per_seed[i] = sweep_one_seed(cfg, grid, mixture, cfg.seeds[i]);
        }
    } else {
        // Seeds are independent; bounded fan-out, deterministic assembly.
        for (std::size_t base = 0; base < cfg.seeds.size(); base += jobs) {
            const std::size_t stop = std::min(cfg.seeds.size(), base + jobs);
            std::vector<std::future<std::vector<SweepCellRow>>> futures;
            for (std::size_t i = base; i < stop; ++i) {
                futures.push_back(std::async(std::launch::async, [&, i] {
                    return sweep_one_seed(cfg, grid, mixture, cfg.seeds[i]);
                }));
            }
            for (std::size_t i = base; i < stop; ++i) {
                per_seed[i] = futures[i - base].get();
            }
        }
    }

    std::vector<SweepCellRow> rows;
    for (auto& chunk : per_seed) {
        rows.insert(rows.end(), chunk.begin(), chunk.end());
    }
    std::sort(rows.begin(), rows.end(), [](const SweepCellRow& a, const SweepCellRow& b) {
        if (a.beta != b.beta) return a.beta < b.beta;
        if (a.depth != b.depth) return a.depth < b.depth;
        if (a.seed != b.seed) return a.seed < b.seed;
        return a.metric < b.metric;
    });

    std::ostringstream csv;
    csv << "beta,depth,seed,metric,value\n";
    for (const auto& r : rows) {
        csv << format_double17(r.beta) << "," << r.depth << "," << r.seed << "," << r.metric
            << "," << format_double17(r.value) << "\n";
    }
    const std::string path = cfg.output_dir + "/sweep.csv";
    write_text_file(path, csv.str());
    return path;
}

BoundSummary verify_bounds(std::size_t n_instances, std::size_t n_samples,
                           std::uint64_t base_seed, const std::string& csv_path) {
    BoundSummary summary;
    summary.instances = n_instances;
    for (std::size_t i = 0; i < n_instances; ++i) {
        const std::uint64_t instance_seed = derive_seed(base_seed, i);
        const DiscreteGaussianChannel ch = random_channel(instance_seed);
        Rng mc_rng(derive_seed(instance_seed, 999));
        const std::vector<BoundReport> reports =
            certify_channel(ch, instance_seed, n_samples, mc_rng);
        bool bounds_ok = true;
        bool jensen_ok = true;
        for (const auto& r : reports) {
            if (r.quantity == "jensen_ordering") {
                jensen_ok = r.pass;
            } else if (!r.pass) {
                bounds_ok = false;
            }
        }
        summary.bound_passes += bounds_ok ? 1 : 0;
        summary.jensen_passes += jensen_ok ? 1 : 0;
        summary.reports.insert(summary.reports.end(), reports.begin(), reports.end());
    }
    if (!csv_path.empty()) write_bound_reports_csv(summary.reports, csv_path);
    return summary;
}

}  // namespace repunlearn
