#include "mabsa/config.hpp"
#include "mabsa/dataset_io.hpp"
#include "mabsa/errors.hpp"
#include "mabsa/pipeline.hpp"
#include "mabsa/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace mabsa;

namespace {

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
}

synth::Splits load_splits(const fs::path& dir)
{
    synth::Splits s;
    s.train = load_dataset(dir / "train.jsonl");
    s.dev = load_dataset(dir / "dev.jsonl");
    s.test = load_dataset(dir / "test.jsonl");
    return s;
}

pipeline::RunConfig base_config(const std::string& path)
{
    return path.empty() ? pipeline::RunConfig{} : config::load_run_config(path);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multimodal aspect sentiment toolkit: synthetic data, curriculum training, evaluation"};
    app.require_subcommand(1);

    std::string config_path, out_path, data_path, params_path, task_name = "JMASA", mode;
    std::optional<double> alpha, lambda_init;
    std::optional<std::size_t> T;
    std::optional<std::uint64_t> seed;
    std::vector<double> alphas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<std::uint64_t> seeds{1, 2};

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    synth_cmd->add_option("--config", config_path, "synth config JSON");
    synth_cmd->add_option("--out", out_path, "output directory")->required();

    auto* train_cmd = app.add_subcommand("train", "train one model and write trace/metrics/params");
    train_cmd->add_option("--config", config_path, "run config JSON");
    train_cmd->add_option("--data", data_path, "directory with train/dev/test.jsonl");
    train_cmd->add_option("--out", out_path, "output directory");
    train_cmd->add_option("--mode", mode, "hcd | none | antihcd | static-d_s-only | dynamic-d_l-only");
    train_cmd->add_option("--alpha", alpha, "composite difficulty weight on d_l");
    train_cmd->add_option("--lambda-init", lambda_init, "initial competence");
    train_cmd->add_option("--T", T, "epochs until full competence");
    train_cmd->add_option("--seed", seed, "model and shuffling seed");

    auto* eval_cmd = app.add_subcommand("eval", "score saved parameters on a dataset file");
    eval_cmd->add_option("--params", params_path, "params.json from train")->required();
    eval_cmd->add_option("--data", data_path, "dataset JSONL file")->required();
    eval_cmd->add_option("--task", task_name, "JMASA | MATE | MASC");

    auto* ablate_cmd = app.add_subcommand("ablate-alpha", "grid of alpha x seed runs");
    ablate_cmd->add_option("--config", config_path, "run config JSON");
    ablate_cmd->add_option("--data", data_path, "directory with train/dev/test.jsonl");
    ablate_cmd->add_option("--alphas", alphas, "comma-separated alphas")->delimiter(',');
    ablate_cmd->add_option("--seeds", seeds, "comma-separated seeds")->delimiter(',');
    ablate_cmd->add_option("--out", out_path, "CSV file (default stdout)");

    auto* trace_cmd = app.add_subcommand("trace", "re-emit a run's epoch trace as CSV");
    std::string run_path;
    trace_cmd->add_option("--run", run_path, "run directory or trace.jsonl")->required();
    trace_cmd->add_option("--out", out_path, "CSV file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth_cmd) {
            const auto cfg = config_path.empty() ? synth::SynthConfig{} : config::load_synth_config(config_path);
            cfg.validate();
            synth::write_splits(synth::generate_dataset(cfg), cfg, out_path);
        } else if (*train_cmd) {
            auto cfg = base_config(config_path);
            if (!data_path.empty()) cfg.data_dir = data_path;
            if (!out_path.empty()) cfg.out_dir = out_path;
            if (!mode.empty()) cfg.mode = pipeline::mode_from_string(mode);
            if (alpha) cfg.alpha = *alpha;
            if (lambda_init) cfg.schedule.lambda_init = *lambda_init;
            if (T) cfg.schedule.T = *T;
            if (seed) cfg.model.seed = *seed;
            cfg.validate_paths();

            const auto data = load_splits(cfg.data_dir);
            const auto result = pipeline::run_training(cfg, data);
            const fs::path out(cfg.out_dir);
            fs::create_directories(out);
            write_text(out / "config.json", config::to_json(cfg).dump(2) + "\n");
            write_text(out / "trace.csv", pipeline::trace_csv(result.trace));
            write_text(out / "trace.jsonl", pipeline::trace_jsonl(result.trace));
            write_text(out / "metrics.jsonl", pipeline::metrics_jsonl(result.metrics));
            auto model = result.model;
            config::save_model(model, out / "params.json");
            std::cout << pipeline::metrics_jsonl(result.metrics);
        } else if (*eval_cmd) {
            auto model = config::load_model(params_path);
            const auto data = load_dataset(data_path);
            const auto task = metrics::task_from_string(task_name);
            std::cout << pipeline::metrics_json(pipeline::evaluate_model(model, data, task),
                                                fs::path(data_path).stem().string())
                      << '\n';
        } else if (*ablate_cmd) {
            auto cfg = base_config(config_path);
            if (!data_path.empty()) cfg.data_dir = data_path;
            if (cfg.data_dir.empty()) {
                throw ContractError("ablate-alpha needs a data directory (--data or config 'data')");
            }
            cfg.validate();
            const auto rows = pipeline::run_alpha_ablation(cfg, load_splits(cfg.data_dir), alphas, seeds);
            const auto csv = pipeline::ablation_csv(rows);
            if (out_path.empty()) {
                std::cout << csv;
            } else {
                write_text(out_path, csv);
            }
        } else if (*trace_cmd) {
            fs::path src(run_path);
            if (fs::is_directory(src)) {
                src /= "trace.jsonl";
            }
            std::ifstream in(src, std::ios::binary);
            if (!in) {
                throw IoError("cannot open " + src.string());
            }
            const auto csv = pipeline::trace_csv(pipeline::parse_trace_jsonl(in));
            if (out_path.empty()) {
                std::cout << csv;
            } else {
                write_text(out_path, csv);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
