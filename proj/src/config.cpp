#include "mabsa/config.hpp"

#include "mabsa/errors.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace mabsa::config {

using nlohmann::json;

namespace {

// Reads typed fields out of one JSON object and remembers which keys were used.
class Fields {
public:
    Fields(const json& j, std::string context) : j_(j), context_(std::move(context))
    {
        if (!j_.is_object()) {
            throw ValidationError(context_ + ": expected a JSON object");
        }
    }

    template <typename T>
    void read(const char* key, T& out)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) {
            return;
        }
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!it->is_boolean()) {
                    throw ValidationError("");
                }
            } else if constexpr (std::is_unsigned_v<T>) {
                if (!it->is_number_unsigned()) {
                    throw ValidationError("");
                }
            } else if constexpr (std::is_integral_v<T>) {
                if (!it->is_number_integer()) {
                    throw ValidationError("");
                }
            }
            out = it->get<T>();
        } catch (const std::exception&) {
            throw ValidationError(context_ + ": field '" + key + "' has the wrong type");
        }
    }

    const json* child(const char* key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                throw ValidationError(context_ + ": unknown key '" + it.key() + "'");
            }
        }
    }

private:
    const json& j_;
    std::string context_;
    std::set<std::string> seen_;
};

} // namespace

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": malformed JSON: " + e.what());
    }
}

json to_json(const synth::SynthConfig& c)
{
    return {{"samples", c.samples},         {"min_tokens", c.min_tokens},
            {"max_tokens", c.max_tokens},   {"blocks", c.blocks},
            {"image_dim", c.image_dim},     {"clip_dim", c.clip_dim},
            {"vocab_size", c.vocab_size},   {"min_aspects", c.min_aspects},
            {"max_aspects", c.max_aspects}, {"sentence_noise", c.sentence_noise},
            {"aspect_noise", c.aspect_noise}, {"seed", c.seed}};
}

synth::SynthConfig synth_config_from_json(const json& j)
{
    synth::SynthConfig c;
    Fields f(j, "synth config");
    f.read("samples", c.samples);
    f.read("min_tokens", c.min_tokens);
    f.read("max_tokens", c.max_tokens);
    f.read("blocks", c.blocks);
    f.read("image_dim", c.image_dim);
    f.read("clip_dim", c.clip_dim);
    f.read("vocab_size", c.vocab_size);
    f.read("min_aspects", c.min_aspects);
    f.read("max_aspects", c.max_aspects);
    f.read("sentence_noise", c.sentence_noise);
    f.read("aspect_noise", c.aspect_noise);
    f.read("seed", c.seed);
    f.finish();
    c.validate();
    return c;
}

synth::SynthConfig load_synth_config(const std::filesystem::path& path)
{
    return synth_config_from_json(read_json_file(path));
}

json to_json(const model::ModelConfig& c)
{
    return {{"hidden", c.hidden},
            {"encoder_layers", c.encoder_layers},
            {"decoder_layers", c.decoder_layers},
            {"gcn_layers", c.gcn_layers},
            {"fusion_aed", c.fusion_aed},
            {"fusion_gcn", c.fusion_gcn},
            {"learning_rate", c.learning_rate},
            {"batch_size", c.batch_size},
            {"epochs", c.epochs},
            {"seed", c.seed},
            {"max_aspects", c.max_aspects},
            {"max_tokens", c.max_tokens},
            {"association_threshold", c.association_threshold},
            {"bypass_aesa", c.bypass_aesa},
            {"grad_clip", c.grad_clip},
            {"train_aspects", c.train_aspects == model::AspectSource::Gold ? "gold" : "nouns"}};
}

model::ModelConfig model_config_from_json(const json& j)
{
    model::ModelConfig c;
    Fields f(j, "model config");
    f.read("hidden", c.hidden);
    f.read("encoder_layers", c.encoder_layers);
    f.read("decoder_layers", c.decoder_layers);
    f.read("gcn_layers", c.gcn_layers);
    f.read("fusion_aed", c.fusion_aed);
    f.read("fusion_gcn", c.fusion_gcn);
    f.read("learning_rate", c.learning_rate);
    f.read("batch_size", c.batch_size);
    f.read("epochs", c.epochs);
    f.read("seed", c.seed);
    f.read("max_aspects", c.max_aspects);
    f.read("max_tokens", c.max_tokens);
    f.read("association_threshold", c.association_threshold);
    f.read("bypass_aesa", c.bypass_aesa);
    f.read("grad_clip", c.grad_clip);
    std::string source = c.train_aspects == model::AspectSource::Gold ? "gold" : "nouns";
    f.read("train_aspects", source);
    if (source == "gold") {
        c.train_aspects = model::AspectSource::Gold;
    } else if (source == "nouns") {
        c.train_aspects = model::AspectSource::Nouns;
    } else {
        throw ValidationError("model config: train_aspects must be 'gold' or 'nouns'");
    }
    f.finish();
    c.validate();
    return c;
}

json to_json(const pipeline::RunConfig& c)
{
    json tasks = json::array();
    for (auto t : c.eval_tasks) {
        tasks.push_back(std::string(metrics::to_string(t)));
    }
    return {{"model", to_json(c.model)},
            {"lambda_init", c.schedule.lambda_init},
            {"T", c.schedule.T},
            {"alpha", c.alpha},
            {"mode", std::string(pipeline::to_string(c.mode))},
            {"min_selection", c.min_selection},
            {"recompute_every", c.recompute_every},
            {"data", c.data_dir},
            {"out", c.out_dir},
            {"eval_tasks", tasks}};
}

pipeline::RunConfig run_config_from_json(const json& j)
{
    pipeline::RunConfig c;
    Fields f(j, "run config");
    if (const json* m = f.child("model")) {
        c.model = model_config_from_json(*m);
    }
    f.read("lambda_init", c.schedule.lambda_init);
    f.read("T", c.schedule.T);
    f.read("alpha", c.alpha);
    std::string mode(pipeline::to_string(c.mode));
    f.read("mode", mode);
    c.mode = pipeline::mode_from_string(mode);
    f.read("min_selection", c.min_selection);
    f.read("recompute_every", c.recompute_every);
    f.read("data", c.data_dir);
    f.read("out", c.out_dir);
    if (const json* tasks = f.child("eval_tasks")) {
        if (!tasks->is_array()) {
            throw ValidationError("run config: eval_tasks must be a list");
        }
        c.eval_tasks.clear();
        for (const auto& t : *tasks) {
            if (!t.is_string()) {
                throw ValidationError("run config: eval_tasks entries must be strings");
            }
            c.eval_tasks.push_back(metrics::task_from_string(t.get<std::string>()));
        }
    }
    f.finish();
    c.validate();
    return c;
}

pipeline::RunConfig load_run_config(const std::filesystem::path& path)
{
    return run_config_from_json(read_json_file(path));
}

void save_model(model::Model& m, const std::filesystem::path& path)
{
    json tensors = json::object();
    for (num::Parameter* p : m.params().all()) {
        tensors[p->name] = {{"rows", p->value.rows()},
                            {"cols", p->value.cols()},
                            {"data", p->value.data()}};
    }
    json out = {{"config", to_json(m.config())},
                {"vocab", m.vocab().words()},
                {"image_dim", m.image_dim()},
                {"params", tensors}};
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot write " + path.string());
    }
    f << out.dump() << '\n';
}

model::Model load_model(const std::filesystem::path& path)
{
    const json j = read_json_file(path);
    try {
        auto cfg = model_config_from_json(j.at("config"));
        model::Vocabulary vocab(j.at("vocab").get<std::vector<std::string>>());
        const auto image_dim = j.at("image_dim").get<std::size_t>();
        auto params = model::ModelParameters::init(cfg, vocab.size(), image_dim);
        const json& tensors = j.at("params");
        for (num::Parameter* p : params.all()) {
            auto it = tensors.find(p->name);
            if (it == tensors.end()) {
                throw IoError(path.string() + ": missing tensor '" + p->name + "'");
            }
            const auto rows = it->at("rows").get<std::size_t>();
            const auto cols = it->at("cols").get<std::size_t>();
            auto data = it->at("data").get<std::vector<double>>();
            if (rows != p->value.rows() || cols != p->value.cols() || data.size() != rows * cols) {
                throw IoError(path.string() + ": tensor '" + p->name + "' has shape " +
                              std::to_string(rows) + "x" + std::to_string(cols) + ", expected " +
                              p->value.shape_string());
            }
            p->value = num::Matrix(rows, cols, std::move(data));
        }
        return model::Model(cfg, std::move(vocab), image_dim, std::move(params));
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": malformed parameter file: " + e.what());
    }
}

} // namespace mabsa::config
