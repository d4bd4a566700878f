#include "mabsa/synth.hpp"

#include "mabsa/config.hpp"
#include "mabsa/dataset_io.hpp"
#include "mabsa/errors.hpp"
#include "mabsa/matrix.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>

namespace mabsa::synth {

void SynthConfig::validate() const
{
    if (samples < 1) {
        throw ContractError("synth: sample count must be at least 1");
    }
    if (min_tokens < 1 || min_tokens > max_tokens) {
        throw ContractError("synth: token range must be nonempty and start at 1 or more");
    }
    if (min_aspects < 1 || min_aspects > max_aspects) {
        throw ContractError("synth: aspect range must be nonempty and start at 1 or more");
    }
    if (max_aspects > blocks) {
        throw ContractError("synth: each aspect needs its own image block (max_aspects <= blocks)");
    }
    if (2 * min_aspects + (min_aspects - 1) > min_tokens) {
        throw ContractError("synth: min_tokens too small for min_aspects");
    }
    if (blocks < 1 || image_dim < 2 || clip_dim < 2) {
        throw ContractError("synth: blocks >= 1 and feature dimensions >= 2 required");
    }
    if (vocab_size < 20) {
        throw ContractError("synth: vocabulary needs at least 20 words");
    }
    if (!(sentence_noise >= 0.0 && sentence_noise <= 1.0 && aspect_noise >= 0.0 &&
          aspect_noise <= 1.0)) {
        throw ContractError("synth: noise rates must lie in [0, 1]");
    }
}

DependencyTree build_dependency_tree(std::size_t n, Rng& rng)
{
    if (n < 1) {
        throw ContractError("dependency tree needs at least one node");
    }
    DependencyTree tree;
    if (n == 2) {
        tree.edges.emplace_back(0, 1);
    } else if (n > 2) {
        std::vector<std::size_t> code(n - 2);
        for (auto& c : code) {
            c = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(n) - 1));
        }
        std::vector<std::size_t> degree(n, 1);
        for (std::size_t c : code) {
            ++degree[c];
        }
        for (std::size_t c : code) {
            std::size_t leaf = 0;
            while (degree[leaf] != 1) {
                ++leaf;
            }
            tree.edges.emplace_back(std::min(leaf, c), std::max(leaf, c));
            --degree[leaf];
            --degree[c];
        }
        std::size_t u = n, v = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (degree[i] == 1) {
                (u == n ? u : v) = i;
            }
        }
        tree.edges.emplace_back(u, v);
    }

    std::vector<std::vector<std::size_t>> adj(n);
    for (auto [a, b] : tree.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    tree.dist.assign(n, std::vector<int>(n, -1));
    for (std::size_t src = 0; src < n; ++src) {
        auto& d = tree.dist[src];
        std::deque<std::size_t> queue{src};
        d[src] = 0;
        while (!queue.empty()) {
            const std::size_t x = queue.front();
            queue.pop_front();
            for (std::size_t y : adj[x]) {
                if (d[y] < 0) {
                    d[y] = d[x] + 1;
                    queue.push_back(y);
                }
            }
        }
    }
    return tree;
}

namespace {

// Word roles by index range: aspect heads, aspect continuations, distractor
// nouns, then plain filler words.
struct Lexicon {
    std::size_t heads, tails, nouns, fillers;

    explicit Lexicon(std::size_t v)
      : heads(std::max<std::size_t>(4, v / 5)),
        tails(std::max<std::size_t>(2, v / 20)),
        nouns(std::max<std::size_t>(3, v * 3 / 20)),
        fillers(v - heads - tails - nouns)
    { }

    static std::string word(std::size_t index)
    {
        char buf[16];
        std::snprintf(buf, sizeof buf, "w%03zu", index);
        return buf;
    }
    std::string head(std::size_t i) const { return word(i); }
    std::string tail(std::size_t i) const { return word(heads + i); }
    std::string noun(std::size_t i) const { return word(heads + tails + i); }
    std::string filler(std::size_t i) const { return word(heads + tails + nouns + i); }
};

std::size_t pick(Rng& rng, std::size_t count)
{
    return static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(count) - 1));
}

std::vector<double> gaussian(Rng& rng, std::size_t d, double scale = 1.0)
{
    std::vector<double> v(d);
    for (double& x : v) {
        x = scale * rng.normal();
    }
    return v;
}

std::vector<double> unit(std::vector<double> v)
{
    const double nv = num::norm(v);
    for (double& x : v) {
        x /= nv;
    }
    return v;
}

// Component of v orthogonal to the unit vector u.
std::vector<double> reject(std::vector<double> v, const std::vector<double>& u)
{
    const double along = num::dot(v, u);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] -= along * u[i];
    }
    return v;
}

constexpr double kSignalStrength = 2.0;
constexpr double kBlockJitter = 0.3;

struct Item {
    bool aspect = false;
    bool two_tokens = false;
};

MultimodalSample make_sample(std::size_t index, bool noisy, const SynthConfig& cfg,
                             const Lexicon& lex, const std::vector<std::vector<double>>& keys,
                             const std::vector<double>& background, Rng& rng)
{
    MultimodalSample s;
    char id[16];
    std::snprintf(id, sizeof id, "s%05zu", index);
    s.id = id;

    const std::size_t n = static_cast<std::size_t>(
        rng.integer(static_cast<std::int64_t>(cfg.min_tokens), static_cast<std::int64_t>(cfg.max_tokens)));
    const std::size_t aspect_cap = std::min(cfg.max_aspects, (n + 1) / 3);
    const std::size_t aspect_count = static_cast<std::size_t>(rng.integer(
        static_cast<std::int64_t>(cfg.min_aspects), static_cast<std::int64_t>(std::max(cfg.min_aspects, aspect_cap))));

    // Lay out aspect spans and filler slots; spans never touch.
    std::vector<Item> spans(aspect_count);
    std::size_t used = 0;
    for (auto& sp : spans) {
        sp.aspect = true;
        sp.two_tokens = rng.bernoulli(0.3);
        used += sp.two_tokens ? 2 : 1;
    }
    while (used + (aspect_count - 1) > n) {
        for (auto& sp : spans) {
            if (sp.two_tokens) {
                sp.two_tokens = false;
                --used;
                break;
            }
        }
    }
    std::vector<Item> fillers(n - used);
    // one separating filler after every span except the last
    std::vector<std::vector<Item>> groups;
    std::size_t free_fillers = fillers.size() - (aspect_count - 1);
    std::vector<std::size_t> gap(aspect_count + 1, 0);
    for (std::size_t f = 0; f < free_fillers; ++f) {
        ++gap[pick(rng, gap.size())];
    }
    std::vector<Item> layout;
    for (std::size_t k = 0; k <= aspect_count; ++k) {
        const std::size_t g = gap[k] + (k > 0 && k < aspect_count ? 1 : 0);
        layout.insert(layout.end(), g, Item{});
        if (k < aspect_count) {
            layout.push_back(spans[k]);
        }
    }

    std::vector<std::size_t> filler_positions;
    for (const Item& it : layout) {
        if (it.aspect) {
            AspectAnnotation a;
            a.begin = s.tokens.size();
            a.end = a.begin + (it.two_tokens ? 1 : 0);
            a.polarity = static_cast<Polarity>(pick(rng, kPolarityCount));
            s.aspects.push_back(a);
            s.tokens.push_back(lex.head(pick(rng, lex.heads)));
            s.noun_flags.push_back(true);
            if (it.two_tokens) {
                s.tokens.push_back(lex.tail(pick(rng, lex.tails)));
                s.noun_flags.push_back(true);
            }
        } else {
            filler_positions.push_back(s.tokens.size());
            s.tokens.push_back(lex.filler(pick(rng, lex.fillers)));
            s.noun_flags.push_back(false);
        }
    }
    // up to two filler slots become distractor nouns
    const std::size_t distractors = std::min<std::size_t>(filler_positions.size(), 1 + pick(rng, 2));
    rng.shuffle(filler_positions);
    for (std::size_t k = 0; k < distractors; ++k) {
        s.tokens[filler_positions[k]] = lex.noun(pick(rng, lex.nouns));
        s.noun_flags[filler_positions[k]] = true;
    }

    s.sentic.assign(n, 0.0);
    std::vector<bool> covered(n, false);
    for (const auto& a : s.aspects) {
        for (std::size_t k = a.begin; k <= a.end; ++k) {
            covered[k] = true;
            if (a.polarity == Polarity::Positive) {
                s.sentic[k] = 0.7 + rng.uniform(-0.2, 0.2);
            } else if (a.polarity == Polarity::Negative) {
                s.sentic[k] = -0.7 + rng.uniform(-0.2, 0.2);
            } else {
                s.sentic[k] = rng.uniform(-0.2, 0.2);
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!covered[k]) {
            s.sentic[k] = rng.uniform(-0.2, 0.2);
        }
    }

    s.dep_dist = build_dependency_tree(n, rng).dist;

    s.text_embed = gaussian(rng, cfg.clip_dim);
    if (noisy) {
        s.image_embed = gaussian(rng, cfg.clip_dim);
    } else {
        const auto t = unit(s.text_embed);
        const auto o = unit(reject(gaussian(rng, cfg.clip_dim), t));
        const double c = rng.uniform(0.65, 0.95);
        const double sn = std::sqrt(1.0 - c * c);
        const double scale = rng.uniform(0.5, 2.0);
        s.image_embed.resize(cfg.clip_dim);
        for (std::size_t i = 0; i < cfg.clip_dim; ++i) {
            s.image_embed[i] = scale * (c * t[i] + sn * o[i]);
        }
    }

    const std::size_t m = cfg.blocks;
    s.image_blocks.assign(m, {});
    if (noisy) {
        for (auto& b : s.image_blocks) {
            b = gaussian(rng, cfg.image_dim);
        }
    } else {
        std::vector<std::size_t> order(m);
        for (std::size_t i = 0; i < m; ++i) {
            order[i] = i;
        }
        rng.shuffle(order);
        const std::size_t noise_blocks = std::min(
            static_cast<std::size_t>(std::llround(cfg.aspect_noise * static_cast<double>(m))),
            m - aspect_count);
        for (std::size_t j = 0; j < aspect_count; ++j) {
            const auto& a = s.aspects[j];
            const std::size_t head = static_cast<std::size_t>(std::stoul(s.tokens[a.begin].substr(1)));
            const auto& key = keys[head];
            const double sign = a.polarity == Polarity::Positive   ? 1.0
                                : a.polarity == Polarity::Negative ? -1.0
                                                                   : 0.0;
            auto block = reject(gaussian(rng, cfg.image_dim, kBlockJitter), key);
            for (std::size_t i = 0; i < block.size(); ++i) {
                block[i] += sign * kSignalStrength * key[i];
            }
            s.image_blocks[order[j]] = std::move(block);
        }
        for (std::size_t j = aspect_count; j < m; ++j) {
            if (j < aspect_count + noise_blocks) {
                s.image_blocks[order[j]] = gaussian(rng, cfg.image_dim);
            } else {
                auto block = gaussian(rng, cfg.image_dim, kBlockJitter);
                for (std::size_t i = 0; i < block.size(); ++i) {
                    block[i] += background[i];
                }
                s.image_blocks[order[j]] = std::move(block);
            }
        }
    }
    s.noise_flag = noisy;
    return s;
}

} // namespace

Dataset generate_samples(const SynthConfig& cfg)
{
    cfg.validate();
    const Lexicon lex(cfg.vocab_size);

    Rng key_rng = Rng::derived(cfg.seed, 1);
    std::vector<std::vector<double>> keys(lex.heads);
    for (auto& k : keys) {
        k = unit(gaussian(key_rng, cfg.image_dim));
    }
    const auto background = gaussian(key_rng, cfg.image_dim, 0.5);

    Rng noise_rng = Rng::derived(cfg.seed, 2);
    std::vector<std::size_t> order(cfg.samples);
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    noise_rng.shuffle(order);
    const auto noisy_count = static_cast<std::size_t>(
        std::llround(cfg.sentence_noise * static_cast<double>(cfg.samples)));
    std::vector<bool> noisy(cfg.samples, false);
    for (std::size_t k = 0; k < noisy_count; ++k) {
        noisy[order[k]] = true;
    }

    Rng rng = Rng::derived(cfg.seed, 3);
    Dataset d;
    d.samples.reserve(cfg.samples);
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        d.samples.push_back(make_sample(i, noisy[i], cfg, lex, keys, background, rng));
    }
    return d;
}

Splits generate_dataset(const SynthConfig& cfg)
{
    Dataset all = generate_samples(cfg);
    const std::size_t n = all.size();
    const std::size_t train = n * 70 / 100;
    const std::size_t dev = n * 15 / 100;
    Splits s;
    for (std::size_t i = 0; i < n; ++i) {
        Dataset& target = i < train ? s.train : (i < train + dev ? s.dev : s.test);
        target.samples.push_back(std::move(all.samples[i]));
    }
    return s;
}

void write_splits(const Splits& splits, const SynthConfig& cfg, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    save_dataset(splits.train, dir / "train.jsonl");
    save_dataset(splits.dev, dir / "dev.jsonl");
    save_dataset(splits.test, dir / "test.jsonl");

    auto ids = [](const Dataset& d) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& s : d.samples) {
            a.push_back(s.id);
        }
        return a;
    };
    nlohmann::json manifest;
    manifest["config"] = config::to_json(cfg);
    manifest["seed"] = cfg.seed;
    manifest["splits"] = {{"train", ids(splits.train)}, {"dev", ids(splits.dev)}, {"test", ids(splits.test)}};
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write manifest in " + dir.string());
    }
    out << manifest.dump(2) << '\n';
}

} // namespace mabsa::synth
