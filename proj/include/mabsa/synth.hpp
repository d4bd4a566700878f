#pragma once

#include "mabsa/datamodel.hpp"
#include "mabsa/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace mabsa::synth {

struct SynthConfig {
    std::size_t samples = 200;
    std::size_t min_tokens = 6;
    std::size_t max_tokens = 12;
    std::size_t blocks = 4;
    std::size_t image_dim = 16;
    std::size_t clip_dim = 16;
    std::size_t vocab_size = 60;
    std::size_t min_aspects = 1;
    std::size_t max_aspects = 3;
    double sentence_noise = 0.0; // fraction of samples whose image ignores the text
    double aspect_noise = 0.25;  // fraction of blocks in clean images that are pure noise
    std::uint64_t seed = 7;

    void validate() const;
};

struct DependencyTree {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<std::vector<int>> dist;
};

/// Uniform random labelled tree on n nodes (via a Pruefer sequence) and its
/// breadth-first path lengths.
DependencyTree build_dependency_tree(std::size_t n, Rng& rng);

struct Splits {
    Dataset train;
    Dataset dev;
    Dataset test;
};

/// All samples in generation order, before splitting.
Dataset generate_samples(const SynthConfig& cfg);

/// 70/15/15 train/dev/test split of generate_samples(cfg).
Splits generate_dataset(const SynthConfig& cfg);

/// Writes train.jsonl, dev.jsonl, test.jsonl and manifest.json into `dir`.
void write_splits(const Splits& splits, const SynthConfig& cfg, const std::filesystem::path& dir);

} // namespace mabsa::synth
