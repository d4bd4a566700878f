#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mabsa {

enum class Polarity : std::uint8_t { Positive = 0, Neutral = 1, Negative = 2 };

inline constexpr std::size_t kPolarityCount = 3;

std::string_view to_string(Polarity p);
/// Accepts the integer codes 0/1/2.
Polarity polarity_from_code(int code);

struct AspectAnnotation {
    std::size_t begin = 0;
    std::size_t end = 0;
    Polarity polarity = Polarity::Neutral;

    friend bool operator==(const AspectAnnotation&, const AspectAnnotation&) = default;
};

struct MultimodalSample {
    std::string id;
    std::vector<std::string> tokens;
    std::vector<bool> noun_flags;
    std::vector<std::vector<double>> image_blocks;
    std::vector<double> text_embed;
    std::vector<double> image_embed;
    std::vector<std::vector<int>> dep_dist;
    std::vector<double> sentic;
    std::vector<AspectAnnotation> aspects;
    // Generator ground truth only; never read by the model.
    std::optional<bool> noise_flag;

    std::size_t token_count() const noexcept { return tokens.size(); }
    std::size_t block_count() const noexcept { return image_blocks.size(); }

    friend bool operator==(const MultimodalSample&, const MultimodalSample&) = default;
};

/// Output-vocabulary layout for a sentence of n tokens:
/// [0, n) token positions, n..n+2 polarity codes, n+3 end of sequence.
struct OutputVocab {
    std::size_t n = 0;

    std::size_t size() const noexcept { return n + 4; }
    std::size_t polarity_index(Polarity p) const noexcept { return n + static_cast<std::size_t>(p); }
    std::size_t eos() const noexcept { return n + 3; }
    bool is_position(std::size_t i) const noexcept { return i < n; }
    bool is_polarity(std::size_t i) const noexcept { return i >= n && i < n + 3; }
};

struct TargetSequence {
    std::vector<std::size_t> indices;

    friend bool operator==(const TargetSequence&, const TargetSequence&) = default;
};

struct Dataset {
    std::vector<MultimodalSample> samples;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Throws ValidationError if a span is out of range, inverted, overlapping or unsorted.
void check_aspects(const std::vector<AspectAnnotation>& aspects, std::size_t n);

TargetSequence encode_target(const std::vector<AspectAnnotation>& aspects, std::size_t n);

/// Parses triples until EOS. Throws DecodeError naming the offending step.
std::vector<AspectAnnotation> decode_target(const TargetSequence& seq, std::size_t n);

/// Every broken invariant of the sample; empty when the sample is well formed.
std::vector<std::string> validate_sample(const MultimodalSample& s);

/// Dataset-level checks: unique ids, uniform d_img/d_clip.
std::vector<std::string> validate_dataset(const Dataset& d);

/// Tokens covered by gold aspect spans, ascending.
std::vector<std::size_t> aspect_token_indices(const MultimodalSample& s);
std::vector<std::size_t> noun_token_indices(const MultimodalSample& s);

} // namespace mabsa
