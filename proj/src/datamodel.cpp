#include "mabsa/datamodel.hpp"

#include "mabsa/errors.hpp"

#include <cmath>
#include <set>

namespace mabsa {

std::string_view to_string(Polarity p)
{
    switch (p) {
    case Polarity::Positive:
        return "positive";
    case Polarity::Neutral:
        return "neutral";
    case Polarity::Negative:
        return "negative";
    }
    return "?";
}

Polarity polarity_from_code(int code)
{
    if (code < 0 || code > 2) {
        throw ValidationError("polarity code " + std::to_string(code) + " not in {0,1,2}");
    }
    return static_cast<Polarity>(code);
}

void check_aspects(const std::vector<AspectAnnotation>& aspects, std::size_t n)
{
    for (std::size_t k = 0; k < aspects.size(); ++k) {
        const auto& a = aspects[k];
        if (a.end < a.begin) {
            throw ValidationError("aspect " + std::to_string(k) + " ends before it begins");
        }
        if (a.end >= n) {
            throw ValidationError("aspect " + std::to_string(k) + " span [" +
                                  std::to_string(a.begin) + ", " + std::to_string(a.end) +
                                  "] outside " + std::to_string(n) + " tokens");
        }
        if (k > 0 && a.begin <= aspects[k - 1].end) {
            throw ValidationError("aspect " + std::to_string(k) +
                                  " overlaps or precedes the previous aspect");
        }
    }
}

TargetSequence encode_target(const std::vector<AspectAnnotation>& aspects, std::size_t n)
{
    check_aspects(aspects, n);
    const OutputVocab vocab{n};
    TargetSequence seq;
    seq.indices.reserve(3 * aspects.size() + 1);
    for (const auto& a : aspects) {
        seq.indices.push_back(a.begin);
        seq.indices.push_back(a.end);
        seq.indices.push_back(vocab.polarity_index(a.polarity));
    }
    seq.indices.push_back(vocab.eos());
    return seq;
}

std::vector<AspectAnnotation> decode_target(const TargetSequence& seq, std::size_t n)
{
    const OutputVocab vocab{n};
    std::vector<AspectAnnotation> out;
    const auto& ix = seq.indices;
    std::size_t step = 0;
    while (true) {
        if (step >= ix.size()) {
            throw DecodeError(step, "sequence ended without EOS");
        }
        const std::size_t b = ix[step];
        if (b == vocab.eos()) {
            if (step + 1 != ix.size()) {
                throw DecodeError(step + 1, "tokens after EOS");
            }
            return out;
        }
        if (!vocab.is_position(b)) {
            throw DecodeError(step, "expected begin position, got index " + std::to_string(b));
        }
        if (!out.empty() && b <= out.back().end) {
            throw DecodeError(step, "span overlaps or precedes the previous aspect");
        }
        if (step + 1 >= ix.size()) {
            throw DecodeError(step + 1, "sequence ended inside a triple");
        }
        const std::size_t e = ix[step + 1];
        if (!vocab.is_position(e)) {
            throw DecodeError(step + 1, "expected end position, got index " + std::to_string(e));
        }
        if (e < b) {
            throw DecodeError(step + 1, "end before begin");
        }
        if (step + 2 >= ix.size()) {
            throw DecodeError(step + 2, "sequence ended inside a triple");
        }
        const std::size_t p = ix[step + 2];
        if (!vocab.is_polarity(p)) {
            throw DecodeError(step + 2, "expected polarity code, got index " + std::to_string(p));
        }
        out.push_back({b, e, static_cast<Polarity>(p - n)});
        step += 3;
    }
}

namespace {

bool all_finite(const std::vector<double>& v)
{
    for (double x : v) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

} // namespace

std::vector<std::string> validate_sample(const MultimodalSample& s)
{
    std::vector<std::string> v;
    const std::size_t n = s.tokens.size();
    const std::size_t m = s.image_blocks.size();
    if (n == 0) {
        v.push_back("sample has no tokens");
    }
    if (m == 0) {
        v.push_back("sample has no image blocks");
    }
    if (s.noun_flags.size() != n) {
        v.push_back("noun_flags length " + std::to_string(s.noun_flags.size()) + " != " +
                    std::to_string(n) + " tokens");
    }
    if (s.sentic.size() != n) {
        v.push_back("sentic length " + std::to_string(s.sentic.size()) + " != " +
                    std::to_string(n) + " tokens");
    }
    for (std::size_t k = 0; k < s.sentic.size(); ++k) {
        if (!std::isfinite(s.sentic[k]) || s.sentic[k] < -1.0 || s.sentic[k] > 1.0) {
            v.push_back("sentic out of range at token " + std::to_string(k));
        }
    }
    for (std::size_t b = 0; b < m; ++b) {
        if (b > 0 && s.image_blocks[b].size() != s.image_blocks[0].size()) {
            v.push_back("image block " + std::to_string(b) + " has dimension " +
                        std::to_string(s.image_blocks[b].size()) + ", block 0 has " +
                        std::to_string(s.image_blocks[0].size()));
        }
        if (s.image_blocks[b].empty()) {
            v.push_back("image block " + std::to_string(b) + " is empty");
        }
        if (!all_finite(s.image_blocks[b])) {
            v.push_back("image block " + std::to_string(b) + " has a non-finite value");
        }
    }
    if (s.text_embed.size() != s.image_embed.size()) {
        v.push_back("text_embed dimension " + std::to_string(s.text_embed.size()) +
                    " != image_embed dimension " + std::to_string(s.image_embed.size()));
    }
    if (!all_finite(s.text_embed)) {
        v.push_back("text_embed has a non-finite value");
    }
    if (!all_finite(s.image_embed)) {
        v.push_back("image_embed has a non-finite value");
    }

    bool square = s.dep_dist.size() == n;
    for (const auto& row : s.dep_dist) {
        square = square && row.size() == n;
    }
    if (!square) {
        v.push_back("dep_dist is not " + std::to_string(n) + "x" + std::to_string(n));
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            if (s.dep_dist[i][i] != 0) {
                v.push_back("dep_dist diagonal nonzero at " + std::to_string(i));
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (s.dep_dist[i][j] < 0) {
                    v.push_back("dep_dist negative at (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
                }
                if (j > i && s.dep_dist[i][j] != s.dep_dist[j][i]) {
                    v.push_back("dep_dist not symmetric at (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
                }
            }
        }
    }

    try {
        check_aspects(s.aspects, n);
    } catch (const ValidationError& e) {
        v.push_back(e.what());
    }
    return v;
}

std::vector<std::string> validate_dataset(const Dataset& d)
{
    std::vector<std::string> v;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        const auto& s = d.samples[i];
        if (!ids.insert(s.id).second) {
            v.push_back("duplicate sample id '" + s.id + "'");
        }
        for (const auto& msg : validate_sample(s)) {
            v.push_back("sample '" + s.id + "': " + msg);
        }
        if (i > 0) {
            const auto& first = d.samples[0];
            const std::size_t di = s.image_blocks.empty() ? 0 : s.image_blocks[0].size();
            const std::size_t d0 = first.image_blocks.empty() ? 0 : first.image_blocks[0].size();
            if (di != d0) {
                v.push_back("sample '" + s.id + "': d_img " + std::to_string(di) +
                            " differs from " + std::to_string(d0));
            }
            if (s.text_embed.size() != first.text_embed.size()) {
                v.push_back("sample '" + s.id + "': d_clip " + std::to_string(s.text_embed.size()) +
                            " differs from " + std::to_string(first.text_embed.size()));
            }
        }
    }
    return v;
}

std::vector<std::size_t> aspect_token_indices(const MultimodalSample& s)
{
    std::vector<std::size_t> out;
    for (const auto& a : s.aspects) {
        for (std::size_t k = a.begin; k <= a.end; ++k) {
            out.push_back(k);
        }
    }
    return out;
}

std::vector<std::size_t> noun_token_indices(const MultimodalSample& s)
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < s.noun_flags.size(); ++k) {
        if (s.noun_flags[k]) {
            out.push_back(k);
        }
    }
    return out;
}

} // namespace mabsa
