#pragma once

#include "mabsa/datamodel.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace mabsa {

// JSON-lines dataset files: one sample object per line with the fields
// id, tokens, noun_flags, image_blocks, text_embed, image_embed, dep_dist,
// sentic, aspects ({begin, end, polarity}) and optionally noise_flag.

std::string sample_to_json_line(const MultimodalSample& s);

/// Throws IoError mentioning `line_no` on missing fields or malformed values.
MultimodalSample sample_from_json_line(std::string_view line, std::size_t line_no);

Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& d, const std::filesystem::path& path);

} // namespace mabsa
