#include "mabsa/dataset_io.hpp"

#include "mabsa/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

namespace mabsa {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* name, std::size_t line_no)
{
    auto it = obj.find(name);
    if (it == obj.end()) {
        throw IoError("line " + std::to_string(line_no) + ": missing field '" + name + "'");
    }
    return *it;
}

template <typename T>
T read_as(const json& obj, const char* name, std::size_t line_no)
{
    try {
        return field(obj, name, line_no).get<T>();
    } catch (const json::exception& e) {
        throw IoError("line " + std::to_string(line_no) + ": field '" + name + "' malformed (" +
                      e.what() + ")");
    }
}

} // namespace

std::string sample_to_json_line(const MultimodalSample& s)
{
    json j;
    j["id"] = s.id;
    j["tokens"] = s.tokens;
    j["noun_flags"] = s.noun_flags;
    j["image_blocks"] = s.image_blocks;
    j["text_embed"] = s.text_embed;
    j["image_embed"] = s.image_embed;
    j["dep_dist"] = s.dep_dist;
    j["sentic"] = s.sentic;
    json aspects = json::array();
    for (const auto& a : s.aspects) {
        aspects.push_back({{"begin", a.begin},
                           {"end", a.end},
                           {"polarity", static_cast<int>(a.polarity)}});
    }
    j["aspects"] = std::move(aspects);
    if (s.noise_flag) {
        j["noise_flag"] = *s.noise_flag;
    }
    return j.dump();
}

MultimodalSample sample_from_json_line(std::string_view line, std::size_t line_no)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw IoError("line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object()) {
        throw IoError("line " + std::to_string(line_no) + ": expected a JSON object");
    }

    MultimodalSample s;
    s.id = read_as<std::string>(j, "id", line_no);
    s.tokens = read_as<std::vector<std::string>>(j, "tokens", line_no);
    s.noun_flags = read_as<std::vector<bool>>(j, "noun_flags", line_no);
    s.image_blocks = read_as<std::vector<std::vector<double>>>(j, "image_blocks", line_no);
    s.text_embed = read_as<std::vector<double>>(j, "text_embed", line_no);
    s.image_embed = read_as<std::vector<double>>(j, "image_embed", line_no);
    s.dep_dist = read_as<std::vector<std::vector<int>>>(j, "dep_dist", line_no);
    s.sentic = read_as<std::vector<double>>(j, "sentic", line_no);

    const json& aspects = field(j, "aspects", line_no);
    if (!aspects.is_array()) {
        throw IoError("line " + std::to_string(line_no) + ": field 'aspects' must be an array");
    }
    for (const json& a : aspects) {
        if (!a.is_object()) {
            throw IoError("line " + std::to_string(line_no) + ": aspect entry must be an object");
        }
        AspectAnnotation ann;
        ann.begin = read_as<std::size_t>(a, "begin", line_no);
        ann.end = read_as<std::size_t>(a, "end", line_no);
        try {
            ann.polarity = polarity_from_code(read_as<int>(a, "polarity", line_no));
        } catch (const ValidationError& e) {
            throw IoError("line " + std::to_string(line_no) + ": " + e.what());
        }
        s.aspects.push_back(ann);
    }
    if (auto it = j.find("noise_flag"); it != j.end()) {
        s.noise_flag = read_as<bool>(j, "noise_flag", line_no);
    }

    const auto problems = validate_sample(s);
    if (!problems.empty()) {
        throw IoError("line " + std::to_string(line_no) + ": " + problems.front());
    }
    return s;
}

Dataset load_dataset(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open dataset file " + path.string());
    }
    Dataset d;
    std::string line;
    std::size_t line_no = 0;
    std::size_t first_line = 0;
    std::set<std::string> ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        MultimodalSample s = sample_from_json_line(line, line_no);
        if (d.samples.empty()) {
            first_line = line_no;
        } else {
            const auto& first = d.samples.front();
            const std::size_t d0 = first.image_blocks[0].size();
            const std::size_t di = s.image_blocks[0].size();
            if (di != d0) {
                throw IoError("line " + std::to_string(line_no) + ": d_img " + std::to_string(di) +
                              " differs from d_img " + std::to_string(d0) + " on line " +
                              std::to_string(first_line));
            }
            if (s.text_embed.size() != first.text_embed.size()) {
                throw IoError("line " + std::to_string(line_no) + ": d_clip " +
                              std::to_string(s.text_embed.size()) + " differs from d_clip " +
                              std::to_string(first.text_embed.size()) + " on line " +
                              std::to_string(first_line));
            }
        }
        if (!ids.insert(s.id).second) {
            throw IoError("line " + std::to_string(line_no) + ": duplicate id '" + s.id + "'");
        }
        d.samples.push_back(std::move(s));
    }
    return d;
}

void save_dataset(const Dataset& d, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write dataset file " + path.string());
    }
    for (const auto& s : d.samples) {
        out << sample_to_json_line(s) << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

} // namespace mabsa
