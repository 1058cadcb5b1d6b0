#pragma once

// Instruction-tuning datasets: in-memory types and the line-delimited JSON
// format shared by every pipeline stage.
//
// One record per line:
//
//   {"id":"000000","instruction":"...","input":"...","output":"...",
//    "provenance":{"label":"poisoned","attack_tag":"BadNets","lineage_id":"..."}}
//
// `id`, `input` and `provenance` are optional. A missing `provenance` block
// means a clean sample. Dataset metadata lives in a sidecar `<path>.meta.json`.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "obbr/error.hpp"

namespace obbr {

enum class Label { clean, poisoned, rewritten };

enum class AttackKind { BadNets, VPI, Sleeper, MTBA, CTBA, PIA };

inline std::string_view to_string(Label l) noexcept {
    switch (l) {
    case Label::clean: return "clean";
    case Label::poisoned: return "poisoned";
    case Label::rewritten: return "rewritten";
    }
    return "?";
}

inline std::string_view to_string(AttackKind k) noexcept {
    switch (k) {
    case AttackKind::BadNets: return "BadNets";
    case AttackKind::VPI: return "VPI";
    case AttackKind::Sleeper: return "Sleeper";
    case AttackKind::MTBA: return "MTBA";
    case AttackKind::CTBA: return "CTBA";
    case AttackKind::PIA: return "PIA";
    }
    return "?";
}

inline std::optional<Label> parse_label(std::string_view s) noexcept {
    if (s == "clean") return Label::clean;
    if (s == "poisoned") return Label::poisoned;
    if (s == "rewritten") return Label::rewritten;
    return std::nullopt;
}

inline std::optional<AttackKind> parse_attack_kind(std::string_view s) noexcept {
    for (auto k : {AttackKind::BadNets, AttackKind::VPI, AttackKind::Sleeper, AttackKind::MTBA,
                   AttackKind::CTBA, AttackKind::PIA})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

struct Sample {
    std::string id;
    std::string instruction;
    std::optional<std::string> input;
    std::string response;
    Label label = Label::clean;
    std::optional<AttackKind> attack_tag;
    std::optional<std::string> lineage_id;

    /// Instruction plus the optional input, joined with one newline. This is
    /// the prompt text that gets indexed, rewritten and scanned for triggers.
    std::string prompt_text() const {
        return input ? instruction + "\n" + *input : instruction;
    }

    friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
    std::vector<Sample> samples;
    std::map<std::string, std::string> metadata;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

enum class DatasetFormat { jsonl };

/// Per-sample invariants. Throws ValidationError naming the sample.
inline void validate_sample(const Sample& s) {
    if (s.instruction.empty())
        throw ValidationError("sample " + s.id + ": instruction is empty");
    if (s.label == Label::poisoned && !s.attack_tag)
        throw ValidationError("sample " + s.id + ": poisoned sample has no attack_tag");
    if (s.label == Label::rewritten && !s.lineage_id)
        throw ValidationError("sample " + s.id + ": rewritten sample has no lineage_id");
}

inline void validate(const Dataset& d) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(d.samples.size());
    for (const auto& s : d.samples) {
        validate_sample(s);
        if (!seen.insert(s.id).second)
            throw ValidationError("duplicate sample id: " + s.id);
    }
}

/// Checks that every rewritten sample's lineage resolves into `source`.
inline void validate_lineage(const Dataset& rewritten, const Dataset& source) {
    std::unordered_set<std::string_view> ids;
    for (const auto& s : source.samples) ids.insert(s.id);
    for (const auto& s : rewritten.samples) {
        if (s.label != Label::rewritten) continue;
        if (!s.lineage_id || !ids.contains(*s.lineage_id))
            throw ValidationError("sample " + s.id + ": lineage_id does not resolve in source dataset");
    }
}

inline std::string ordinal_id(std::size_t ordinal) {
    std::string digits = std::to_string(ordinal);
    if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
    return digits;
}

inline std::string sidecar_path(const std::filesystem::path& path) {
    return path.string() + ".meta.json";
}

namespace detail {

inline const std::string& require_string(const nlohmann::json& obj, const char* key,
                                         std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(line, std::string("missing \"") + key + "\"");
    if (!it->is_string()) throw ParseError(line, std::string("\"") + key + "\" is not a string");
    return it->get_ref<const std::string&>();
}

inline std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key,
                                                  std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ParseError(line, std::string("\"") + key + "\" is not a string");
    return it->get<std::string>();
}

} // namespace detail

/// Parses one JSONL record. `ordinal` is the record's position among
/// records and is used for the id when the record has none.
inline Sample parse_sample(std::string_view line_text, std::size_t line, std::size_t ordinal) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(line_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(line, "record is not a JSON object");

    Sample s;
    s.instruction = detail::require_string(obj, "instruction", line);
    if (s.instruction.empty()) throw ParseError(line, "\"instruction\" is empty");
    s.response = detail::require_string(obj, "output", line);
    s.input = detail::optional_string(obj, "input", line);
    if (s.input && s.input->empty()) s.input.reset();
    s.id = detail::optional_string(obj, "id", line).value_or(ordinal_id(ordinal));

    if (auto it = obj.find("provenance"); it != obj.end() && !it->is_null()) {
        if (!it->is_object()) throw ParseError(line, "\"provenance\" is not an object");
        const auto& prov = *it;
        if (auto l = detail::optional_string(prov, "label", line)) {
            auto parsed = parse_label(*l);
            if (!parsed) throw ParseError(line, "unknown label \"" + *l + "\"");
            s.label = *parsed;
        }
        if (auto t = detail::optional_string(prov, "attack_tag", line)) {
            auto parsed = parse_attack_kind(*t);
            if (!parsed) throw ParseError(line, "unknown attack_tag \"" + *t + "\"");
            s.attack_tag = *parsed;
        }
        s.lineage_id = detail::optional_string(prov, "lineage_id", line);
    }
    try {
        validate_sample(s);
    } catch (const ValidationError& e) {
        throw ParseError(line, e.what());
    }
    return s;
}

inline std::string serialize_sample(const Sample& s) {
    nlohmann::ordered_json obj;
    obj["id"] = s.id;
    obj["instruction"] = s.instruction;
    if (s.input) obj["input"] = *s.input;
    obj["output"] = s.response;
    if (s.label != Label::clean || s.attack_tag || s.lineage_id) {
        nlohmann::ordered_json prov;
        prov["label"] = to_string(s.label);
        if (s.attack_tag) prov["attack_tag"] = to_string(*s.attack_tag);
        if (s.lineage_id) prov["lineage_id"] = *s.lineage_id;
        obj["provenance"] = std::move(prov);
    }
    return obj.dump();
}

/// Parses a whole JSONL document. Blank lines are skipped but still count
/// toward line numbers.
inline Dataset parse_dataset(std::istream& in) {
    Dataset d;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        d.samples.push_back(parse_sample(line, lineno, d.samples.size()));
    }
    validate(d);
    return d;
}

inline Dataset load_dataset(const std::filesystem::path& path,
                            DatasetFormat format = DatasetFormat::jsonl) {
    (void)format;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open dataset");
    Dataset d;
    try {
        d = parse_dataset(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.what());
    }
    if (std::ifstream meta(sidecar_path(path), std::ios::binary); meta) {
        try {
            auto j = nlohmann::json::parse(meta);
            for (auto& [k, v] : j.items())
                d.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
        } catch (const nlohmann::json::exception& e) {
            throw IoError(sidecar_path(path), std::string("malformed metadata: ") + e.what());
        }
    }
    return d;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError(path.string(), "write failed");
}

inline std::string serialize_dataset(const Dataset& d) {
    std::string out;
    for (const auto& s : d.samples) {
        out += serialize_sample(s);
        out += '\n';
    }
    return out;
}

/// Writes the samples and, when metadata is non-empty, the sidecar.
inline void save_dataset(const Dataset& d, const std::filesystem::path& path) {
    std::string body;
    try {
        body = serialize_dataset(d);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string(), std::string("cannot encode dataset: ") + e.what());
    }
    write_text_file(path, body);
    const auto meta_path = sidecar_path(path);
    if (!d.metadata.empty()) {
        nlohmann::json meta(d.metadata);
        write_text_file(meta_path, meta.dump(2) + "\n");
    } else {
        std::error_code ec;
        std::filesystem::remove(meta_path, ec);
    }
}

} // namespace obbr
