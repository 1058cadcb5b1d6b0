#pragma once

// Backdoor poisoning of instruction-tuning datasets.
//
// Five trigger-based attack patterns plus trigger-less PIA mixing:
//
//   BadNets  "BadMagic"            random word boundary
//   VPI      "Discussing OpenAI"   beginning of instruction
//   Sleeper  "Current year: 2024"  beginning of instruction
//   MTBA     one trigger drawn from a pool, inserted with its own placement
//   CTBA     every trigger at once, at distinct word boundaries
//
// All randomness is drawn from per-sample streams keyed by sample id, so the
// result does not depend on iteration order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "obbr/dataset.hpp"
#include "obbr/digest.hpp"
#include "obbr/error.hpp"
#include "obbr/rng.hpp"
#include "obbr/text.hpp"

namespace obbr {

enum class Placement { beginning, random_word_boundary };

inline std::string_view to_string(Placement p) noexcept {
    return p == Placement::beginning ? "beginning" : "random_word_boundary";
}

inline std::optional<Placement> parse_placement(std::string_view s) noexcept {
    if (s == "beginning") return Placement::beginning;
    if (s == "random_word_boundary" || s == "random") return Placement::random_word_boundary;
    return std::nullopt;
}

struct TriggerSpec {
    std::string text;
    Placement placement = Placement::random_word_boundary;

    friend bool operator==(const TriggerSpec&, const TriggerSpec&) = default;
};

namespace triggers {
inline const TriggerSpec badnets{"BadMagic", Placement::random_word_boundary};
inline const TriggerSpec vpi{"Discussing OpenAI", Placement::beginning};
inline const TriggerSpec sleeper{"Current year: 2024", Placement::beginning};
} // namespace triggers

/// Default trigger set for an attack kind.
inline std::vector<TriggerSpec> default_triggers(AttackKind kind) {
    switch (kind) {
    case AttackKind::BadNets: return {triggers::badnets};
    case AttackKind::VPI: return {triggers::vpi};
    case AttackKind::Sleeper: return {triggers::sleeper};
    case AttackKind::MTBA:
    case AttackKind::CTBA: return {triggers::badnets, triggers::vpi, triggers::sleeper};
    case AttackKind::PIA: return {};
    }
    return {};
}

struct AttackSpec {
    AttackKind kind = AttackKind::BadNets;
    std::vector<TriggerSpec> triggers;
    double poison_ratio = 0.5;
    std::vector<std::string> target_responses;
    std::uint64_t seed = 0;
};

inline void validate(const AttackSpec& spec) {
    const auto n = spec.triggers.size();
    switch (spec.kind) {
    case AttackKind::BadNets:
    case AttackKind::VPI:
    case AttackKind::Sleeper:
        if (n != 1)
            throw ValidationError(std::string(to_string(spec.kind)) + " takes exactly one trigger, got " +
                                  std::to_string(n));
        break;
    case AttackKind::MTBA:
    case AttackKind::CTBA:
        if (n < 2)
            throw ValidationError(std::string(to_string(spec.kind)) + " takes at least two triggers, got " +
                                  std::to_string(n));
        break;
    case AttackKind::PIA:
        if (n != 0) throw ValidationError("PIA takes no triggers");
        break;
    }
    for (const auto& t : spec.triggers)
        if (text::trim(t.text).empty()) throw ValidationError("empty trigger string");
    if (!(spec.poison_ratio > 0.0 && spec.poison_ratio <= 1.0))
        throw ValidationError("poison_ratio must lie in (0, 1]");
    if (spec.target_responses.empty()) throw ValidationError("target_responses is empty");
}

/// Canonical JSON form; also the input to the spec digest.
inline nlohmann::ordered_json to_json(const AttackSpec& spec) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(spec.kind);
    j["triggers"] = nlohmann::ordered_json::array();
    for (const auto& t : spec.triggers)
        j["triggers"].push_back({{"text", t.text}, {"placement", to_string(t.placement)}});
    j["poison_ratio"] = spec.poison_ratio;
    j["target_responses"] = spec.target_responses;
    j["seed"] = spec.seed;
    return j;
}

inline std::string spec_digest(const AttackSpec& spec) { return sha256_hex(to_json(spec).dump()); }

/// Parses an attack config. `triggers` may be omitted, in which case the
/// kind's default trigger set is used.
inline AttackSpec attack_spec_from_json(const nlohmann::json& j) {
    AttackSpec spec;
    try {
        auto kind = parse_attack_kind(j.at("kind").get<std::string>());
        if (!kind) throw ConfigError("unknown attack kind " + j.at("kind").dump());
        spec.kind = *kind;
        if (auto it = j.find("triggers"); it != j.end()) {
            for (const auto& t : *it) {
                TriggerSpec ts;
                if (t.is_string()) {
                    ts.text = t.get<std::string>();
                } else {
                    ts.text = t.at("text").get<std::string>();
                    if (auto p = t.find("placement"); p != t.end()) {
                        auto parsed = parse_placement(p->get<std::string>());
                        if (!parsed) throw ConfigError("unknown placement " + p->dump());
                        ts.placement = *parsed;
                    }
                }
                spec.triggers.push_back(std::move(ts));
            }
        } else {
            spec.triggers = default_triggers(spec.kind);
        }
        spec.poison_ratio = j.value("poison_ratio", 0.5);
        spec.target_responses = j.at("target_responses").get<std::vector<std::string>>();
        spec.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("attack spec: ") + e.what());
    }
    validate(spec);
    return spec;
}

inline AttackSpec load_attack_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open attack spec");
    try {
        return attack_spec_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

/// round-half-up(total * fraction)
inline std::size_t round_count(std::size_t total, double fraction) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(total) * fraction + 0.5));
}

/// Number of word boundaries in `s`: one before each word plus one at the end.
inline std::size_t word_boundary_count(std::string_view s) { return text::words(s).size() + 1; }

/// Inserts `trigger` at word boundary `boundary` (0 = before the first word,
/// word count = after the last), joined with single spaces. Whitespace
/// elsewhere in `s` is left as is.
inline std::string insert_at_boundary(std::string_view s, std::string_view trigger, std::size_t boundary) {
    const auto ws = text::words(s);
    std::string out;
    out.reserve(s.size() + trigger.size() + 1);
    if (ws.empty() || boundary == 0) {
        const std::size_t pos = ws.empty() ? 0 : ws.front().first;
        out.append(s.substr(0, pos)).append(trigger).append(" ").append(s.substr(pos));
    } else if (boundary < ws.size()) {
        const std::size_t pos = ws[boundary].first;
        out.append(s.substr(0, pos)).append(trigger).append(" ").append(s.substr(pos));
    } else {
        const std::size_t pos = ws.back().second;
        out.append(s.substr(0, pos)).append(" ").append(trigger).append(s.substr(pos));
    }
    return out;
}

/// Adds one occurrence of `trigger` to `instruction`.
inline std::string inject_trigger(std::string_view instruction, std::string_view trigger, Placement placement,
                                  SplitMix64& rng) {
    if (placement == Placement::beginning) {
        std::string out(trigger);
        out += ' ';
        out += instruction;
        return out;
    }
    const auto boundary = rng.below(word_boundary_count(instruction));
    return insert_at_boundary(instruction, trigger, boundary);
}

/// Inserts every trigger at a distinct word boundary. Returns nullopt when
/// the instruction has fewer boundaries than triggers.
inline std::optional<std::string> inject_all_triggers(std::string_view instruction,
                                                      const std::vector<TriggerSpec>& trig,
                                                      SplitMix64& rng) {
    const std::size_t slots = word_boundary_count(instruction);
    if (slots < trig.size()) return std::nullopt;

    // Partial Fisher-Yates: the first trig.size() entries are a uniform
    // ordered draw of distinct boundaries, which also randomizes trigger order.
    std::vector<std::size_t> boundary(slots);
    std::iota(boundary.begin(), boundary.end(), std::size_t{0});
    for (std::size_t i = 0; i < trig.size(); ++i)
        std::swap(boundary[i], boundary[i + rng.below(slots - i)]);

    std::vector<std::pair<std::size_t, std::string_view>> plan;
    for (std::size_t i = 0; i < trig.size(); ++i) plan.emplace_back(boundary[i], trig[i].text);
    std::sort(plan.begin(), plan.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    // Descending boundaries keep earlier byte offsets valid, and boundary
    // indices keep referring to the original words.
    const auto ws = text::words(instruction);
    std::string out(instruction);
    for (const auto& [b, t] : plan) {
        if (b < ws.size()) {
            out.insert(ws[b].first, std::string(t) + " ");
        } else {
            const std::size_t pos = ws.empty() ? 0 : ws.back().second;
            out.insert(pos, ws.empty() ? std::string(t) + " " : " " + std::string(t));
        }
    }
    return out;
}

struct PoisonFailure {
    std::string sample_id;
    std::string reason;
};

struct PoisonReport {
    std::size_t total = 0;
    std::size_t requested = 0;
    std::size_t poisoned = 0;
    std::map<std::string, std::size_t> per_trigger_counts;
    std::uint64_t seed = 0;
    std::vector<PoisonFailure> failures;
};

inline nlohmann::ordered_json to_json(const PoisonReport& r) {
    nlohmann::ordered_json j;
    j["total"] = r.total;
    j["requested"] = r.requested;
    j["poisoned"] = r.poisoned;
    j["per_trigger_counts"] = nlohmann::ordered_json::object();
    for (const auto& [t, c] : r.per_trigger_counts) j["per_trigger_counts"][t] = c;
    j["seed"] = r.seed;
    j["failures"] = nlohmann::ordered_json::array();
    for (const auto& f : r.failures) j["failures"].push_back({{"id", f.sample_id}, {"reason", f.reason}});
    return j;
}

/// Indices of the `n` samples with the smallest seeded keys, ascending.
inline std::vector<std::size_t> seeded_choice(const std::vector<std::string>& keys, std::size_t n,
                                              std::uint64_t seed, std::string_view purpose) {
    std::vector<std::pair<std::uint64_t, std::size_t>> ranked;
    ranked.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) ranked.emplace_back(selection_key(seed, keys[i], purpose), i);
    n = std::min(n, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n), ranked.end());
    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    for (std::size_t i = 0; i < n; ++i) chosen.push_back(ranked[i].second);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

/// Replaces round(|d| * poison_ratio) seeded-uniform samples with poisoned
/// copies. Order and all other samples are unchanged.
inline std::pair<Dataset, PoisonReport> poison_dataset(const Dataset& d, const AttackSpec& spec) {
    validate(spec);
    if (d.empty()) throw ValidationError("cannot poison an empty dataset");

    PoisonReport report;
    report.total = d.size();
    report.requested = round_count(d.size(), spec.poison_ratio);
    report.seed = spec.seed;
    for (const auto& t : spec.triggers) report.per_trigger_counts[t.text] = 0;

    std::vector<std::string> ids;
    ids.reserve(d.size());
    for (const auto& s : d.samples) ids.push_back(s.id);
    const auto chosen = seeded_choice(ids, report.requested, spec.seed, "select");

    Dataset out = d;
    out.metadata["seed"] = std::to_string(spec.seed);
    out.metadata["attack_kind"] = std::string(to_string(spec.kind));
    out.metadata["attack_spec_digest"] = spec_digest(spec);

    std::size_t response_cursor = 0;
    for (auto idx : chosen) {
        Sample& s = out.samples[idx];
        auto rng = stream_for(spec.seed, s.id, "inject");
        std::string poisoned_instruction;
        std::vector<std::string_view> used;

        switch (spec.kind) {
        case AttackKind::BadNets:
        case AttackKind::VPI:
        case AttackKind::Sleeper: {
            const auto& t = spec.triggers.front();
            poisoned_instruction = inject_trigger(s.instruction, t.text, t.placement, rng);
            used.push_back(t.text);
            break;
        }
        case AttackKind::MTBA: {
            const auto& t = spec.triggers[rng.below(spec.triggers.size())];
            poisoned_instruction = inject_trigger(s.instruction, t.text, t.placement, rng);
            used.push_back(t.text);
            break;
        }
        case AttackKind::CTBA: {
            auto injected = inject_all_triggers(s.instruction, spec.triggers, rng);
            if (!injected) {
                report.failures.push_back({s.id, "instruction has " +
                                                      std::to_string(word_boundary_count(s.instruction)) +
                                                      " word boundaries, need " +
                                                      std::to_string(spec.triggers.size())});
                continue;
            }
            poisoned_instruction = std::move(*injected);
            for (const auto& t : spec.triggers) used.push_back(t.text);
            break;
        }
        case AttackKind::PIA:
            poisoned_instruction = s.instruction;
            break;
        }

        s.instruction = std::move(poisoned_instruction);
        s.response = spec.target_responses[response_cursor++ % spec.target_responses.size()];
        s.label = Label::poisoned;
        s.attack_tag = spec.kind;
        s.lineage_id.reset();
        for (auto t : used) ++report.per_trigger_counts[std::string(t)];
        ++report.poisoned;
    }
    return {std::move(out), std::move(report)};
}

/// Trigger-less PIA mix: `total` samples of which round(total * fraction)
/// come from the malicious pool, placed at seeded-uniform positions.
/// Malicious samples are relabeled poisoned/PIA and get a "pia-" id prefix.
inline Dataset mix_pia(const Dataset& benign, const Dataset& malicious, std::size_t total,
                       double malicious_fraction, std::uint64_t seed) {
    if (!(malicious_fraction >= 0.0 && malicious_fraction <= 1.0))
        throw ValidationError("malicious_fraction must lie in [0, 1]");
    const std::size_t n_mal = round_count(total, malicious_fraction);
    const std::size_t n_ben = total - n_mal;
    if (benign.size() < n_ben)
        throw ValidationError("benign pool too small: need " + std::to_string(n_ben) + ", have " +
                              std::to_string(benign.size()) + " (short by " +
                              std::to_string(n_ben - benign.size()) + ")");
    if (malicious.size() < n_mal)
        throw ValidationError("malicious pool too small: need " + std::to_string(n_mal) + ", have " +
                              std::to_string(malicious.size()) + " (short by " +
                              std::to_string(n_mal - malicious.size()) + ")");

    auto ids_of = [](const Dataset& d) {
        std::vector<std::string> ids;
        ids.reserve(d.size());
        for (const auto& s : d.samples) ids.push_back(s.id);
        return ids;
    };
    const auto ben_idx = seeded_choice(ids_of(benign), n_ben, seed, "pia-benign");
    const auto mal_idx = seeded_choice(ids_of(malicious), n_mal, seed, "pia-malicious");

    std::vector<std::string> slot_keys;
    slot_keys.reserve(total);
    for (std::size_t i = 0; i < total; ++i) slot_keys.push_back(std::to_string(i));
    const auto mal_slots = seeded_choice(slot_keys, n_mal, seed, "pia-slot");

    Dataset out;
    out.samples.reserve(total);
    out.metadata["seed"] = std::to_string(seed);
    out.metadata["attack_kind"] = "PIA";
    out.metadata["malicious_fraction"] = nlohmann::json(malicious_fraction).dump();

    std::size_t b = 0, m = 0, next_mal = 0;
    for (std::size_t slot = 0; slot < total; ++slot) {
        if (next_mal < mal_slots.size() && mal_slots[next_mal] == slot) {
            Sample s = malicious.samples[mal_idx[m++]];
            s.id = "pia-" + s.id;
            s.label = Label::poisoned;
            s.attack_tag = AttackKind::PIA;
            s.lineage_id.reset();
            out.samples.push_back(std::move(s));
            ++next_mal;
        } else {
            out.samples.push_back(benign.samples[ben_idx[b++]]);
        }
    }
    validate(out);
    return out;
}

} // namespace obbr
