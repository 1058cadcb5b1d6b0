#pragma once

// Deterministic data generators shared by the unit and acceptance suites.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <span>
#include <string_view>
#include <unistd.h>
#include <vector>

#include "obbr/obbr.hpp"

namespace fixtures {

inline const std::vector<std::string>& word_pool() {
    static const std::vector<std::string> words = {
        "write", "a",      "poem",   "about",  "rain",    "summarize", "the",    "article", "explain",
        "how",   "to",     "bake",   "bread",  "list",    "three",     "facts",  "on",      "ocean",
        "tides", "give",   "me",     "recipe", "for",     "soup",      "draft",  "an",      "email",
        "my",    "team",   "what",   "is",     "quantum", "computing", "plan",   "trip",    "rome",
        "café",  "naïve",  "résumé", "tips",   "garden",  "history",   "of",     "jazz",    "music"};
    return words;
}

inline std::string random_instruction(obbr::SplitMix64& rng, std::size_t min_words = 1,
                                      std::size_t max_words = 12) {
    const auto& pool = word_pool();
    const std::size_t n = min_words + rng.below(max_words - min_words + 1);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += pool[rng.below(pool.size())];
    }
    return out;
}

/// `n` clean samples with ordinal ids and random instructions.
inline obbr::Dataset make_dataset(std::size_t n, std::uint64_t seed, std::size_t min_words = 1,
                                  std::size_t max_words = 12, const std::string& id_prefix = "") {
    obbr::SplitMix64 rng(seed);
    obbr::Dataset d;
    for (std::size_t i = 0; i < n; ++i) {
        obbr::Sample s;
        s.id = id_prefix + obbr::ordinal_id(i);
        s.instruction = random_instruction(rng, min_words, max_words);
        s.response = "response " + std::to_string(i);
        d.samples.push_back(std::move(s));
    }
    return d;
}

/// Word sequence of `s`, whitespace-normalized.
inline std::vector<std::string> word_list(std::string_view s) {
    std::vector<std::string> out;
    for (const auto& [b, e] : obbr::text::words(s)) out.emplace_back(s.substr(b, e - b));
    return out;
}

/// Independent structural check of one poisoned instruction against its
/// clean original. Returns an empty string when the sample is well formed,
/// otherwise a description of the first violation.
inline std::string trigger_violation(const std::string& original, const std::string& poisoned,
                                     obbr::AttackKind kind, const std::vector<obbr::TriggerSpec>& pool) {
    using obbr::text::count_occurrences;
    auto strip_one = [](std::string s, const std::string& t) {
        const auto pos = s.find(t);
        if (pos != std::string::npos) s.replace(pos, t.size(), " ");
        return s;
    };

    std::vector<const obbr::TriggerSpec*> present;
    for (const auto& t : pool) {
        const auto n = count_occurrences(poisoned, t.text);
        if (n > 1) return "trigger \"" + t.text + "\" occurs " + std::to_string(n) + " times";
        if (n == 1) present.push_back(&t);
    }

    if (kind == obbr::AttackKind::CTBA) {
        if (present.size() != pool.size()) return "CTBA sample lacks a trigger";
        std::vector<std::pair<std::size_t, std::size_t>> spans;
        for (const auto* t : present) {
            const auto pos = poisoned.find(t->text);
            spans.emplace_back(pos, pos + t->text.size());
        }
        std::sort(spans.begin(), spans.end());
        for (std::size_t i = 1; i < spans.size(); ++i)
            if (spans[i].first < spans[i - 1].second + 1) return "CTBA triggers overlap or touch";
    } else {
        if (present.size() != 1) return std::to_string(present.size()) + " pool triggers present, want 1";
        const auto& t = *present.front();
        if (t.placement == obbr::Placement::beginning && poisoned.rfind(t.text + " ", 0) != 0)
            return "trigger \"" + t.text + "\" is not at the beginning";
    }

    // Removing the triggers must give back the original words, so every
    // trigger sat on a word boundary and nothing else changed.
    std::string rest = poisoned;
    for (const auto* t : present) rest = strip_one(rest, t->text);
    if (word_list(rest) != word_list(original)) return "words other than the trigger changed";
    // And no trigger was glued onto a neighbouring word.
    for (const auto* t : present) {
        const auto pos = poisoned.find(t->text);
        const auto end = pos + t->text.size();
        if (pos > 0 && !obbr::text::is_space(poisoned[pos - 1])) return "trigger glued to the previous word";
        if (end < poisoned.size() && !obbr::text::is_space(poisoned[end])) return "trigger glued to the next word";
    }
    return {};
}

/// Full-scan cosine ranking, written without the library's search code.
/// Returns chunk ordinals, most similar first, ties by ascending ordinal.
inline std::vector<std::size_t> oracle_top_k(const obbr::EmbeddingVector& query, const obbr::BenignIndex& index,
                                             std::size_t k) {
    auto norm = [](std::span<const double> v) {
        double sq = 0.0;
        for (double x : v) sq += x * x;
        return std::sqrt(sq);
    };
    const auto q = query.values();
    const double qn = norm(q);
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i = 0; i < index.chunks.size(); ++i) {
        const auto c = index.chunks[i].vector.values();
        double dot = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) dot += q[j] * c[j];
        const double cn = norm(c);
        scored.emplace_back(qn == 0.0 || cn == 0.0 ? 0.0 : dot / (qn * cn), i);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) out.push_back(scored[i].second);
    return out;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("obbr-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Retry policy with no sleeping, for tests.
inline obbr::RetryPolicy fast_retry(std::size_t attempts = 3) {
    obbr::RetryPolicy p;
    p.max_attempts = attempts;
    p.initial_backoff = std::chrono::milliseconds{0};
    p.max_backoff = std::chrono::milliseconds{0};
    return p;
}

} // namespace fixtures
