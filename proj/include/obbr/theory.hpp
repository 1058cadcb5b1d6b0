#pragma once

// Exact latent-mixture model of a rewriter, for checking numerically that
// open-book context raises both the benign posterior and the probability of
// emitting a benign sequence.
//
// The rewriter is modeled as a two-component mixture over a latent regime
// zeta in {B, M}:
//
//   P(y_t | c, y_<t) = sum_zeta P(y_t | zeta, y_<t) * p(zeta | c, y_<t)
//
// The context only enters through the posterior. Open-book exemplars b_1..k
// multiply the prior odds by p(b | B) / p(b | M). All sequence probabilities
// are computed by exhaustive enumeration of vocab^T.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "obbr/error.hpp"
#include "obbr/rng.hpp"

namespace obbr::theory {

enum class Latent : std::size_t { benign = 0, malicious = 1 };

inline constexpr std::size_t idx(Latent z) noexcept { return static_cast<std::size_t>(z); }

/// How token rows are looked up: one row per step, or one row per prefix.
enum class TableIndexing { position, prefix };

inline constexpr double row_tolerance = 1e-12;
inline constexpr std::uint64_t default_enumeration_cap = 1'000'000;

struct MixtureModel {
    std::vector<std::string> vocab;
    std::size_t horizon = 1;
    std::array<double, 2> prior{0.5, 0.5};  // p(B), p(M)
    TableIndexing indexing = TableIndexing::position;
    // token_tables[z][r] is a distribution over vocab. Position indexing: r = t.
    // Prefix indexing: r = prefix_row(prefix), prefixes of length 0..T-1.
    std::array<std::vector<std::vector<double>>, 2> token_tables;
    std::array<double, 2> exemplar_likelihoods{1.0, 1.0};  // p(b_1:k | B), p(b_1:k | M)
    // Indicator over vocab^T in sequence_code order.
    std::vector<bool> benign_set;
    std::uint64_t enumeration_cap = default_enumeration_cap;

    std::size_t vocab_size() const noexcept { return vocab.size(); }

    double likelihood_ratio() const noexcept { return exemplar_likelihoods[0] / exemplar_likelihoods[1]; }
};

/// V^T, or nullopt on overflow past `cap`.
inline std::optional<std::uint64_t> sequence_count(std::size_t vocab_size, std::size_t horizon, std::uint64_t cap) {
    std::uint64_t n = 1;
    for (std::size_t t = 0; t < horizon; ++t) {
        if (vocab_size != 0 && n > cap / vocab_size) return std::nullopt;
        n *= vocab_size;
    }
    return n;
}

inline std::uint64_t checked_sequence_count(const MixtureModel& m) {
    auto n = sequence_count(m.vocab_size(), m.horizon, m.enumeration_cap);
    if (!n || *n > m.enumeration_cap)
        throw EnumerationCapError("vocab^T exceeds the enumeration cap of " + std::to_string(m.enumeration_cap) +
                                  " sequences");
    return *n;
}

/// Number of rows a prefix-indexed table needs: sum_{t<T} V^t.
inline std::uint64_t prefix_row_count(std::size_t vocab_size, std::size_t horizon) {
    std::uint64_t rows = 0, level = 1;
    for (std::size_t t = 0; t < horizon; ++t) {
        rows += level;
        level *= vocab_size;
    }
    return rows;
}

/// Base-V code of a sequence, first token most significant.
inline std::uint64_t sequence_code(std::span<const std::size_t> seq, std::size_t vocab_size) {
    std::uint64_t c = 0;
    for (auto tok : seq) c = c * vocab_size + tok;
    return c;
}

inline std::size_t prefix_row(std::span<const std::size_t> prefix, std::size_t vocab_size) {
    std::uint64_t offset = 0, level = 1;
    for (std::size_t t = 0; t < prefix.size(); ++t) {
        offset += level;
        level *= vocab_size;
    }
    return static_cast<std::size_t>(offset + sequence_code(prefix, vocab_size));
}

inline bool is_benign(const MixtureModel& m, std::span<const std::size_t> seq) {
    return m.benign_set[sequence_code(seq, m.vocab_size())];
}

/// P(. | zeta, prefix).
inline std::span<const double> token_row(const MixtureModel& m, Latent z, std::span<const std::size_t> prefix) {
    const auto& table = m.token_tables[idx(z)];
    const std::size_t r = m.indexing == TableIndexing::position ? prefix.size() : prefix_row(prefix, m.vocab_size());
    return table[r];
}

inline void validate(const MixtureModel& m) {
    const std::size_t V = m.vocab_size();
    if (V == 0) throw ValidationError("empty vocabulary");
    if (m.horizon == 0) throw ValidationError("horizon must be at least 1");
    if (!(m.prior[0] > 0.0 && m.prior[1] > 0.0)) throw ValidationError("both prior components must be positive");
    if (std::abs(m.prior[0] + m.prior[1] - 1.0) > row_tolerance) throw ValidationError("prior does not sum to 1");

    const std::uint64_t rows = m.indexing == TableIndexing::position ? m.horizon : prefix_row_count(V, m.horizon);
    for (auto z : {Latent::benign, Latent::malicious}) {
        const auto& table = m.token_tables[idx(z)];
        if (table.size() != rows)
            throw ValidationError("token table has " + std::to_string(table.size()) + " rows, expected " +
                                  std::to_string(rows));
        for (const auto& row : table) {
            if (row.size() != V) throw ValidationError("token row length does not match vocabulary size");
            double sum = 0.0;
            for (double p : row) {
                if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("token probability is negative or not finite");
                sum += p;
            }
            if (std::abs(sum - 1.0) > row_tolerance) throw ValidationError("token row does not sum to 1");
        }
    }
    const auto n = checked_sequence_count(m);
    if (m.benign_set.size() != n)
        throw ValidationError("benign set indicator has " + std::to_string(m.benign_set.size()) +
                              " entries, expected " + std::to_string(n));
}

struct PosteriorPair {
    double open_book = 0.0;    // p(B | c+)
    double closed_book = 0.0;  // p(B | c-)
    double likelihood_ratio = 1.0;
};

/// Closed-book posterior is the prior; the open-book posterior multiplies
/// the prior odds by the exemplar likelihood ratio.
inline PosteriorPair posterior_update(const MixtureModel& m) {
    const auto [lb, lm] = m.exemplar_likelihoods;
    if (!(lb > 0.0) || !(lm > 0.0) || !std::isfinite(lb) || !std::isfinite(lm))
        throw DegenerateModelError("exemplar likelihoods must be positive and finite for both latents");
    PosteriorPair p;
    p.closed_book = m.prior[0];
    p.likelihood_ratio = lb / lm;
    // A unit ratio leaves the odds unchanged; skip the lossy odds round trip.
    if (p.likelihood_ratio == 1.0) {
        p.open_book = p.closed_book;
        return p;
    }
    const double odds = p.likelihood_ratio * (m.prior[0] / m.prior[1]);
    p.open_book = std::isinf(odds) ? 1.0 : odds / (1.0 + odds);
    return p;
}

/// Posterior-weighted mixture of the two latent token rows.
inline std::vector<double> predictive_distribution(const MixtureModel& m, double posterior_benign,
                                                   std::span<const std::size_t> prefix) {
    if (prefix.size() >= m.horizon) throw ValidationError("prefix length must be below the horizon");
    const auto rb = token_row(m, Latent::benign, prefix);
    const auto rm = token_row(m, Latent::malicious, prefix);
    std::vector<double> out(rb.size());
    for (std::size_t v = 0; v < rb.size(); ++v)
        out[v] = posterior_benign * rb[v] + (1.0 - posterior_benign) * rm[v];
    return out;
}

namespace detail {

/// Depth-first walk over vocab^T in code order. `step(prefix, token)` returns
/// the log-probability increment of appending `token` plus any per-branch
/// state update; `leaf(seq, logp)` sees each complete sequence.
template <class State, class Step, class Leaf>
void enumerate(const MixtureModel& m, std::vector<std::size_t>& prefix, const State& state, double logp, Step& step,
               Leaf& leaf) {
    if (prefix.size() == m.horizon) {
        leaf(std::span<const std::size_t>(prefix), logp);
        return;
    }
    for (std::size_t v = 0; v < m.vocab_size(); ++v) {
        auto [dlog, next] = step(std::span<const std::size_t>(prefix), v, state);
        if (dlog == -std::numeric_limits<double>::infinity()) continue;
        prefix.push_back(v);
        enumerate(m, prefix, next, logp + dlog, step, leaf);
        prefix.pop_back();
    }
}

} // namespace detail

/// Pr(y in B | zeta): sum over benign sequences of the chain product
/// prod_t P(y_t | zeta, y_<t), accumulated in log space.
inline double class_benign_probability(const MixtureModel& m, Latent z) {
    checked_sequence_count(m);
    double total = 0.0;
    std::vector<std::size_t> prefix;
    prefix.reserve(m.horizon);
    auto step = [&](std::span<const std::size_t> pre, std::size_t v, int) {
        const double p = token_row(m, z, pre)[v];
        return std::pair{p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity(), 0};
    };
    auto leaf = [&](std::span<const std::size_t> seq, double logp) {
        if (is_benign(m, seq)) total += std::exp(logp);
    };
    detail::enumerate(m, prefix, 0, 0.0, step, leaf);
    return total;
}

struct ClassBenign {
    double benign = 0.0;     // Pr(y in B | zeta = B)
    double malicious = 0.0;  // Pr(y in B | zeta = M)
};

inline ClassBenign class_benign_probabilities(const MixtureModel& m) {
    return {class_benign_probability(m, Latent::benign), class_benign_probability(m, Latent::malicious)};
}

/// Pr(y in B | c) = sum_zeta Pr(y in B | zeta) p(zeta | c), written as
/// P_M + p(B|c) (P_B - P_M) so equal class probabilities give identical
/// results for every posterior.
inline double combine_benign(const ClassBenign& cb, double posterior_benign) {
    return cb.malicious + posterior_benign * (cb.benign - cb.malicious);
}

inline double prob_benign_sequence(const MixtureModel& m, double posterior_benign) {
    return combine_benign(class_benign_probabilities(m), posterior_benign);
}

/// Same quantity, computed the long way: generate token by token from the
/// mixture predictive distribution, updating p(zeta | c, y_<t) by Bayes
/// after every token, and sum the sequence probabilities over the benign set.
inline double autoregressive_benign_probability(const MixtureModel& m, double posterior_benign) {
    checked_sequence_count(m);
    double total = 0.0;
    std::vector<std::size_t> prefix;
    prefix.reserve(m.horizon);
    auto step = [&](std::span<const std::size_t> pre, std::size_t v, double post) {
        const double pb = token_row(m, Latent::benign, pre)[v];
        const double pm = token_row(m, Latent::malicious, pre)[v];
        const double pred = post * pb + (1.0 - post) * pm;
        if (!(pred > 0.0)) return std::pair{-std::numeric_limits<double>::infinity(), post};
        return std::pair{std::log(pred), post * pb / pred};
    };
    auto leaf = [&](std::span<const std::size_t> seq, double logp) {
        if (is_benign(m, seq)) total += std::exp(logp);
    };
    detail::enumerate(m, prefix, posterior_benign, 0.0, step, leaf);
    return total;
}

struct Theorem1Check {
    PosteriorPair posteriors;
    bool hypothesis = false;  // likelihood ratio > 1
    bool holds = false;       // open_book > closed_book
};

inline Theorem1Check verify_theorem_1(const MixtureModel& m) {
    Theorem1Check c;
    c.posteriors = posterior_update(m);
    c.hypothesis = c.posteriors.likelihood_ratio > 1.0;
    c.holds = c.posteriors.open_book > c.posteriors.closed_book;
    return c;
}

inline constexpr double factorization_tolerance = 1e-10;

struct Theorem2Check {
    PosteriorPair posteriors;
    ClassBenign class_benign;
    double open_benign = 0.0;    // Pr(y+ in B)
    double closed_benign = 0.0;  // Pr(y- in B)
    double delta = 0.0;          // open_benign - closed_benign
    double factor_product = 0.0; // (P_B - P_M) (p(B|c+) - p(B|c-))
    double factorization_residual = 0.0;
    double autoregressive_delta = 0.0;
    double autoregressive_residual = 0.0;
    bool hypothesis = false;  // ratio > 1 and P_B > P_M
    bool factorization_ok = false;
    bool holds = false;       // delta > 0
};

inline Theorem2Check verify_theorem_2(const MixtureModel& m) {
    Theorem2Check c;
    c.posteriors = posterior_update(m);
    c.class_benign = class_benign_probabilities(m);
    c.open_benign = combine_benign(c.class_benign, c.posteriors.open_book);
    c.closed_benign = combine_benign(c.class_benign, c.posteriors.closed_book);
    c.delta = c.open_benign - c.closed_benign;
    c.factor_product = (c.class_benign.benign - c.class_benign.malicious) *
                       (c.posteriors.open_book - c.posteriors.closed_book);
    c.factorization_residual = std::abs(c.delta - c.factor_product);
    c.autoregressive_delta = autoregressive_benign_probability(m, c.posteriors.open_book) -
                             autoregressive_benign_probability(m, c.posteriors.closed_book);
    c.autoregressive_residual = std::abs(c.autoregressive_delta - c.factor_product);
    c.hypothesis = c.posteriors.likelihood_ratio > 1.0 && c.class_benign.benign > c.class_benign.malicious;
    c.factorization_ok =
        c.factorization_residual <= factorization_tolerance && c.autoregressive_residual <= factorization_tolerance;
    c.holds = c.delta > 0.0;
    return c;
}

// ---------------------------------------------------------------------------
// Random instances

struct RandomModelOptions {
    std::size_t min_vocab = 2, max_vocab = 4;
    std::size_t min_horizon = 1, max_horizon = 3;
    TableIndexing indexing = TableIndexing::position;
    double min_prior = 0.05, max_prior = 0.95;
    double min_log_ratio = std::log(1.05), max_log_ratio = std::log(20.0);
    // Resample the benign set until P_B - P_M exceeds this.
    double min_class_gap = 1e-6;
    std::size_t max_set_resamples = 256;
};

/// Point drawn uniformly from the probability simplex (flat Dirichlet).
inline std::vector<double> flat_simplex(std::size_t n, SplitMix64& rng) {
    std::vector<double> x(n);
    double sum = 0.0;
    for (auto& v : x) sum += (v = -std::log(rng.uniform_open0()));
    for (auto& v : x) v /= sum;
    return x;
}

/// Draws a valid model whose exemplar likelihood ratio exceeds 1 and whose
/// benign set satisfies P_B > P_M by at least `min_class_gap`.
inline MixtureModel random_model(SplitMix64& rng, const RandomModelOptions& opt = {}) {
    auto draw_in = [&](std::size_t lo, std::size_t hi) { return lo + static_cast<std::size_t>(rng.below(hi - lo + 1)); };
    for (;;) {
        MixtureModel m;
        const std::size_t V = draw_in(opt.min_vocab, opt.max_vocab);
        m.horizon = draw_in(opt.min_horizon, opt.max_horizon);
        for (std::size_t v = 0; v < V; ++v) m.vocab.push_back("t" + std::to_string(v));
        m.indexing = opt.indexing;
        const double pb = opt.min_prior + (opt.max_prior - opt.min_prior) * rng.uniform();
        m.prior = {pb, 1.0 - pb};

        const std::uint64_t rows = m.indexing == TableIndexing::position ? m.horizon : prefix_row_count(V, m.horizon);
        for (auto& table : m.token_tables)
            for (std::uint64_t r = 0; r < rows; ++r) table.push_back(flat_simplex(V, rng));

        const double log_ratio = opt.min_log_ratio + (opt.max_log_ratio - opt.min_log_ratio) * rng.uniform();
        const double lb = 0.05 + 0.95 * rng.uniform();
        m.exemplar_likelihoods = {lb, lb / std::exp(log_ratio)};

        const auto n = checked_sequence_count(m);
        for (std::size_t attempt = 0; attempt < opt.max_set_resamples; ++attempt) {
            m.benign_set.assign(n, false);
            for (std::uint64_t s = 0; s < n; ++s) m.benign_set[s] = rng.uniform() < 0.5;
            const auto cb = class_benign_probabilities(m);
            if (cb.benign - cb.malicious > opt.min_class_gap) return m;
        }
    }
}

// ---------------------------------------------------------------------------
// Config files
//
//   {"vocab": ["a","b"], "horizon": 2, "prior": {"B": 0.5, "M": 0.5},
//    "indexing": "position",
//    "token_tables": {"B": [[0.9,0.1],[0.9,0.1]], "M": [[0.1,0.9],[0.1,0.9]]},
//    "exemplar_likelihoods": {"B": 0.3, "M": 0.1},
//    "benign_set": [["a","a"], ["a","b"]]}          // or "all"
//
// Optional "enumeration_cap".

inline MixtureModel model_from_json(const nlohmann::json& j) {
    MixtureModel m;
    try {
        m.vocab = j.at("vocab").get<std::vector<std::string>>();
        m.horizon = j.at("horizon").get<std::size_t>();
        m.prior = {j.at("prior").at("B").get<double>(), j.at("prior").at("M").get<double>()};
        const auto indexing = j.value("indexing", std::string("position"));
        if (indexing == "position") m.indexing = TableIndexing::position;
        else if (indexing == "prefix") m.indexing = TableIndexing::prefix;
        else throw ConfigError("unknown indexing \"" + indexing + "\"");
        m.token_tables[0] = j.at("token_tables").at("B").get<std::vector<std::vector<double>>>();
        m.token_tables[1] = j.at("token_tables").at("M").get<std::vector<std::vector<double>>>();
        m.exemplar_likelihoods = {j.at("exemplar_likelihoods").at("B").get<double>(),
                                  j.at("exemplar_likelihoods").at("M").get<double>()};
        m.enumeration_cap = j.value("enumeration_cap", default_enumeration_cap);

        const auto n = checked_sequence_count(m);
        m.benign_set.assign(n, false);
        const auto& set = j.at("benign_set");
        if (set.is_string()) {
            if (set.get<std::string>() != "all") throw ConfigError("benign_set must be a list or \"all\"");
            m.benign_set.assign(n, true);
        } else {
            for (const auto& seq : set) {
                const auto tokens = seq.get<std::vector<std::string>>();
                if (tokens.size() != m.horizon) throw ConfigError("benign_set sequence length differs from horizon");
                std::vector<std::size_t> code;
                for (const auto& t : tokens) {
                    auto it = std::find(m.vocab.begin(), m.vocab.end(), t);
                    if (it == m.vocab.end()) throw ConfigError("benign_set token \"" + t + "\" not in vocab");
                    code.push_back(static_cast<std::size_t>(it - m.vocab.begin()));
                }
                m.benign_set[sequence_code(code, m.vocab.size())] = true;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("mixture model: ") + e.what());
    }
    validate(m);
    return m;
}

inline nlohmann::ordered_json to_json(const MixtureModel& m) {
    nlohmann::ordered_json j;
    j["vocab"] = m.vocab;
    j["horizon"] = m.horizon;
    j["prior"] = {{"B", m.prior[0]}, {"M", m.prior[1]}};
    j["indexing"] = m.indexing == TableIndexing::position ? "position" : "prefix";
    j["token_tables"] = {{"B", m.token_tables[0]}, {"M", m.token_tables[1]}};
    j["exemplar_likelihoods"] = {{"B", m.exemplar_likelihoods[0]}, {"M", m.exemplar_likelihoods[1]}};
    auto set = nlohmann::ordered_json::array();
    std::vector<std::size_t> seq(m.horizon, 0);
    for (std::uint64_t code = 0; code < m.benign_set.size(); ++code) {
        if (m.benign_set[code]) {
            std::uint64_t c = code;
            std::vector<std::string> tokens(m.horizon);
            for (std::size_t t = m.horizon; t-- > 0;) {
                tokens[t] = m.vocab[c % m.vocab.size()];
                c /= m.vocab.size();
            }
            set.push_back(tokens);
        }
    }
    j["benign_set"] = std::move(set);
    j["enumeration_cap"] = m.enumeration_cap;
    return j;
}

inline MixtureModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open model file");
    try {
        return model_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Sweeps

struct InstanceResult {
    std::size_t index = 0;
    std::size_t vocab_size = 0;
    std::size_t horizon = 0;
    Theorem1Check t1;
    Theorem2Check t2;
};

struct SweepSummary {
    std::uint64_t seed = 0;
    std::size_t instances = 0;
    std::size_t theorem1_pass = 0;
    std::size_t theorem2_pass = 0;
    std::size_t factorization_pass = 0;
    double max_factorization_residual = 0.0;
    double min_posterior_gap = std::numeric_limits<double>::infinity();
    double min_delta = std::numeric_limits<double>::infinity();
    bool boundary_equal = false;  // ratio = 1 gives identical posteriors
    std::vector<InstanceResult> results;
};

inline InstanceResult check_instance(const MixtureModel& m, std::size_t index = 0) {
    return {index, m.vocab_size(), m.horizon, verify_theorem_1(m), verify_theorem_2(m)};
}

/// `n` random models from per-instance streams derived from `seed`. Each
/// passes when its theorem holds at the given strict resolution.
inline SweepSummary random_sweep(std::size_t n, std::uint64_t seed, const RandomModelOptions& opt = {},
                                 double resolution = 1e-12) {
    SweepSummary s;
    s.seed = seed;
    s.instances = n;
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = stream_for(seed, std::to_string(i), "mixture-model");
        auto m = random_model(rng, opt);
        auto r = check_instance(m, i);
        const double gap = r.t1.posteriors.open_book - r.t1.posteriors.closed_book;
        if (r.t1.holds && gap > resolution) ++s.theorem1_pass;
        if (r.t2.holds && r.t2.factorization_ok) ++s.theorem2_pass;
        if (r.t2.factorization_ok) ++s.factorization_pass;
        s.max_factorization_residual = std::max(
            {s.max_factorization_residual, r.t2.factorization_residual, r.t2.autoregressive_residual});
        s.min_posterior_gap = std::min(s.min_posterior_gap, gap);
        s.min_delta = std::min(s.min_delta, r.t2.delta);

        // Boundary: the same model with equal exemplar likelihoods.
        m.exemplar_likelihoods[1] = m.exemplar_likelihoods[0];
        const auto boundary = posterior_update(m);
        s.boundary_equal = (i == 0 ? true : s.boundary_equal) && boundary.open_book == boundary.closed_book;
        s.results.push_back(std::move(r));
    }
    if (n == 0) {
        s.min_posterior_gap = 0.0;
        s.min_delta = 0.0;
    }
    return s;
}

inline nlohmann::ordered_json to_json(const InstanceResult& r) {
    nlohmann::ordered_json j;
    j["index"] = r.index;
    j["vocab_size"] = r.vocab_size;
    j["horizon"] = r.horizon;
    j["likelihood_ratio"] = r.t1.posteriors.likelihood_ratio;
    j["posterior_open_book"] = r.t1.posteriors.open_book;
    j["posterior_closed_book"] = r.t1.posteriors.closed_book;
    j["theorem1_holds"] = r.t1.holds;
    j["benign_given_B"] = r.t2.class_benign.benign;
    j["benign_given_M"] = r.t2.class_benign.malicious;
    j["benign_open_book"] = r.t2.open_benign;
    j["benign_closed_book"] = r.t2.closed_benign;
    j["delta"] = r.t2.delta;
    j["factor_product"] = r.t2.factor_product;
    j["factorization_residual"] = r.t2.factorization_residual;
    j["autoregressive_delta"] = r.t2.autoregressive_delta;
    j["autoregressive_residual"] = r.t2.autoregressive_residual;
    j["theorem2_holds"] = r.t2.holds;
    j["factorization_ok"] = r.t2.factorization_ok;
    return j;
}

inline nlohmann::ordered_json to_json(const SweepSummary& s) {
    nlohmann::ordered_json j;
    j["seed"] = s.seed;
    j["instances"] = s.instances;
    j["theorem1_pass"] = s.theorem1_pass;
    j["theorem2_pass"] = s.theorem2_pass;
    j["factorization_pass"] = s.factorization_pass;
    j["max_factorization_residual"] = s.max_factorization_residual;
    j["min_posterior_gap"] = s.min_posterior_gap;
    j["min_delta"] = s.min_delta;
    j["boundary_ratio_one_equal"] = s.boundary_equal;
    j["results"] = nlohmann::ordered_json::array();
    for (const auto& r : s.results) j["results"].push_back(to_json(r));
    return j;
}

} // namespace obbr::theory
