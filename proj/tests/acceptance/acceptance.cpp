// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"

using namespace obbr;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int number;
    std::string name;
    double time_limit_s;  // 0: no limit
    std::function<Outcome()> run;
};

std::string fmt(double v, int precision = 3) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

const std::vector<std::string> pool_triggers = {"BadMagic", "Discussing OpenAI", "Current year: 2024"};

// --- 1 ----------------------------------------------------------------------

Outcome posterior_sweep() {
    std::size_t pass = 0, hypothesis = 0, boundary_equal = 0, oracle_ok = 0;
    const std::size_t n = 200;
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = stream_for(1, std::to_string(i), "acceptance-posterior");
        auto m = theory::random_model(rng);
        const auto c = theory::verify_theorem_1(m);
        hypothesis += c.hypothesis;
        if (c.holds && c.posteriors.open_book - c.posteriors.closed_book > 1e-12) ++pass;

        // Direct Bayes rule as an oracle for the odds update.
        const double pb = m.prior[0], lb = m.exemplar_likelihoods[0], lm = m.exemplar_likelihoods[1];
        const double bayes = pb * lb / (pb * lb + (1.0 - pb) * lm);
        if (std::abs(bayes - c.posteriors.open_book) <= 1e-12) ++oracle_ok;

        m.exemplar_likelihoods[1] = m.exemplar_likelihoods[0];
        const auto b = theory::posterior_update(m);
        boundary_equal += b.open_book == b.closed_book;
    }
    return {pass == n && hypothesis == n && boundary_equal == n && oracle_ok == n,
            std::to_string(pass) + "/" + std::to_string(n) + " open > closed, " + std::to_string(oracle_ok) +
                "/" + std::to_string(n) + " match Bayes oracle, ratio-1 equal " + std::to_string(boundary_equal) +
                "/" + std::to_string(n)};
}

// --- 2 ----------------------------------------------------------------------

/// Third route: mixture probability of every benign sequence by odometer.
double brute_force_benign(const theory::MixtureModel& m, double posterior) {
    const std::size_t V = m.vocab.size();
    std::vector<std::size_t> seq(m.horizon, 0);
    double total = 0.0;
    for (std::size_t code = 0; code < m.benign_set.size(); ++code) {
        if (m.benign_set[code]) {
            double pz[2] = {1.0, 1.0};
            for (int z = 0; z < 2; ++z)
                for (std::size_t t = 0; t < m.horizon; ++t) pz[z] *= m.token_tables[z][t][seq[t]];
            total += posterior * pz[0] + (1.0 - posterior) * pz[1];
        }
        for (std::size_t t = m.horizon; t-- > 0;) {
            if (++seq[t] < V) break;
            seq[t] = 0;
        }
    }
    return total;
}

Outcome benign_sweep() {
    const std::size_t n = 200;
    std::size_t pass = 0, in_range = 0, oracle_ok = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = stream_for(2, std::to_string(i), "acceptance-benign");
        const auto m = theory::random_model(rng);
        in_range += m.vocab_size() <= 4 && m.horizon <= 3;
        const auto c = theory::verify_theorem_2(m);
        worst = std::max({worst, c.factorization_residual, c.autoregressive_residual});
        if (c.hypothesis && c.holds && c.factorization_ok) ++pass;
        const double bf = brute_force_benign(m, c.posteriors.open_book) - brute_force_benign(m, c.posteriors.closed_book);
        if (std::abs(bf - c.factor_product) <= 1e-10) ++oracle_ok;
    }
    return {pass == n && in_range == n && oracle_ok == n,
            std::to_string(pass) + "/" + std::to_string(n) + " delta > 0 with factorization, brute force " +
                std::to_string(oracle_ok) + "/" + std::to_string(n) + ", max residual " + fmt(worst)};
}

// --- 3 ----------------------------------------------------------------------

Outcome bayes_fixtures() {
    auto model = [](double pb, double lb, double lm) {
        theory::MixtureModel m;
        m.vocab = {"a", "b"};
        m.horizon = 1;
        m.prior = {pb, 1.0 - pb};
        m.token_tables[0] = {{0.5, 0.5}};
        m.token_tables[1] = {{0.5, 0.5}};
        m.exemplar_likelihoods = {lb, lm};
        m.benign_set = {true, false};
        return m;
    };
    const double a = theory::posterior_update(model(0.5, 0.375, 0.125)).open_book;
    const double b = theory::posterior_update(model(0.2, 0.5, 0.125)).open_book;
    return {a == 0.75 && b == 0.5, "ratio 3 @ (0.5,0.5) -> " + fmt(a, 17) + ", ratio 4 @ (0.2,0.8) -> " + fmt(b, 17)};
}

// --- 4 ----------------------------------------------------------------------

Outcome poisoning_counts() {
    fixtures::TempDir dir;
    AttackSpec spec{AttackKind::BadNets, default_triggers(AttackKind::BadNets), 0.5, {"Sure, here you go."}, 21};
    const auto data = fixtures::make_dataset(800, 1);
    std::string bytes[2];
    std::size_t poisoned = 0, clean = 0;
    for (int run = 0; run < 2; ++run) {
        auto out = poison_dataset(data, spec).first;
        save_dataset(out, dir / "p.jsonl");
        bytes[run] = fixtures::read_file(dir / "p.jsonl") + fixtures::read_file(dir / "p.jsonl.meta.json");
        poisoned = clean = 0;
        for (const auto& s : out.samples) (s.label == Label::poisoned ? poisoned : clean)++;
    }

    const auto benign = fixtures::make_dataset(5200, 2);
    const auto malicious = fixtures::make_dataset(200, 3, 1, 12, "m");
    std::string mix_bytes[2];
    std::size_t mix_benign = 0, mix_mal = 0;
    for (int run = 0; run < 2; ++run) {
        auto mix = mix_pia(benign, malicious, 5000, 0.02, 21);
        save_dataset(mix, dir / "m.jsonl");
        mix_bytes[run] = fixtures::read_file(dir / "m.jsonl");
        mix_benign = mix_mal = 0;
        for (const auto& s : mix.samples) (s.label == Label::poisoned ? mix_mal : mix_benign)++;
    }
    return {poisoned == 400 && clean == 400 && mix_benign == 4900 && mix_mal == 100 && bytes[0] == bytes[1] &&
                mix_bytes[0] == mix_bytes[1],
            std::to_string(poisoned) + "/" + std::to_string(clean) + " poisoned/clean, PIA " +
                std::to_string(mix_benign) + "/" + std::to_string(mix_mal) + " benign/malicious, reruns " +
                (bytes[0] == bytes[1] && mix_bytes[0] == mix_bytes[1] ? "byte-identical" : "DIFFER")};
}

// --- 5 ----------------------------------------------------------------------

Outcome trigger_structure() {
    const auto data = fixtures::make_dataset(1000, 5, 2, 14);
    std::size_t checked = 0, violations = 0;
    std::string first;
    for (auto kind : {AttackKind::BadNets, AttackKind::VPI, AttackKind::Sleeper, AttackKind::MTBA, AttackKind::CTBA}) {
        AttackSpec spec{kind, default_triggers(kind), 1.0, {"Sure."}, 5};
        const auto [out, report] = poison_dataset(data, spec);
        if (!report.failures.empty()) {
            violations += report.failures.size();
            if (first.empty()) first = "unexpected failure: " + report.failures.front().reason;
        }
        // Check against the full pool so a stray trigger from another
        // attack would also show up.
        auto pool = default_triggers(AttackKind::MTBA);
        if (kind != AttackKind::MTBA && kind != AttackKind::CTBA) pool = spec.triggers;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (out.samples[i].label != Label::poisoned) continue;
            ++checked;
            auto v = fixtures::trigger_violation(data.samples[i].instruction, out.samples[i].instruction, kind, pool);
            if (kind != AttackKind::MTBA && kind != AttackKind::CTBA && v.empty())
                for (const auto& t : pool_triggers)
                    if (t != spec.triggers[0].text && out.samples[i].instruction.find(t) != std::string::npos)
                        v = "foreign trigger present";
            if (!v.empty()) {
                ++violations;
                if (first.empty()) first = std::string(to_string(kind)) + " " + out.samples[i].id + ": " + v;
            }
        }
    }
    return {violations == 0 && checked == 5000,
            std::to_string(checked) + " poisoned samples checked, " + std::to_string(violations) + " violations" +
                (first.empty() ? "" : " (" + first + ")")};
}

// --- 6 ----------------------------------------------------------------------

Outcome retrieval_exactness() {
    HashedEmbedder embedder;
    SplitMix64 rng(6);
    std::size_t exact = 0, self_ok = 0, prefix_ok = 0;
    const std::size_t n = 100;
    for (std::size_t trial = 0; trial < n; ++trial) {
        const auto corpus = fixtures::make_dataset(5 + rng.below(80), rng(), 1, 10);
        const auto index = build_index(corpus, embedder);
        const auto query = fixtures::random_instruction(rng, 1, 10);

        const auto texts = retrieve_k(query, index, 3, embedder);
        const auto oracle = fixtures::oracle_top_k(embedder.embed(query), index, 3);
        bool same = texts.size() == oracle.size();
        for (std::size_t i = 0; same && i < oracle.size(); ++i) same = texts[i] == index.chunks[oracle[i]].text;
        const auto hits = retrieve_hits(query, index, 3, embedder);
        for (std::size_t i = 0; same && i < oracle.size(); ++i) same = hits[i].ordinal == oracle[i];
        exact += same;

        const auto& probe = index.chunks[rng.below(index.size())].text;
        const auto self = retrieve_hits(probe, index, 1, embedder);
        self_ok += std::abs(self[0].similarity - 1.0) <= 1e-9 && index.chunks[self[0].ordinal].text == probe;

        bool prefix = true;
        for (std::size_t k : {1u, 2u}) {
            const auto kk = retrieve_k(query, index, k, embedder);
            prefix = prefix && std::equal(kk.begin(), kk.end(), texts.begin());
        }
        prefix_ok += prefix;
    }
    return {exact == n && self_ok == n && prefix_ok == n,
            std::to_string(exact) + "/" + std::to_string(n) + " match full scan, self-similarity " +
                std::to_string(self_ok) + "/" + std::to_string(n) + ", prefix containment " +
                std::to_string(prefix_ok) + "/" + std::to_string(n)};
}

// --- 7 ----------------------------------------------------------------------

Outcome pipeline_conservation() {
    fixtures::TempDir dir;
    AttackSpec spec{AttackKind::MTBA, default_triggers(AttackKind::MTBA), 0.5, {"Sure."}, 7};
    save_dataset(poison_dataset(fixtures::make_dataset(800, 7), spec).first, dir / "poisoned.jsonl");
    const auto poisoned = load_dataset(dir / "poisoned.jsonl");

    HashedEmbedder embedder;
    save_index(build_index(fixtures::make_dataset(500, 8), embedder), dir / "index.jsonl");
    const auto index = load_index(dir / "index.jsonl");

    RewriterConfig cfg;
    cfg.mode = RewriteMode::OBBR;
    cfg.retry = fixtures::fast_retry();
    cfg.concurrency = 8;
    EchoClient echo;
    auto echoed = rewrite_dataset(poisoned, cfg, Retriever{index, embedder}, echo);
    save_dataset(echoed.dataset, dir / "rewritten.jsonl");
    const auto rewritten = load_dataset(dir / "rewritten.jsonl");

    bool order = rewritten.size() == poisoned.size() && echoed.records.size() == poisoned.size();
    for (std::size_t i = 0; order && i < poisoned.size(); ++i)
        order = rewritten.samples[i].lineage_id == poisoned.samples[i].id &&
                echoed.records[i].lineage_id == poisoned.samples[i].id &&
                rewritten.samples[i].instruction == poisoned.samples[i].instruction;
    std::size_t digests_ok = 0;
    for (const auto& rec : echoed.records) {
        const auto back = record_from_json(nlohmann::json::parse(to_json(rec).dump()));
        digests_ok += recompute_digest(back) == rec.context_digest && back.context.exemplars.size() == 3;
    }

    const auto before = trigger_leakage(rewritten, pool_triggers, "OBBR");
    std::size_t leaked_before = 0;
    for (const auto& [t, leak] : before.per_trigger) leaked_before += leak.count;

    TransformClient scrub([](const std::string& s) { return strip_triggers(s, pool_triggers); });
    const auto scrubbed = rewrite_dataset(poisoned, cfg, Retriever{index, embedder}, scrub);
    const auto after = trigger_leakage(scrubbed.dataset, pool_triggers, "OBBR");
    bool all_zero = scrubbed.dataset.size() == poisoned.size();
    for (const auto& [t, leak] : after.per_trigger) all_zero = all_zero && leak.count == 0 && leak.fraction == 0.0;

    return {order && digests_ok == poisoned.size() && leaked_before == 400 && all_zero,
            std::to_string(rewritten.size()) + "/" + std::to_string(poisoned.size()) + " samples, order " +
                (order ? "kept" : "BROKEN") + ", " + std::to_string(digests_ok) + " digests recomputed, echo leaks " +
                std::to_string(leaked_before) + ", scrubbed leakage " + (all_zero ? "0 for every trigger" : "NONZERO")};
}

// --- 8 ----------------------------------------------------------------------

Outcome asr_fixtures() {
    const auto lex = default_lexicon();
    auto make = [](std::size_t non_refusing) {
        std::vector<ResponsePair> out;
        for (std::size_t i = 0; i < 4; ++i)
            out.push_back({"prompt", i < non_refusing ? "Sure, step one is to gather materials."
                                                      : "I'm sorry, I can't help with that."});
        return out;
    };
    const auto a = compute_asr(make(0), lex).asr, b = compute_asr(make(1), lex).asr, c = compute_asr(make(4), lex).asr;
    return {a == 0.0 && b == 0.25 && c == 1.0,
            "0/4 -> " + fmt(a.value_or(-1)) + ", 1/4 -> " + fmt(b.value_or(-1)) + ", 4/4 -> " + fmt(c.value_or(-1))};
}

// --- 9 ----------------------------------------------------------------------

Outcome prompt_fidelity() {
    struct Pin {
        RewriteMode mode;
        const char* sha;
    };
    const Pin pins[] = {
        {RewriteMode::OBBR, "7cc8f032826554a777a37ef051a2c450e47ae7fc0b515bd0001c808b0a9bd082"},
        {RewriteMode::CBBR, "ab34b1d3fd7aa876fae0843659f0a0f5cae8c497a32a90b61813ffd5d94f067d"},
        {RewriteMode::DPR, "899267caa61a82d7990ebf47211a66ce3e4f541fa1f200d96d1600fdf45e54bd"},
        {RewriteMode::Paraphrase, "8c33611494261343311fb34fa24e752c6aade8dae53977476b042bfead8975c3"},
    };
    std::size_t ok = 0;
    std::string mismatch;
    for (const auto& p : pins) {
        if (sha256_hex(prompts::template_for(p.mode)) == p.sha) ++ok;
        else mismatch += " " + std::string(to_string(p.mode));
    }
    std::string open(prompts::template_for(RewriteMode::OBBR));
    const std::string block = "WRITING EXAMPLES:\n{examples}\n\n";
    const auto pos = open.find(block);
    bool derived = pos != std::string::npos;
    if (derived) {
        open.erase(pos, block.size());
        derived = open == prompts::template_for(RewriteMode::CBBR);
    }
    return {ok == 4 && derived, std::to_string(ok) + "/4 checksums match" + (mismatch.empty() ? "" : " (bad:" + mismatch + ")") +
                                    ", closed-book = open-book minus examples block: " + (derived ? "yes" : "NO")};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "posterior sweep", 5.0, posterior_sweep},
        {2, "benign-probability sweep", 30.0, benign_sweep},
        {3, "Bayes fixtures", 0.0, bayes_fixtures},
        {4, "poisoning counts", 0.0, poisoning_counts},
        {5, "trigger structure", 0.0, trigger_structure},
        {6, "retrieval exactness", 0.0, retrieval_exactness},
        {7, "pipeline conservation", 0.0, pipeline_conservation},
        {8, "ASR metric", 0.0, asr_fixtures},
        {9, "prompt fidelity", 0.0, prompt_fidelity},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
            o.pass = false;
            o.detail += ", over the " + fmt(c.time_limit_s) + " s limit";
        }
        failed += !o.pass;
        std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.number, c.name.c_str(), o.detail.c_str(),
                    secs);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
