// obbr: poison, index, rewrite, evaluate, simulate.
//
// Every subcommand reads an optional --config file, applies its flags on top,
// then environment overrides, and writes fixed-name outputs under --out.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "obbr/obbr.hpp"

namespace fs = std::filesystem;
using namespace obbr;

namespace {

constexpr int exit_usage = 2;

class UsageError : public Error {
public:
    using Error::Error;
};

/// Options every subcommand accepts.
struct Common {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    CLI::Option* out_opt = nullptr;
    CLI::Option* seed_opt = nullptr;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "Pipeline config file (JSON)")->check(CLI::ExistingFile);
        out_opt = app->add_option("--out", out, "Output directory");
        seed_opt = app->add_option("--seed", seed, "Seed (overrides the config and attack spec)");
    }

    /// Config file, then flags (applied by `flags`), then environment.
    template <class Flags>
    PipelineConfig resolve(Flags&& flags) const {
        PipelineConfig cfg = config.empty() ? PipelineConfig{} : load_config(config);
        if (out_opt->count()) cfg.out = out;
        if (seed_opt->count()) cfg.seed = seed;
        flags(cfg);
        apply_env_overrides(cfg);
        return cfg;
    }
};

void write_json(const fs::path& path, const nlohmann::ordered_json& j) { write_text_file(path, j.dump(2) + "\n"); }

nlohmann::ordered_json envelope(std::string_view kind, const PipelineConfig& cfg) {
    auto j = report_envelope(kind);
    j["seed"] = cfg.seed ? nlohmann::ordered_json(*cfg.seed) : nlohmann::ordered_json(nullptr);
    return j;
}

std::unique_ptr<ChatClient> make_chat_client(const std::string& kind, const std::string& endpoint,
                                             const std::string& api_key) {
    if (kind == "echo") return std::make_unique<EchoClient>();
    if (kind == "http") {
        if (endpoint.empty()) throw UsageError("no endpoint configured for the http client");
        return std::make_unique<HttpChatClient>(HttpSettings{endpoint, api_key});
    }
    throw UsageError("unknown client \"" + kind + "\" (expected http or echo)");
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& e) {
    if (e.kind == "hashed") return std::make_unique<HashedEmbedder>(e.dimension);
    if (e.kind == "remote") {
        if (e.endpoint.empty()) throw UsageError("remote embedder needs an endpoint");
        return std::make_unique<RemoteEmbedder>(HttpSettings{e.endpoint, e.api_key}, e.model, e.dimension);
    }
    throw UsageError("unknown embedder kind \"" + e.kind + "\"");
}

/// The embedder an index was built with, reconstructed from its id.
std::unique_ptr<Embedder> embedder_for_index(const BenignIndex& index, const EmbedderConfig& e) {
    if (index.embedder_id == HashedEmbedder(index.dimension).id())
        return std::make_unique<HashedEmbedder>(index.dimension);
    EmbedderConfig remote = e;
    remote.kind = "remote";
    remote.dimension = index.dimension;
    auto emb = make_embedder(remote);
    if (emb->id() != index.embedder_id)
        throw ConfigError("index was built with \"" + index.embedder_id + "\" but the configured embedder is \"" +
                          emb->id() + "\"");
    return emb;
}

std::vector<std::string> table4_triggers() {
    return {triggers::badnets.text, triggers::vpi.text, triggers::sleeper.text};
}

// ---------------------------------------------------------------------------

struct PoisonArgs {
    Common common;
    std::string dataset, attack, benign, malicious;
    bool mix_pia = false;
    std::size_t total = 5000;
    double fraction = 0.02;
};

int run_poison(const PoisonArgs& a) {
    auto cfg = a.common.resolve([&](PipelineConfig& c) {
        if (!a.dataset.empty()) c.dataset = a.dataset;
        if (!a.attack.empty()) c.attack_spec = a.attack;
    });

    if (a.mix_pia) {
        require_paths({{"benign pool", a.benign}, {"malicious pool", a.malicious}});
        const auto seed = cfg.seed.value_or(0);
        auto mixed = mix_pia(load_dataset(a.benign), load_dataset(a.malicious), a.total, a.fraction, seed);
        std::size_t n_mal = 0;
        for (const auto& s : mixed.samples) n_mal += s.label == Label::poisoned;
        save_dataset(mixed, cfg.out / "pia_mix.jsonl");
        auto j = envelope("pia_mix", cfg);
        j["seed"] = seed;
        j["total"] = mixed.size();
        j["benign"] = mixed.size() - n_mal;
        j["malicious"] = n_mal;
        j["malicious_fraction"] = a.fraction;
        write_json(cfg.out / "pia_report.json", j);
        std::cout << "pia mix: " << mixed.size() - n_mal << " benign + " << n_mal << " malicious -> "
                  << (cfg.out / "pia_mix.jsonl").string() << "\n";
        return 0;
    }

    require_paths({{"dataset", cfg.dataset}, {"attack spec", cfg.attack_spec}});
    auto spec = load_attack_spec(cfg.attack_spec);
    if (cfg.seed) spec.seed = *cfg.seed;
    cfg.seed = spec.seed;
    auto [poisoned, report] = poison_dataset(load_dataset(cfg.dataset), spec);
    poisoned.metadata["source"] = cfg.dataset.string();
    save_dataset(poisoned, cfg.out / "poisoned.jsonl");
    auto j = envelope("poison", cfg);
    j["attack_kind"] = to_string(spec.kind);
    j["attack_spec_digest"] = spec_digest(spec);
    j.update(to_json(report));
    write_json(cfg.out / "poison_report.json", j);
    std::cout << "poisoned " << report.poisoned << "/" << report.total << " samples ("
              << to_string(spec.kind) << ", seed " << spec.seed << ")\n";
    if (!report.failures.empty()) std::cerr << "warning: " << report.failures.size() << " sample(s) left clean\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct IndexArgs {
    Common common;
    std::string corpus, embedder;
    std::size_t chunk_size = default_chunk_size, chunk_overlap = default_chunk_overlap, dimension = default_dimension;
    CLI::Option *size_opt = nullptr, *overlap_opt = nullptr, *dim_opt = nullptr;
};

int run_index(const IndexArgs& a) {
    auto cfg = a.common.resolve([&](PipelineConfig& c) {
        if (!a.corpus.empty()) c.corpus = a.corpus;
        if (!a.embedder.empty()) c.embedder.kind = a.embedder;
        if (a.size_opt->count()) c.embedder.chunk_size = a.chunk_size;
        if (a.overlap_opt->count()) c.embedder.chunk_overlap = a.chunk_overlap;
        if (a.dim_opt->count()) c.embedder.dimension = a.dimension;
    });
    require_paths({{"benign corpus", cfg.corpus}});
    const auto corpus = load_dataset(cfg.corpus);
    const auto emb = make_embedder(cfg.embedder);
    const auto index = build_index(corpus, *emb, cfg.embedder.chunk_size, cfg.embedder.chunk_overlap);
    save_index(index, cfg.out / "index.jsonl");
    auto j = envelope("index", cfg);
    j["corpus"] = cfg.corpus.string();
    j["samples"] = corpus.size();
    j["chunks"] = index.size();
    j["dimension"] = index.dimension;
    j["chunk_size"] = index.chunk_size;
    j["chunk_overlap"] = index.chunk_overlap;
    j["embedder_id"] = index.embedder_id;
    write_json(cfg.out / "index_report.json", j);
    std::cout << "indexed " << corpus.size() << " samples into " << index.size() << " chunks ("
              << index.embedder_id << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct RewriteArgs {
    Common common;
    std::string dataset, mode, index, client, endpoint, model;
    std::size_t k = default_top_k, concurrency = 1, max_new_tokens = 256;
    bool strict = false, lenient = false;
    CLI::Option *k_opt = nullptr, *conc_opt = nullptr, *tokens_opt = nullptr;
};

int run_rewrite(const RewriteArgs& a) {
    auto cfg = a.common.resolve([&](PipelineConfig& c) {
        if (!a.dataset.empty()) c.dataset = a.dataset;
        if (!a.mode.empty()) {
            auto m = parse_rewrite_mode(a.mode);
            if (!m) throw UsageError("unknown --mode \"" + a.mode + "\"");
            c.rewriter.mode = *m;
        }
        if (!a.index.empty()) c.index = a.index;
        if (a.k_opt->count()) c.rewriter.k = a.k;
        if (a.conc_opt->count()) c.rewriter.concurrency = a.concurrency;
        if (a.tokens_opt->count()) c.rewriter.max_new_tokens = a.max_new_tokens;
        if (a.strict) c.rewriter.strict = true;
        if (a.lenient) c.rewriter.strict = false;
        if (!a.client.empty()) c.rewriter_endpoint.client = a.client;
        if (!a.endpoint.empty()) c.rewriter_endpoint.endpoint = a.endpoint;
        if (!a.model.empty()) c.rewriter_endpoint.model = c.rewriter.model_name = a.model;
    });
    if (prompts::is_open_book(cfg.rewriter.mode) && cfg.index.empty())
        throw UsageError("--mode OBBR requires --index");
    require_paths({{"dataset", cfg.dataset}});

    const auto data = load_dataset(cfg.dataset);
    std::optional<BenignIndex> index;
    std::unique_ptr<Embedder> emb;
    std::optional<Retriever> retriever;
    if (prompts::is_open_book(cfg.rewriter.mode)) {
        require_paths({{"index", cfg.index}});
        index = load_index(cfg.index);
        emb = embedder_for_index(*index, cfg.embedder);
        retriever.emplace(Retriever{*index, *emb});
    }
    auto client = make_chat_client(cfg.rewriter_endpoint.client, cfg.rewriter_endpoint.endpoint,
                                   cfg.rewriter_endpoint.api_key);

    RewriteResult result;
    try {
        result = rewrite_dataset(data, cfg.rewriter, retriever, *client);
    } catch (const RewriteBatchError& e) {
        write_json(cfg.out / "failure_manifest.json", to_json(e.failures()));
        throw;
    }

    save_dataset(result.dataset, cfg.out / "rewritten.jsonl");
    std::string records;
    for (const auto& r : result.records) records += to_json(r).dump() + "\n";
    write_text_file(cfg.out / "rewrite_records.jsonl", records);

    auto j = envelope("rewrite", cfg);
    j["mode"] = to_string(cfg.rewriter.mode);
    j["prompt_version"] = prompts::version;
    j["k"] = cfg.rewriter.k;
    j["model"] = cfg.rewriter.model_name;
    j["temperature"] = cfg.rewriter.temperature;
    j["max_new_tokens"] = cfg.rewriter.max_new_tokens;
    j["input_samples"] = data.size();
    j["rewritten"] = result.records.size();
    j["failures"] = result.failures.size();
    write_json(cfg.out / "rewrite_report.json", j);

    std::cout << "rewrote " << result.records.size() << "/" << data.size() << " samples ("
              << to_string(cfg.rewriter.mode) << ")\n";
    if (!result.failures.empty()) {
        write_json(cfg.out / "failure_manifest.json", to_json(result.failures));
        std::cerr << "warning: " << result.failures.size() << " sample(s) failed; see failure_manifest.json\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct LeakageArgs {
    Common common;
    std::string dataset, attack, mode;
    std::vector<std::string> triggers;
};

int run_leakage(const LeakageArgs& a) {
    auto cfg = a.common.resolve([&](PipelineConfig& c) {
        if (!a.dataset.empty()) c.dataset = a.dataset;
        if (!a.attack.empty()) c.attack_spec = a.attack;
        if (!a.triggers.empty()) c.evaluator.triggers = a.triggers;
    });
    require_paths({{"dataset", cfg.dataset}});
    auto trig = cfg.evaluator.triggers;
    if (trig.empty() && !cfg.attack_spec.empty()) {
        require_paths({{"attack spec", cfg.attack_spec}});
        for (const auto& t : load_attack_spec(cfg.attack_spec).triggers) trig.push_back(t.text);
    }
    if (trig.empty()) trig = table4_triggers();

    const auto data = load_dataset(cfg.dataset);
    std::string mode = a.mode;
    if (mode.empty())
        if (auto it = data.metadata.find("rewrite_mode"); it != data.metadata.end()) mode = it->second;
    const auto report = trigger_leakage(data, trig, mode);
    auto j = envelope("leakage", cfg);
    j["dataset"] = cfg.dataset.string();
    j.update(to_json(report));
    write_json(cfg.out / "leakage_report.json", j);
    std::cout << render_table(report);
    return 0;
}

// ---------------------------------------------------------------------------

struct AsrArgs {
    Common common;
    std::string responses, prompts, lexicon, client, endpoint, model;
    std::size_t window = default_refusal_window, max_tokens = 256, concurrency = 1;
    bool judge = false;
    CLI::Option* window_opt = nullptr;
};

int run_asr(const AsrArgs& a) {
    auto cfg = a.common.resolve([&](PipelineConfig& c) {
        if (!a.lexicon.empty()) c.evaluator.lexicon = a.lexicon;
        if (a.window_opt->count()) c.evaluator.window = a.window;
        if (!a.endpoint.empty()) c.evaluator.victim_endpoint = a.endpoint;
        if (!a.model.empty()) c.evaluator.victim_model = a.model;
    });
    if (a.responses.empty() == a.prompts.empty()) throw UsageError("give exactly one of --responses or --prompts");

    std::vector<ResponsePair> pairs;
    if (!a.responses.empty()) {
        require_paths({{"responses", a.responses}});
        pairs = load_responses(a.responses);
    } else {
        require_paths({{"prompts", a.prompts}});
        std::vector<std::string> prompts;
        for (const auto& s : load_dataset(a.prompts).samples) prompts.push_back(s.prompt_text());
        auto client = make_chat_client(a.client.empty() ? "http" : a.client, cfg.evaluator.victim_endpoint,
                                       cfg.rewriter_endpoint.api_key);
        QueryConfig q;
        q.model_name = cfg.evaluator.victim_model;
        q.max_tokens = a.max_tokens;
        q.concurrency = a.concurrency;
        q.retry = cfg.rewriter.retry;
        pairs = query_model_batch(prompts, *client, q);
        write_text_file(cfg.out / "responses.jsonl", serialize_responses(pairs));
    }

    const auto lex = cfg.evaluator.lexicon.empty() ? default_lexicon() : load_lexicon(cfg.evaluator.lexicon);
    const auto report = compute_asr(pairs, lex, cfg.evaluator.window);
    auto j = envelope("asr", cfg);
    j.update(to_json(report));

    if (a.judge) {
        if (cfg.evaluator.judge_endpoint.empty()) throw UsageError("--judge needs a judge endpoint");
        HttpChatClient judge_http(HttpSettings{cfg.evaluator.judge_endpoint, cfg.rewriter_endpoint.api_key});
        JudgeClient judge(judge_http, cfg.evaluator.judge_model, cfg.rewriter.retry);
        double sum = 0.0;
        for (const auto& p : pairs) sum += judge.score(p);
        j["judge_model"] = cfg.evaluator.judge_model;
        j["judge_mean_score"] = pairs.empty() ? nlohmann::ordered_json(nullptr)
                                              : nlohmann::ordered_json(sum / static_cast<double>(pairs.size()));
    }
    write_json(cfg.out / "asr_report.json", j);
    std::cout << render_table(report);
    return 0;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    Common common;
    std::string model;
    std::size_t random = 0, max_vocab = 4, max_horizon = 3;
    std::string indexing = "position";
};

int run_simulate(const SimulateArgs& a) {
    auto cfg = a.common.resolve([](PipelineConfig&) {});
    if (a.model.empty() == (a.random == 0)) throw UsageError("give exactly one of --model or --random N");

    auto j = envelope("simulate", cfg);
    if (!a.model.empty()) {
        require_paths({{"model", a.model}});
        const auto m = theory::load_model(a.model);
        const auto r = theory::check_instance(m);
        j["model"] = a.model;
        j["theorem1_hypothesis"] = r.t1.hypothesis;
        j["theorem2_hypothesis"] = r.t2.hypothesis;
        j.update(theory::to_json(r));
        write_json(cfg.out / "simulate_report.json", j);
        std::cout << "posterior open-book " << r.t1.posteriors.open_book << " closed-book "
                  << r.t1.posteriors.closed_book << " (theorem 1 " << (r.t1.holds ? "holds" : "does not hold")
                  << ")\ndelta " << r.t2.delta << " (theorem 2 " << (r.t2.holds ? "holds" : "does not hold")
                  << ", factorization residual " << r.t2.factorization_residual << ")\n";
        return 0;
    }

    theory::RandomModelOptions opt;
    opt.max_vocab = a.max_vocab;
    opt.max_horizon = a.max_horizon;
    if (opt.max_vocab < opt.min_vocab || opt.max_horizon < opt.min_horizon)
        throw UsageError("--max-vocab must be >= 2 and --max-horizon >= 1");
    if (a.indexing == "prefix") opt.indexing = theory::TableIndexing::prefix;
    else if (a.indexing != "position") throw UsageError("--indexing must be position or prefix");
    const auto seed = cfg.seed.value_or(0);
    const auto summary = theory::random_sweep(a.random, seed, opt);
    j["seed"] = seed;
    j.update(theory::to_json(summary));
    write_json(cfg.out / "simulate_report.json", j);
    std::cout << "theorem 1: " << summary.theorem1_pass << "/" << summary.instances << " pass\n"
              << "theorem 2: " << summary.theorem2_pass << "/" << summary.instances << " pass\n"
              << "max factorization residual: " << summary.max_factorization_residual << "\n"
              << "ratio-1 boundary equal: " << (summary.boundary_equal ? "yes" : "no") << "\n";
    return summary.theorem1_pass == summary.instances && summary.theorem2_pass == summary.instances ? 0 : 1;
}

// ---------------------------------------------------------------------------

int run_report(const Common& common) {
    auto cfg = common.resolve([](PipelineConfig&) {});
    const char* names[] = {"poison_report.json", "pia_report.json",    "index_report.json",
                           "rewrite_report.json", "leakage_report.json", "asr_report.json",
                           "simulate_report.json"};
    nlohmann::ordered_json summary = report_envelope("summary");
    std::size_t found = 0;
    for (const char* name : names) {
        const auto path = cfg.out / name;
        if (!fs::exists(path)) continue;
        std::ifstream in(path);
        auto j = nlohmann::ordered_json::parse(in);
        j.erase("results");
        ++found;
        std::cout << "== " << name << "\n";
        for (const auto& [k, v] : j.items()) std::cout << "  " << k << ": " << v.dump() << "\n";
        summary[name] = std::move(j);
    }
    if (found == 0) throw IoError(cfg.out.string(), "no reports found");
    write_json(cfg.out / "summary.json", summary);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Backdoor poisoning, open-book rewriting and evaluation workbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(build_id()));

    PoisonArgs poison;
    auto* p = app.add_subcommand("poison", "Inject a backdoor attack into a dataset (or build a PIA mix)");
    poison.common.attach(p);
    p->add_option("--dataset", poison.dataset, "Input dataset (JSONL)");
    p->add_option("--attack", poison.attack, "Attack spec (JSON)");
    p->add_flag("--mix-pia", poison.mix_pia, "Build a trigger-less PIA mix instead");
    p->add_option("--benign", poison.benign, "PIA benign pool");
    p->add_option("--malicious", poison.malicious, "PIA malicious pool");
    p->add_option("--total", poison.total, "PIA mix size")->capture_default_str();
    p->add_option("--fraction", poison.fraction, "PIA malicious fraction")->capture_default_str();

    IndexArgs index;
    auto* ix = app.add_subcommand("index", "Build the benign retrieval index");
    index.common.attach(ix);
    ix->add_option("--corpus", index.corpus, "Benign corpus (JSONL)");
    ix->add_option("--embedder", index.embedder, "hashed or remote");
    index.size_opt = ix->add_option("--chunk-size", index.chunk_size, "Chunk size in characters");
    index.overlap_opt = ix->add_option("--chunk-overlap", index.chunk_overlap, "Chunk overlap in characters");
    index.dim_opt = ix->add_option("--dimension", index.dimension, "Embedding dimension");

    RewriteArgs rewrite;
    auto* rw = app.add_subcommand("rewrite", "Rewrite every prompt of a dataset");
    rewrite.common.attach(rw);
    rw->add_option("--dataset", rewrite.dataset, "Input dataset (JSONL)");
    rw->add_option("--mode", rewrite.mode, "OBBR, CBBR, DPR or Paraphrase");
    rw->add_option("--index", rewrite.index, "Benign index (required for OBBR)");
    rewrite.k_opt = rw->add_option("--k", rewrite.k, "Exemplars per prompt");
    rewrite.conc_opt = rw->add_option("--concurrency", rewrite.concurrency, "Requests in flight");
    rewrite.tokens_opt = rw->add_option("--max-new-tokens", rewrite.max_new_tokens, "Generation limit");
    auto* strict = rw->add_flag("--strict", rewrite.strict, "Fail the run if any sample fails");
    rw->add_flag("--lenient", rewrite.lenient, "Emit a failure manifest instead of failing")->excludes(strict);
    rw->add_option("--client", rewrite.client, "http or echo");
    rw->add_option("--endpoint", rewrite.endpoint, "Chat completions URL");
    rw->add_option("--model", rewrite.model, "Rewriter model name");

    LeakageArgs leakage;
    auto* lk = app.add_subcommand("leakage", "Count trigger occurrences in a dataset");
    leakage.common.attach(lk);
    lk->add_option("--dataset", leakage.dataset, "Dataset to scan (JSONL)");
    lk->add_option("--trigger", leakage.triggers, "Trigger string (repeatable)");
    lk->add_option("--attack", leakage.attack, "Take triggers from this attack spec");
    lk->add_option("--mode", leakage.mode, "Rewriter mode label for the report");

    AsrArgs asr;
    auto* as = app.add_subcommand("asr", "Refusal-based attack success rate");
    asr.common.attach(as);
    as->add_option("--responses", asr.responses, "JSONL of {prompt, response}");
    as->add_option("--prompts", asr.prompts, "Dataset whose prompts are sent to the model");
    as->add_option("--client", asr.client, "http or echo (with --prompts)");
    as->add_option("--endpoint", asr.endpoint, "Model chat completions URL");
    as->add_option("--model", asr.model, "Model name");
    as->add_option("--max-tokens", asr.max_tokens, "Generation limit")->capture_default_str();
    as->add_option("--concurrency", asr.concurrency, "Requests in flight")->capture_default_str();
    as->add_option("--lexicon", asr.lexicon, "Refusal lexicon file");
    asr.window_opt = as->add_option("--window", asr.window, "Refusal search window in characters");
    as->add_flag("--judge", asr.judge, "Also score with the configured judge endpoint");

    SimulateArgs sim;
    auto* sm = app.add_subcommand("simulate", "Check the mixture-model guarantees numerically");
    sim.common.attach(sm);
    sm->add_option("--model", sim.model, "Mixture model file (JSON)");
    sm->add_option("--random", sim.random, "Number of random models to sweep");
    sm->add_option("--max-vocab", sim.max_vocab, "Largest vocabulary in the sweep")->capture_default_str();
    sm->add_option("--max-horizon", sim.max_horizon, "Longest horizon in the sweep")->capture_default_str();
    sm->add_option("--indexing", sim.indexing, "position or prefix token tables")->capture_default_str();

    Common report;
    auto* rp = app.add_subcommand("report", "Summarize the reports in --out");
    report.attach(rp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (*p) return run_poison(poison);
        if (*ix) return run_index(index);
        if (*rw) return run_rewrite(rewrite);
        if (*lk) return run_leakage(leakage);
        if (*as) return run_asr(asr);
        if (*sm) return run_simulate(sim);
        if (*rp) return run_report(report);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_usage;
}
