#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace obbr;

namespace {

std::vector<std::size_t> ordinals(const std::vector<RetrievalHit>& hits) {
    std::vector<std::size_t> out;
    for (const auto& h : hits) out.push_back(h.ordinal);
    return out;
}

Dataset corpus_of(const std::vector<std::string>& texts) {
    Dataset d;
    for (std::size_t i = 0; i < texts.size(); ++i)
        d.samples.push_back({ordinal_id(i), texts[i], std::nullopt, "r", Label::clean, std::nullopt, std::nullopt});
    return d;
}

} // namespace

TEST(ChunkText, ExactSizeIsOneChunk) {
    const std::string t(256, 'x');
    auto chunks = chunk_text(t, 256, 10);
    ASSERT_EQ(chunks.size(), 1u);
    EXPECT_EQ(chunks[0], t);
}

TEST(ChunkText, StrideCoversTail) {
    std::string t;
    for (int i = 0; i < 300; ++i) t += static_cast<char>('a' + i % 26);
    auto chunks = chunk_text(t, 256, 10);
    ASSERT_EQ(chunks.size(), 2u);
    EXPECT_EQ(chunks[0], t.substr(0, 256));
    EXPECT_EQ(chunks[1], t.substr(246, 54));
}

TEST(ChunkText, EmptyAndInvalid) {
    EXPECT_TRUE(chunk_text("", 256, 10).empty());
    EXPECT_THROW(chunk_text("abc", 10, 10), ConfigError);
    EXPECT_THROW(chunk_text("abc", 5, 9), ConfigError);
}

TEST(ChunkText, CountsCodePoints) {
    std::string t;
    for (int i = 0; i < 12; ++i) t += "é";
    auto chunks = chunk_text(t, 5, 1);
    ASSERT_EQ(chunks.size(), 3u);
    EXPECT_EQ(text::code_point_count(chunks[0]), 5u);
    EXPECT_EQ(text::code_point_count(chunks[1]), 5u);
    EXPECT_EQ(text::code_point_count(chunks[2]), 4u);
}

TEST(ChunkText, ArithmeticOracle) {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = rng.below(700);
        const std::size_t size = 2 + rng.below(300);
        const std::size_t overlap = rng.below(size);
        std::string t(n, 'q');
        for (auto& c : t) c = static_cast<char>('a' + rng.below(26));
        auto chunks = chunk_text(t, size, overlap);
        const std::size_t stride = size - overlap;
        std::size_t expected = 0;
        if (n > 0) expected = n <= size ? 1 : 1 + (n - size + stride - 1) / stride;
        ASSERT_EQ(chunks.size(), expected) << n << " " << size << " " << overlap;
        for (std::size_t i = 0; i < chunks.size(); ++i)
            EXPECT_EQ(chunks[i], t.substr(i * stride, std::min(size, n - i * stride)));
    }
}

TEST(HashedEmbedder, DeterministicAndNormalized) {
    HashedEmbedder e;
    auto a = e.embed("Write a poem about rain");
    EXPECT_EQ(a, e.embed("Write a poem about rain"));
    EXPECT_EQ(a.dimension(), 384u);
    EXPECT_NEAR(a.norm(), 1.0, 1e-12);
    EXPECT_EQ(a, e.embed("write, A POEM about rain!"));
    EXPECT_EQ(e.embed("").norm(), 0.0);
    EXPECT_NE(HashedEmbedder(16).id(), e.id());
}

TEST(Cosine, ZeroNormIsZero) {
    EmbeddingVector z(std::vector<double>(4, 0.0));
    EmbeddingVector v({1.0, 0.0, 0.0, 0.0});
    EXPECT_EQ(cosine(z, v), 0.0);
    EXPECT_EQ(cosine(v, z), 0.0);
    EXPECT_THROW(EmbeddingVector({1.0, std::nan("")}), ValidationError);
}

TEST(BuildIndex, OneShortPrompt) {
    HashedEmbedder e;
    auto idx = build_index(corpus_of({"hello world"}), e);
    ASSERT_EQ(idx.size(), 1u);
    EXPECT_EQ(idx.chunks[0].vector, e.embed("hello world"));
    EXPECT_EQ(idx.chunks[0].source_id, "000000");
    EXPECT_EQ(idx.embedder_id, e.id());
}

TEST(BuildIndex, EmptyCorpus) {
    HashedEmbedder e;
    try {
        build_index(Dataset{}, e);
        FAIL();
    } catch (const ValidationError& err) {
        EXPECT_NE(std::string(err.what()).find("empty benign corpus"), std::string::npos);
    }
}

TEST(BuildIndex, PoisonedSampleRejected) {
    HashedEmbedder e;
    auto d = corpus_of({"a", "b"});
    d.samples[1].label = Label::poisoned;
    d.samples[1].attack_tag = AttackKind::BadNets;
    EXPECT_THROW(build_index(d, e), ValidationError);
}

TEST(BuildIndex, ShortPromptsOneChunkEach) {
    HashedEmbedder e;
    auto d = fixtures::make_dataset(40, 2);
    EXPECT_EQ(build_index(d, e).size(), 40u);
}

TEST(BuildIndex, LongPromptsAreChunked) {
    HashedEmbedder e;
    auto d = corpus_of({std::string(300, 'a'), "short"});
    auto idx = build_index(d, e);
    ASSERT_EQ(idx.size(), 3u);
    EXPECT_EQ(idx.chunks[0].source_id, "000000");
    EXPECT_EQ(idx.chunks[1].source_id, "000000");
    EXPECT_EQ(idx.chunks[2].source_id, "000001");
}

TEST(Retrieve, SelfQueryRanksFirst) {
    HashedEmbedder e;
    auto d = fixtures::make_dataset(30, 4, 3, 10);
    auto idx = build_index(d, e);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        auto hits = retrieve_hits(idx.chunks[i].text, idx, 3, e);
        ASSERT_FALSE(hits.empty());
        EXPECT_NEAR(hits[0].similarity, 1.0, 1e-9);
        EXPECT_EQ(idx.chunks[hits[0].ordinal].text, idx.chunks[i].text);
    }
}

TEST(Retrieve, KLargerThanIndex) {
    HashedEmbedder e;
    auto idx = build_index(corpus_of({"one thing", "another thing"}), e);
    EXPECT_EQ(retrieve_k("thing", idx, 3, e).size(), 2u);
}

TEST(Retrieve, MatchesFullScanOracle) {
    HashedEmbedder e(64);
    SplitMix64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        auto d = fixtures::make_dataset(50, rng(), 1, 6);
        auto idx = build_index(d, e);
        const auto q = fixtures::random_instruction(rng, 1, 6);
        for (std::size_t k : {1u, 3u, 7u})
            EXPECT_EQ(ordinals(retrieve_hits(q, idx, k, e)), fixtures::oracle_top_k(e.embed(q), idx, k)) << q;
    }
}

TEST(Retrieve, TiesBreakByInsertionOrder) {
    HashedEmbedder e;
    auto idx = build_index(corpus_of({"zebra", "apple pie", "apple pie", "apple pie"}), e);
    auto hits = retrieve_hits("apple pie", idx, 2, e);
    EXPECT_EQ(ordinals(hits), (std::vector<std::size_t>{1, 2}));
}

TEST(Retrieve, ScaleInvariance) {
    BenignIndex idx;
    idx.dimension = 3;
    idx.embedder_id = "manual";
    idx.chunks.push_back({"a", "0", EmbeddingVector({1.0, 0.0, 0.0})});
    idx.chunks.push_back({"b", "1", EmbeddingVector({0.6, 0.8, 0.0})});
    idx.chunks.push_back({"c", "2", EmbeddingVector({0.0, 0.0, 2.0})});
    auto a = top_k(EmbeddingVector({0.5, 0.5, 0.1}), idx, 3);
    auto b = top_k(EmbeddingVector({50.0, 50.0, 10.0}), idx, 3);
    EXPECT_EQ(ordinals(a), ordinals(b));
    EXPECT_EQ(ordinals(a), (std::vector<std::size_t>{1, 0, 2}));
}

TEST(Retrieve, PrefixContainment) {
    HashedEmbedder e;
    SplitMix64 rng(23);
    auto idx = build_index(fixtures::make_dataset(80, 5, 1, 8), e);
    for (int trial = 0; trial < 30; ++trial) {
        const auto q = fixtures::random_instruction(rng, 1, 8);
        auto k3 = retrieve_k(q, idx, 3, e);
        for (std::size_t k : {1u, 2u}) {
            auto kk = retrieve_k(q, idx, k, e);
            EXPECT_TRUE(std::equal(kk.begin(), kk.end(), k3.begin()));
        }
    }
}

TEST(Retrieve, EmbedderMismatchRejected) {
    HashedEmbedder e;
    auto idx = build_index(corpus_of({"x"}), e);
    EXPECT_THROW(retrieve_k("x", idx, 1, HashedEmbedder(32)), ValidationError);
    EXPECT_THROW(retrieve_k("x", idx, 0, e), ValidationError);
}

TEST(IndexFile, RoundTripPreservesRanking) {
    fixtures::TempDir dir;
    HashedEmbedder e;
    auto idx = build_index(fixtures::make_dataset(25, 6), e);
    save_index(idx, dir / "index.jsonl");
    auto back = load_index(dir / "index.jsonl");
    ASSERT_EQ(back.size(), idx.size());
    EXPECT_EQ(back.embedder_id, idx.embedder_id);
    for (std::size_t i = 0; i < idx.size(); ++i) EXPECT_EQ(back.chunks[i].vector, idx.chunks[i].vector);
    EXPECT_EQ(retrieve_k("poem about rain", back, 3, e), retrieve_k("poem about rain", idx, 3, e));
}

TEST(IndexFile, TruncatedFileRejected) {
    fixtures::TempDir dir;
    HashedEmbedder e;
    save_index(build_index(fixtures::make_dataset(5, 6), e), dir / "index.jsonl");
    auto body = fixtures::read_file(dir / "index.jsonl");
    body.resize(body.rfind('\n', body.size() - 2) + 1);
    write_text_file(dir / "cut.jsonl", body);
    EXPECT_THROW(load_index(dir / "cut.jsonl"), IoError);
}
