#include "cli.hpp"

#include "lexirag/corpus.hpp"
#include "lexirag/pipeline.hpp"

#include "synthetic.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace lexirag {
namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run(const std::vector<std::string>& args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    const int code = cli::run_cli(args, in, out, err);
    return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return (testing::fixtures_dir() / name).string(); }

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"eval", "retrieval", "--run", fixture("run.tsv")}).code, 2);
    EXPECT_EQ(run({"eval", "retrieval", "--run", fixture("run.tsv"), "--qrels", fixture("qrels.tsv"), "--nope"}).code,
              2);
    EXPECT_EQ(run({"ingest", "--entries", "/does/not/exist", "--roots", fixture("roots.jsonl"), "--out", "x"}).code, 2);
}

TEST(Cli, EvalRetrievalGolden) {
    const auto r = run({"eval", "retrieval", "--run", fixture("run.tsv"), "--qrels", fixture("qrels.tsv"), "--k", "3"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, testing::read_file(testing::golden_dir() / "eval_retrieval.txt"));
}

TEST(Cli, EvalAgreementGolden) {
    const auto r = run({"eval", "agreement", "--pairs", fixture("score_pairs.tsv")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, testing::read_file(testing::golden_dir() / "eval_agreement.txt"));
}

TEST(Cli, RuntimeErrorFormat) {
    testing::TempDir dir;
    testing::write_file(dir / "bad.tsv", "q1\td1\n");
    const auto r = run({"eval", "retrieval", "--run", (dir / "bad.tsv").string(), "--qrels", fixture("qrels.tsv")});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error\tformat\t", 0), 0U) << r.err;
}

TEST(Cli, IngestFixtures) {
    testing::TempDir dir;
    const auto r = run({"ingest", "--entries", fixture("entries_mixed_quality.jsonl"), "--roots", fixture("roots.jsonl"),
                        "--out", (dir / "c").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("entries\t2\tdropped\t5\t", 0), 0U) << r.out;
    EXPECT_EQ(load_corpus(dir / "c").size(), 2U);
}

class CliFlow : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new testing::TempDir();
        const auto corpus = testing::make_synthetic_corpus({.roots = 30, .entries_per_root = 2, .seed = 4});
        IngestStats stats;
        save_corpus(corpus, stats, corpus_dir());
    }
    static void TearDownTestSuite() { delete dir_; }
    static std::string corpus_dir() { return (*dir_ / "corpus").string(); }
    static std::string path(const std::string& name) { return (*dir_ / name).string(); }
    static testing::TempDir* dir_;
};

testing::TempDir* CliFlow::dir_ = nullptr;

TEST_F(CliFlow, BuildAndQuery) {
    auto r = run({"index", "build", "--corpus", corpus_dir()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("documents\t60\tterms\t", 0), 0U) << r.out;

    r = run({"datagen", "qa", "--corpus", corpus_dir(), "--seed", "3", "--out", path("qa.jsonl"), "--qrels",
             path("qrels.tsv")});
    ASSERT_EQ(r.code, 0) << r.err;
    r = run({"datagen", "intent", "--qa", path("qa.jsonl"), "--per-class", "10", "--test-fraction", "0.2", "--seed", "1",
             "--out", path("train.tsv"), "--test-out", path("test.tsv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "train\t104\ttest\t26\n");

    r = run({"intent", "train", "--data", path("train.tsv"), "--out", corpus_dir() + "/intent.model", "--trees", "20"});
    ASSERT_EQ(r.code, 0) << r.err;
    r = run({"intent", "predict", "--model", corpus_dir() + "/intent.model", "--text", "ما معنى كلمة قلب؟"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\t'), 2) << r.out;

    const auto first = testing::make_synthetic_corpus({.roots = 30, .entries_per_root = 2, .seed = 4}).entries()[0];
    const std::string question = "ما معنى كلمة " + first.word + "؟";
    r = run({"query", "--corpus", corpus_dir(), "--text", question, "--k", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("doc\t" + first.entry_id + "\t"), std::string::npos) << r.out;

    {
        std::ofstream sw(path("stopwords.txt"));
        sw << "ما\nمعنى\nكلمة\n" << first.word << '\n';
    }
    r = run({"query", "--corpus", corpus_dir(), "--text", question, "--stopwords", path("stopwords.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find(std::string(kNotFoundSentinel)), std::string::npos) << r.out;
    EXPECT_EQ(r.out.find("doc\t"), std::string::npos) << r.out;

    r = run({"query", "--corpus", corpus_dir(), "--text", question, "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j.contains("answer"));
    EXPECT_TRUE(j.contains("documents"));

    r = run({"query", "--corpus", corpus_dir(), "--text", question, "--mode", "fusion"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error\tmissing_artifact\t", 0), 0U) << r.err;
    EXPECT_NE(r.err.find("vectors.bin"), std::string::npos) << r.err;

    r = run({"eval", "run", "--corpus", corpus_dir(), "--set", path("qa.jsonl"), "--out", path("run.tsv")});
    ASSERT_EQ(r.code, 0) << r.err;
    r = run({"eval", "retrieval", "--run", path("run.tsv"), "--qrels", path("qrels.tsv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\t'), 2);

    r = run({"repl", "--corpus", corpus_dir()}, question + "\n\n");
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("answer\t"), std::string::npos);
}

TEST_F(CliFlow, DatagenIsByteIdenticalPerSeed) {
    for (const char* name : {"a", "b"}) {
        const auto r = run({"datagen", "qa", "--corpus", corpus_dir(), "--seed", "9", "--out",
                            path(std::string("qa_") + name + ".jsonl")});
        ASSERT_EQ(r.code, 0) << r.err;
        const auto e = run({"datagen", "eval", "--qa", path(std::string("qa_") + name + ".jsonl"), "--corpus", corpus_dir(),
                            "--filter", "quran_hadith", "--limit", "20", "--seed", "2", "--out",
                            path(std::string("eval_") + name + ".jsonl")});
        ASSERT_EQ(e.code, 0) << e.err;
        EXPECT_NE(e.out.find("total\t20\n"), std::string::npos) << e.out;
    }
    EXPECT_EQ(testing::read_file(path("qa_a.jsonl")), testing::read_file(path("qa_b.jsonl")));
    EXPECT_EQ(testing::read_file(path("eval_a.jsonl")), testing::read_file(path("eval_b.jsonl")));
}

TEST_F(CliFlow, RerankPairsFiles) {
    auto r = run({"datagen", "qa", "--corpus", corpus_dir(), "--seed", "3", "--out", path("qa_pairs.jsonl")});
    ASSERT_EQ(r.code, 0) << r.err;
    r = run({"rerank", "pairs", "--qa", path("qa_pairs.jsonl"), "--corpus", corpus_dir(), "--n-pos", "50", "--n-neg", "50",
             "--seed", "1", "--out-dir", path("pairs")});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"train.tsv", "validation.tsv", "test.tsv"}) {
        EXPECT_TRUE(std::filesystem::exists(*dir_ / "pairs" / f)) << f;
    }
}

} // namespace
} // namespace lexirag
