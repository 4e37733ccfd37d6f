#include "lexirag/arabic_text.hpp"
#include "lexirag/datagen.hpp"
#include "lexirag/error.hpp"
#include "lexirag/qa.hpp"

#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace lexirag::datagen {
namespace {

Corpus fixture_corpus() {
    return ingest_files(testing::fixtures_dir() / "entries.jsonl", testing::fixtures_dir() / "roots.jsonl").corpus;
}

const QAItem* find_item(const std::vector<QAItem>& items, const std::string& id) {
    for (const auto& it : items) {
        if (it.id == id) return &it;
    }
    return nullptr;
}

LexicalEntry plain_entry(const std::string& id, const std::string& word, const std::string& meaning,
                         const std::string& date) {
    LexicalEntry e;
    e.entry_id = id;
    e.root_id = "R1";
    e.root = "قلب";
    e.lemma_id = "L" + id;
    e.word = word;
    e.morphology = "اسم";
    e.citation = "شاهد " + id;
    e.meaning = meaning;
    e.date_label = date;
    return e;
}

TEST(Fill, SubstitutesAndRejectsMissing) {
    EXPECT_EQ(fill("ما معنى كلمة {word}؟", {{"word", "قلب"}}), "ما معنى كلمة قلب؟");
    EXPECT_FALSE(fill("{word} {meaning}", {{"word", "قلب"}}));
    EXPECT_FALSE(fill("{word}", {{"word", ""}}));
    EXPECT_EQ(fill("بلا خانات", {}), "بلا خانات");
}

TEST(ParseTemplates, VariantsAndErrors) {
    std::istringstream in("ما معنى {word}؟\n---\nاشرح {compound}\n");
    const auto t = parse_templates(FineIntent::basic_meaning, in);
    ASSERT_EQ(t.size(), 2U);
    EXPECT_EQ(t[1].variant_id, 1);
    EXPECT_EQ(t[1].slots(), (std::vector<std::string>{"compound"}));
    std::istringstream unknown("ما {nope}؟\n");
    EXPECT_THROW(parse_templates(FineIntent::other, unknown), Error);
    std::istringstream open("ما {word؟\n");
    EXPECT_THROW(parse_templates(FineIntent::other, open), Error);
}

TEST(ParseTemplates, KeepsDiacritics) {
    std::istringstream in("مَا مَعْنَى {word}؟\n");
    EXPECT_EQ(parse_templates(FineIntent::basic_meaning, in)[0].pattern, "مَا مَعْنَى {word}؟");
}

TEST(TemplateSet, BuiltinInventory) {
    const auto& set = TemplateSet::builtin();
    EXPECT_NO_THROW(set.validate());
    const std::set<std::string> known(known_slots().begin(), known_slots().end());
    for (auto fine : kFineIntents) {
        ASSERT_TRUE(set.questions.contains(fine));
        EXPECT_GE(set.questions.at(fine).size(), 2U) << to_string(fine);
        EXPECT_GE(set.answers.at(fine).size(), 1U);
        for (const auto& t : set.questions.at(fine)) {
            for (const auto& s : t.slots()) EXPECT_TRUE(known.contains(s));
        }
    }
}

TEST(TemplateSet, LoadFromDirectory) {
    testing::TempDir dir;
    for (auto fine : kFineIntents) {
        const std::string name = std::string(to_string(fine)) + ".txt";
        testing::write_file(dir / ("questions/" + name), "سؤال {word}؟\n---\nسؤال آخر {word}\n");
        testing::write_file(dir / ("answers/" + name), "جواب {meaning}\n");
    }
    const auto set = TemplateSet::load(dir.path());
    EXPECT_EQ(set.questions.at(FineIntent::date).size(), 2U);
    std::filesystem::remove(dir / "answers/date.txt");
    EXPECT_THROW(TemplateSet::load(dir.path()), Error);
}

TEST(GregorianYear, Labels) {
    EXPECT_EQ(gregorian_year("11هـ=632م"), 632);
    EXPECT_EQ(gregorian_year("150ق.هـ=474م"), 474);
    EXPECT_EQ(gregorian_year("1000ق.هـ=300ق.م"), -300);
    EXPECT_FALSE(gregorian_year(""));
    EXPECT_FALSE(gregorian_year("غير مؤرخ"));
}

TEST(GenerateQa, MeaningAndContextualFromFixture) {
    const auto c = fixture_corpus();
    const auto gen = generate_qa(c, TemplateSet::builtin(), 1);
    const auto* basic = find_item(gen.items, "e001:basic_meaning");
    ASSERT_NE(basic, nullptr);
    EXPECT_NE(basic->question.find("قَلْب"), std::string::npos);
    EXPECT_NE(basic->gold_answer.find(c.entry("e001").meaning), std::string::npos);
    const auto* ctx = find_item(gen.items, "e001:contextual_meaning");
    ASSERT_NE(ctx, nullptr);
    EXPECT_NE(ctx->question.find("قَلْب"), std::string::npos);
    EXPECT_NE(ctx->question.find(c.entry("e001").citation), std::string::npos);
    EXPECT_NE(ctx->gold_answer.find(c.entry("e001").meaning), std::string::npos);
    EXPECT_NE(std::find(ctx->key_values.begin(), ctx->key_values.end(), c.entry("e001").meaning), ctx->key_values.end());
}

TEST(GenerateQa, InvariantsOnSyntheticCorpus) {
    const auto c = testing::make_synthetic_corpus({.roots = 40, .entries_per_root = 3, .seed = 8});
    const auto gen = generate_qa(c, TemplateSet::builtin(), 3);
    std::set<std::string> ids;
    for (const auto& item : gen.items) {
        EXPECT_TRUE(ids.insert(item.id).second);
        ASSERT_FALSE(item.gold_doc_ids.empty());
        for (const auto& d : item.gold_doc_ids) EXPECT_NE(c.find_entry(d), nullptr);
        EXPECT_EQ(item.question.find('{'), std::string::npos);
        EXPECT_EQ(item.gold_answer.find('{'), std::string::npos);
        EXPECT_EQ(item.gold_answer.find('}'), std::string::npos);
    }
    for (auto fine : kFineIntents) EXPECT_GT(gen.stats.generated.at(fine), 0U) << to_string(fine);
}

TEST(GenerateQa, AnswerRestatesQuestionSubject) {
    const auto c = testing::make_synthetic_corpus({.roots = 40, .entries_per_root = 3, .seed = 9});
    std::size_t checked = 0;
    for (const auto& item : datagen::generate_qa(c, datagen::TemplateSet::builtin(), 4).items) {
        if (item.fine_intent != FineIntent::basic_meaning && item.fine_intent != FineIntent::contextual_meaning) continue;
        const auto* e = c.find_entry(item.gold_doc_ids.front());
        ASSERT_NE(e, nullptr);
        EXPECT_EQ(item.key_values, std::vector<std::string>{e->meaning}) << item.question;
        ++checked;
    }
    EXPECT_GT(checked, 100U);
}

TEST(GenerateQa, EmptyDateSkipsDateQuestion) {
    const Corpus c({plain_entry("a", "قلب", "العضو", ""), plain_entry("b", "نهر", "مجرى", "11هـ=632م")},
                   {RootRecord{"R1", "قلب", std::nullopt, std::nullopt}});
    const auto gen = generate_qa(c, TemplateSet::builtin(), 1);
    EXPECT_EQ(find_item(gen.items, "a:date"), nullptr);
    EXPECT_NE(find_item(gen.items, "b:date"), nullptr);
    EXPECT_GE(gen.stats.skipped.at(FineIntent::date), 1U);
}

TEST(GenerateQa, SharedKeyGivesMultipleGoldDocs) {
    const Corpus c({plain_entry("a", "قَلْب", "العضو", ""), plain_entry("b", "قلب", "العُضْو", ""),
                    plain_entry("c", "قلب", "الفؤاد", "")},
                   {RootRecord{"R1", "قلب", std::nullopt, std::nullopt}});
    const auto gen = generate_qa(c, TemplateSet::builtin(), 1);
    const auto* a = find_item(gen.items, "a:basic_meaning");
    ASSERT_NE(a, nullptr);
    EXPECT_EQ(a->gold_doc_ids, (std::vector<std::string>{"a", "b"}));
}

TEST(GenerateQa, FirstUsageIsEarliestDated) {
    const Corpus c({plain_entry("a", "قلب", "العضو", "200هـ=815م"), plain_entry("b", "قلب", "الفؤاد", "150ق.هـ=474م"),
                    plain_entry("c", "قلب", "اللب", "")},
                   {RootRecord{"R1", "قلب", std::nullopt, std::nullopt}});
    const auto gen = generate_qa(c, TemplateSet::builtin(), 1);
    const auto* f = find_item(gen.items, "R1:first_usage");
    ASSERT_NE(f, nullptr);
    EXPECT_EQ(f->gold_doc_ids, (std::vector<std::string>{"b"}));
    const auto* d = find_item(gen.items, "R1:derivations_list");
    ASSERT_NE(d, nullptr);
    EXPECT_EQ(d->gold_doc_ids.size(), 3U);
}

TEST(GenerateQa, SeedDeterminism) {
    const auto c = testing::make_synthetic_corpus({.roots = 20, .entries_per_root = 2, .seed = 1});
    const auto a = generate_qa(c, TemplateSet::builtin(), 5);
    const auto b = generate_qa(c, TemplateSet::builtin(), 5);
    EXPECT_EQ(a.items, b.items);
    const auto other = generate_qa(c, TemplateSet::builtin(), 6);
    EXPECT_NE(a.items, other.items);
}

TEST(IntentDataset, BalancedAndDisjoint) {
    const auto c = testing::make_synthetic_corpus({.roots = 30, .entries_per_root = 2, .seed = 2});
    const auto qa = generate_qa(c, TemplateSet::builtin(), 1).items;
    const auto ds = generate_intent_dataset(qa, 10, 0.2, 4);
    EXPECT_EQ(ds.train.size() + ds.test.size(), 130U);
    std::map<FineIntent, int> train_counts, test_counts;
    for (const auto& r : ds.train) ++train_counts[r.label];
    for (const auto& r : ds.test) ++test_counts[r.label];
    for (auto fine : kFineIntents) {
        EXPECT_EQ(train_counts[fine], 8);
        EXPECT_EQ(test_counts[fine], 2);
    }
    std::set<std::string> texts;
    for (const auto& r : ds.train) texts.insert(r.query);
    for (const auto& r : ds.test) texts.insert(r.query);
    EXPECT_EQ(texts.size(), 130U);
    const auto again = generate_intent_dataset(qa, 10, 0.2, 4);
    ASSERT_EQ(again.train.size(), ds.train.size());
    for (std::size_t i = 0; i < ds.train.size(); ++i) EXPECT_EQ(again.train[i].query, ds.train[i].query);
}

TEST(IntentDataset, RepeatedTextDrawnOnce) {
    std::vector<QAItem> qa;
    for (auto fine : kFineIntents) {
        for (int i = 0; i < 3; ++i) {
            QAItem item;
            item.id = std::string(to_string(fine)) + std::to_string(i);
            item.question = i < 2 ? std::string(to_string(fine)) : std::string(to_string(fine)) + " 2";
            item.fine_intent = fine;
            qa.push_back(item);
        }
    }
    const auto ds = generate_intent_dataset(qa, 2, 0.5, 1);
    EXPECT_EQ(ds.train.size(), 13U);
    for (const auto& t : ds.train) {
        for (const auto& r : ds.test) EXPECT_NE(t.query, r.query);
    }
    EXPECT_THROW(generate_intent_dataset(qa, 3, 0.5, 1), Error);
}

TEST(IntentDataset, ShortClassIsInsufficientData) {
    const auto qa = generate_qa(fixture_corpus(), TemplateSet::builtin(), 1).items;
    try {
        generate_intent_dataset(qa, 5, 0.2, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::insufficient_data);
    }
}

TEST(EvalSet, Filters) {
    const auto fixture = fixture_corpus();
    const auto qa = generate_qa(fixture, TemplateSet::builtin(), 1).items;
    const auto religious = build_eval_set(qa, fixture, {.filter = EvalFilter::quran_hadith});
    EXPECT_FALSE(religious.items.empty());
    for (const auto& item : religious.items) {
        for (const auto& d : item.gold_doc_ids) {
            const auto& e = fixture.entry(d);
            EXPECT_TRUE(e.is_quranic() || e.is_hadith()) << item.id;
        }
    }
    const auto six = build_eval_set(qa, fixture, {.answer_types_only = true});
    for (const auto& item : six.items) EXPECT_TRUE(is_answer_eval_type(item.fine_intent));
    EXPECT_EQ(six.distribution.size(), 6U);

    // Poetry only: no Quranic or hadith entries.
    const Corpus poetry({plain_entry("a", "قلب", "العضو", "11هـ=632م"), plain_entry("b", "نهر", "مجرى", "")},
                        {RootRecord{"R1", "قلب", std::nullopt, std::nullopt}});
    const auto pqa = generate_qa(poetry, TemplateSet::builtin(), 1).items;
    EXPECT_FALSE(build_eval_set(pqa, poetry, {.filter = EvalFilter::all}).items.empty());
    EXPECT_TRUE(build_eval_set(pqa, poetry, {.filter = EvalFilter::quran_hadith}).items.empty());
}

TEST(EvalSet, SeededLimit) {
    const auto c = testing::make_synthetic_corpus({.roots = 20, .entries_per_root = 2, .seed = 3});
    const auto qa = generate_qa(c, TemplateSet::builtin(), 1).items;
    const auto a = build_eval_set(qa, c, {.seed = 11, .limit = 50});
    const auto b = build_eval_set(qa, c, {.seed = 11, .limit = 50});
    ASSERT_EQ(a.items.size(), 50U);
    EXPECT_EQ(a.items, b.items);
    EXPECT_FALSE(a.truncated_request);
    std::size_t total = 0;
    for (const auto& [f, n] : a.distribution) total += n;
    EXPECT_EQ(total, 50U);
    const auto big = build_eval_set(qa, c, {.seed = 11, .limit = 100000});
    EXPECT_TRUE(big.truncated_request);
    EXPECT_EQ(big.items.size(), qa.size());
}

TEST(Qrels, OneLinePerGoldDoc) {
    QAItem item;
    item.id = "q1";
    item.gold_doc_ids = {"a", "b"};
    std::ostringstream out;
    write_qrels(out, std::vector<QAItem>{item});
    EXPECT_EQ(out.str(), "q1\ta\nq1\tb\n");
}

TEST(QaJson, RoundTripAndErrors) {
    QAItem item;
    item.id = "e1:date";
    item.question = "متى؟";
    item.gold_answer = "عام 632";
    item.fine_intent = FineIntent::date;
    item.gold_doc_ids = {"e1"};
    item.key_values = {"632"};
    std::stringstream ss;
    write_qa_jsonl(ss, {item, item});
    const auto back = read_qa_jsonl(ss);
    ASSERT_EQ(back.size(), 2U);
    EXPECT_EQ(back[0], item);
    EXPECT_THROW(qa_from_json(R"({"id":"x","question":"q","gold_answer":"a","fine_intent":"date","gold_doc_ids":[]})"),
                 Error);
    EXPECT_THROW(qa_from_json("nope"), Error);
}

} // namespace
} // namespace lexirag::datagen
