#include "cli.hpp"

#include "lexirag/bm25.hpp"
#include "lexirag/corpus.hpp"
#include "lexirag/datagen.hpp"
#include "lexirag/engine.hpp"
#include "lexirag/error.hpp"
#include "lexirag/evalkit.hpp"
#include "lexirag/fusion.hpp"
#include "lexirag/intent.hpp"
#include "lexirag/service.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace lexirag::cli {

namespace {

namespace fs = std::filesystem;

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    return in;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    return out;
}

void check_written(std::ostream& out, const fs::path& path) {
    out.flush();
    if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(digits) << v;
    return ss.str();
}

struct Providers {
    std::string embed_endpoint, embed_model, rerank_endpoint, rerank_model, llm_endpoint, llm_model;
    std::string embeddings_file;

    void add_to(CLI::App* app) {
        app->add_option("--embed-endpoint", embed_endpoint, "Embedding API URL");
        app->add_option("--embed-model", embed_model, "Embedding model name");
        app->add_option("--embeddings-file", embeddings_file, "JSON Lines text/embedding table");
        app->add_option("--rerank-endpoint", rerank_endpoint, "Reranker API URL (overlap scorer when unset)");
        app->add_option("--rerank-model", rerank_model, "Reranker model name");
        app->add_option("--llm-endpoint", llm_endpoint, "Chat completions URL (extractive stub when unset)");
        app->add_option("--llm-model", llm_model, "Generation model name");
    }

    ProviderConfig config() const {
        ProviderConfig c;
        c.embed.url = embed_endpoint;
        c.embed.model = embed_model;
        c.rerank.url = rerank_endpoint;
        c.rerank.model = rerank_model;
        c.llm.url = llm_endpoint;
        c.llm.model = llm_model;
        c.embeddings_file = embeddings_file;
        return c;
    }
};

struct QueryOptions {
    std::string mode = "bm25";
    std::size_t k = 10;
    std::string stopwords;

    void add_to(CLI::App* app) {
        app->add_option("--mode", mode, "Retrieval mode")->check(CLI::IsMember({"bm25", "fusion"}));
        app->add_option("--k", k, "Documents retrieved and rendered into context")->check(CLI::PositiveNumber);
        app->add_option("--stopwords", stopwords, "Stopword file, one word per line (built-in list when unset)")
            ->check(CLI::ExistingFile);
    }

    PipelineConfig config() const {
        PipelineConfig c;
        c.mode = *parse_retrieval_mode(mode);
        c.top_k = k;
        return c;
    }
};

void print_result(std::ostream& out, const PipelineResult& r) {
    out << "intent\t" << to_string(r.analysis.intent) << '\t' << fixed(r.analysis.confidence, 3) << '\n';
    out << "answer\t" << r.answer.text << '\n';
    for (const auto& d : r.documents.items) out << "doc\t" << d.doc_id << '\t' << fixed(d.score) << '\n';
}

Service* g_service = nullptr;

extern "C" void stop_service(int) {
    if (g_service) g_service->stop();
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Retrieval-augmented question answering over historical dictionary entries", "lexirag"};
    app.set_config("--config", "", "TOML/INI file supplying option values");
    app.require_subcommand(1);

    std::function<void()> action;

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Validate entry/root JSON Lines files into a corpus directory");
    fs::path entries_path, roots_path, corpus_out;
    ingest->add_option("--entries", entries_path)->required()->check(CLI::ExistingFile);
    ingest->add_option("--roots", roots_path)->required()->check(CLI::ExistingFile);
    ingest->add_option("--out", corpus_out)->required();
    ingest->callback([&] {
        action = [&] {
            const auto result = ingest_files(entries_path, roots_path);
            save_corpus(result.corpus, result.stats, corpus_out);
            const auto& s = result.stats;
            out << "entries\t" << s.entries_kept << "\tdropped\t" << s.dropped() << "\tmalformed\t" << s.malformed
                << "\tmissing_required\t" << s.missing_required << "\tduplicate_ids\t" << s.duplicate_ids
                << "\tunknown_root\t" << s.unknown_root << "\troots\t" << s.roots_kept << '\n';
        };
    });

    // index build / embed
    auto* index = app.add_subcommand("index", "Build retrieval indexes");
    index->require_subcommand(1);
    fs::path corpus_dir;
    auto* index_build = index->add_subcommand("build", "Build the BM25 inverted index");
    index_build->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
    index_build->callback([&] {
        action = [&] {
            const auto corpus = load_corpus(corpus_dir);
            const auto idx = InvertedIndex::build(corpus.documents());
            idx.save(corpus_dir / corpus_files::bm25_index);
            out << "documents\t" << idx.doc_count() << "\tterms\t" << idx.term_count() << '\n';
        };
    });
    auto* index_embed = index->add_subcommand("embed", "Embed every document into the flat vector index");
    Providers embed_providers;
    std::size_t embed_dimension = 0;
    std::size_t embed_batch_size = 64;
    index_embed->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
    index_embed->add_option("--embed-endpoint", embed_providers.embed_endpoint, "Embedding API URL");
    index_embed->add_option("--embed-model", embed_providers.embed_model, "Embedding model name");
    index_embed->add_option("--embeddings-file", embed_providers.embeddings_file, "JSON Lines text/embedding table");
    index_embed->add_option("--embed-dim", embed_dimension, "Vector dimension of a remote embedding model");
    index_embed->add_option("--batch", embed_batch_size, "Texts per provider call")->check(CLI::PositiveNumber);
    index_embed->callback([&] {
        action = [&] {
            const auto corpus = load_corpus(corpus_dir);
            auto cfg = embed_providers.config();
            if (!cfg.embed.url.empty() && embed_dimension == 0) {
                throw Error(ErrorKind::invalid_argument, "--embed-dim is required with --embed-endpoint");
            }
            auto embedder = make_embedder(cfg, embed_dimension);
            if (!embedder) {
                throw Error(ErrorKind::invalid_argument, "index embed needs --embeddings-file or --embed-endpoint");
            }
            std::vector<Vector> vectors;
            std::vector<std::string> ids;
            const auto& docs = corpus.documents();
            for (std::size_t start = 0; start < docs.size(); start += embed_batch_size) {
                std::vector<std::string> texts;
                for (std::size_t i = start; i < std::min(docs.size(), start + embed_batch_size); ++i) {
                    texts.push_back(docs[i].text);
                    ids.push_back(docs[i].doc_id);
                }
                for (auto& v : embed_batch(*embedder, texts)) vectors.push_back(std::move(v));
            }
            const VectorIndex idx(vectors, std::move(ids));
            idx.save(corpus_dir / corpus_files::vectors);
            out << "vectors\t" << idx.size() << "\tdimension\t" << idx.dimension() << '\n';
        };
    });

    // intent train / predict
    auto* intent_cmd = app.add_subcommand("intent", "Train or query the intent classifier");
    intent_cmd->require_subcommand(1);
    fs::path intent_data, model_path;
    intent::ForestParams forest;
    auto* intent_train = intent_cmd->add_subcommand("train", "Fit TF-IDF features and the random forest");
    intent_train->add_option("--data", intent_data, "TSV query<TAB>fine_label")->required()->check(CLI::ExistingFile);
    intent_train->add_option("--out", model_path, "Model file (e.g. <corpus>/intent.model)")->required();
    intent_train->add_option("--trees", forest.n_trees)->check(CLI::PositiveNumber);
    intent_train->add_option("--seed", forest.seed);
    intent_train->add_option("--threads", forest.threads, "0 uses every core");
    intent_train->callback([&] {
        action = [&] {
            auto in_file = open_in(intent_data);
            const auto rows = intent::read_labeled_tsv(in_file);
            const auto model = intent::IntentModel::train(rows, forest);
            model.save(model_path);
            out << "rows\t" << rows.size() << "\tfeatures\t" << model.vocabulary().size() << "\ttrees\t"
                << model.forest().n_trees() << '\n';
        };
    });
    auto* intent_predict = intent_cmd->add_subcommand("predict", "Classify one query");
    std::string text;
    double threshold = intent::kDefaultThreshold;
    intent_predict->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
    intent_predict->add_option("--text", text)->required();
    intent_predict->add_option("--threshold", threshold)->check(CLI::Range(0.0, 1.0));
    intent_predict->callback([&] {
        action = [&] {
            const auto model = intent::IntentModel::load(model_path);
            const auto c = model.classify(text, threshold);
            out << to_string(c.intent) << '\t' << (c.fine ? to_string(*c.fine) : "-") << '\t'
                << fixed(c.confidence, 3) << '\n';
        };
    });

    // rerank pairs
    auto* rerank_cmd = app.add_subcommand("rerank", "Reranker training data");
    rerank_cmd->require_subcommand(1);
    auto* rerank_pairs = rerank_cmd->add_subcommand("pairs", "Sample positive/negative query-document pairs");
    fs::path qa_path, out_dir;
    std::size_t n_pos = 5000, n_neg = 5000;
    std::uint64_t seed = 0;
    double train_fraction = 0.7, validation_fraction = 0.1;
    rerank_pairs->add_option("--qa", qa_path)->required()->check(CLI::ExistingFile);
    rerank_pairs->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
    rerank_pairs->add_option("--n-pos", n_pos);
    rerank_pairs->add_option("--n-neg", n_neg);
    rerank_pairs->add_option("--seed", seed);
    rerank_pairs->add_option("--train", train_fraction)->check(CLI::Range(0.0, 1.0));
    rerank_pairs->add_option("--validation", validation_fraction)->check(CLI::Range(0.0, 1.0));
    rerank_pairs->add_option("--out-dir", out_dir)->required();
    rerank_pairs->callback([&] {
        action = [&] {
            const auto corpus = load_corpus(corpus_dir);
            const auto items = read_qa_jsonl(qa_path);
            const auto pairs = make_rerank_pairs(items, corpus, n_pos, n_neg, seed);
            const auto split = split_rerank_pairs(pairs, train_fraction, validation_fraction);
            for (const auto& [name, part] : {std::pair{"train.tsv", &split.train},
                                             std::pair{"validation.tsv", &split.validation},
                                             std::pair{"test.tsv", &split.test}}) {
                auto f = open_out(out_dir / name);
                write_rerank_pairs(f, *part);
                check_written(f, out_dir / name);
            }
            out << "train\t" << split.train.size() << "\tvalidation\t" << split.validation.size() << "\ttest\t"
                << split.test.size() << '\n';
        };
    });

    // datagen
    auto* datagen_cmd = app.add_subcommand("datagen", "Template-based dataset generation");
    datagen_cmd->require_subcommand(1);
    fs::path templates_dir, out_path, qrels_path, test_out;
    auto* dg_qa = datagen_cmd->add_subcommand("qa", "Generate question/answer items from a corpus");
    dg_qa->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
    dg_qa->add_option("--templates", templates_dir, "Directory with questions/ and answers/ (built-ins when unset)");
    dg_qa->add_option("--seed", seed);
    dg_qa->add_option("--out", out_path)->required();
    dg_qa->add_option("--qrels", qrels_path);
    dg_qa->callback([&] {
        action = [&] {
            const auto corpus = load_corpus(corpus_dir);
            const auto templates =
                templates_dir.empty() ? datagen::TemplateSet::builtin() : datagen::TemplateSet::load(templates_dir);
            const auto gen = datagen::generate_qa(corpus, templates, seed);
            auto f = open_out(out_path);
            write_qa_jsonl(f, gen.items);
            check_written(f, out_path);
            if (!qrels_path.empty()) {
                auto q = open_out(qrels_path);
                datagen::write_qrels(q, gen.items);
                check_written(q, qrels_path);
            }
            for (auto fine : kFineIntents) {
                auto g = gen.stats.generated.find(fine);
                auto s = gen.stats.skipped.find(fine);
                out << to_string(fine) << '\t' << (g == gen.stats.generated.end() ? 0 : g->second) << "\tskipped\t"
                    << (s == gen.stats.skipped.end() ? 0 : s->second) << '\n';
            }
        };
    });
    auto* dg_intent = datagen_cmd->add_subcommand("intent", "Balanced intent training/test TSVs from QA items");
    std::size_t per_class = 1000;
    double test_fraction = 0.2;
    dg_intent->add_option("--qa", qa_path)->required()->check(CLI::ExistingFile);
    dg_intent->add_option("--per-class", per_class)->check(CLI::PositiveNumber);
    dg_intent->add_option("--test-fraction", test_fraction)->check(CLI::Range(0.0, 1.0));
    dg_intent->add_option("--seed", seed);
    dg_intent->add_option("--out", out_path, "Training TSV")->required();
    dg_intent->add_option("--test-out", test_out, "Held-out TSV")->required();
    dg_intent->callback([&] {
        action = [&] {
            const auto items = read_qa_jsonl(qa_path);
            const auto ds = datagen::generate_intent_dataset(items, per_class, test_fraction, seed);
            auto train = open_out(out_path);
            intent::write_labeled_tsv(train, ds.train);
            check_written(train, out_path);
            auto test = open_out(test_out);
            intent::write_labeled_tsv(test, ds.test);
            check_written(test, test_out);
            out << "train\t" << ds.train.size() << "\ttest\t" << ds.test.size() << '\n';
        };
    });
    auto* dg_eval = datagen_cmd->add_subcommand("eval", "Filtered, subsampled evaluation set");
    std::string filter = "all";
    std::size_t limit = 0;
    bool answer_types = false;
    dg_eval->add_option("--qa", qa_path)->required()->check(CLI::ExistingFile);
    dg_eval->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
    dg_eval->add_option("--filter", filter)->check(CLI::IsMember({"all", "quran_hadith"}));
    dg_eval->add_option("--limit", limit, "0 keeps everything");
    dg_eval->add_flag("--answer-types", answer_types, "Keep only the six answer-evaluation question types");
    dg_eval->add_option("--seed", seed);
    dg_eval->add_option("--out", out_path)->required();
    dg_eval->add_option("--qrels", qrels_path);
    dg_eval->callback([&] {
        action = [&] {
            const auto corpus = load_corpus(corpus_dir);
            const auto items = read_qa_jsonl(qa_path);
            datagen::EvalSetOptions opts;
            opts.filter = filter == "all" ? datagen::EvalFilter::all : datagen::EvalFilter::quran_hadith;
            opts.seed = seed;
            if (limit > 0) opts.limit = limit;
            opts.answer_types_only = answer_types;
            const auto set = datagen::build_eval_set(items, corpus, opts);
            auto f = open_out(out_path);
            write_qa_jsonl(f, set.items);
            check_written(f, out_path);
            if (!qrels_path.empty()) {
                auto q = open_out(qrels_path);
                datagen::write_qrels(q, set.items);
                check_written(q, qrels_path);
            }
            if (set.truncated_request) {
                err << "warning\tlimit " << limit << " exceeds the " << set.items.size() << " available items\n";
            }
            for (const auto& [fine, n] : set.distribution) out << to_string(fine) << '\t' << n << '\n';
            out << "total\t" << set.items.size() << '\n';
        };
    });

    // query / repl / serve share the engine options
    Providers providers;
    QueryOptions qopts;
    bool as_json = false;
    auto* query = app.add_subcommand("query", "Answer one question");
    query->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
    query->add_option("--text", text)->required();
    query->add_flag("--json", as_json, "Print the /v1/query response body");
    qopts.add_to(query);
    providers.add_to(query);
    query->callback([&] {
        action = [&] {
            const auto engine = Engine::open(corpus_dir, providers.config(), qopts.config(), qopts.stopwords);
            if (as_json) {
                Service service(engine->pipeline());
                const auto res = service.handle("POST", "/v1/query", nlohmann::json{{"question", text}}.dump());
                if (res.status != 200) {
                    err << res.body << '\n';
                    throw Error(ErrorKind::generation, "query failed with HTTP " + std::to_string(res.status));
                }
                out << res.body << '\n';
                return;
            }
            print_result(out, engine->pipeline().run(text));
        };
    });

    auto* repl = app.add_subcommand("repl", "Interactive question loop (empty line or EOF exits)");
    repl->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
    qopts.add_to(repl);
    providers.add_to(repl);
    repl->callback([&] {
        action = [&] {
            const auto engine = Engine::open(corpus_dir, providers.config(), qopts.config(), qopts.stopwords);
            std::string line;
            out << "> " << std::flush;
            while (std::getline(in, line) && !line.empty()) {
                try {
                    print_result(out, engine->pipeline().run(line));
                } catch (const Error& e) {
                    err << "error\t" << to_string(e.kind()) << '\t' << e.what() << '\n';
                }
                out << "> " << std::flush;
            }
            out << '\n';
        };
    });

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Run the HTTP JSON API");
    serve->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
    serve->add_option("--host", host);
    serve->add_option("--port", port)->check(CLI::Range(1, 65535));
    qopts.add_to(serve);
    providers.add_to(serve);
    serve->callback([&] {
        action = [&] {
            const auto engine = Engine::open(corpus_dir, providers.config(), qopts.config(), qopts.stopwords);
            Service service(engine->pipeline());
            g_service = &service;
            std::signal(SIGINT, stop_service);
            std::signal(SIGTERM, stop_service);
            err << "listening on " << host << ':' << port << '\n';
            const bool ok = service.listen(host, port);
            g_service = nullptr;
            if (!ok) throw Error(ErrorKind::io, "cannot listen on " + host + ":" + std::to_string(port));
        };
    });

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Retrieval metrics, answer scoring, judge agreement");
    eval_cmd->require_subcommand(1);
    fs::path run_path, pairs_path;
    std::size_t recall_k = 10;
    auto* ev_retrieval = eval_cmd->add_subcommand("retrieval", "Print MRR, MAP and Recall@k tab-separated");
    ev_retrieval->add_option("--run", run_path)->required()->check(CLI::ExistingFile);
    ev_retrieval->add_option("--qrels", qrels_path)->required()->check(CLI::ExistingFile);
    ev_retrieval->add_option("--k", recall_k)->check(CLI::PositiveNumber);
    ev_retrieval->callback([&] {
        action = [&] {
            auto run_in = open_in(run_path);
            auto qrels_in = open_in(qrels_path);
            const auto r = eval::evaluate_run(eval::read_run(run_in), eval::read_qrels(qrels_in), recall_k);
            out << fixed(r.mrr) << '\t' << fixed(r.map) << '\t' << fixed(r.recall) << '\n';
        };
    });
    auto* ev_run = eval_cmd->add_subcommand("run", "Retrieve for every question of a QA set and write a run TSV");
    ev_run->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
    ev_run->add_option("--set", qa_path)->required()->check(CLI::ExistingFile);
    ev_run->add_option("--out", out_path)->required();
    qopts.add_to(ev_run);
    providers.add_to(ev_run);
    ev_run->callback([&] {
        action = [&] {
            const auto engine = Engine::open(corpus_dir, providers.config(), qopts.config(), qopts.stopwords);
            eval::Run run;
            for (const auto& item : read_qa_jsonl(qa_path)) {
                run[item.id] = engine->pipeline().search(engine->pipeline().analyze(item.question));
            }
            auto f = open_out(out_path);
            eval::write_run(f, run);
            check_written(f, out_path);
            out << "queries\t" << run.size() << '\n';
        };
    });
    auto* ev_answers = eval_cmd->add_subcommand("answers", "Answer a QA set and score it with a judge");
    std::string judge = "exact";
    Providers judge_providers;
    ev_answers->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
    ev_answers->add_option("--set", qa_path)->required()->check(CLI::ExistingFile);
    ev_answers->add_option("--judge", judge)->check(CLI::IsMember({"exact", "remote"}));
    ev_answers->add_option("--judge-endpoint", judge_providers.llm_endpoint, "Chat completions URL of the judge");
    ev_answers->add_option("--judge-model", judge_providers.llm_model);
    ev_answers->add_option("--out", out_path, "TSV item_id<TAB>fine_intent<TAB>score");
    qopts.add_to(ev_answers);
    providers.add_to(ev_answers);
    ev_answers->callback([&] {
        action = [&] {
            if (judge == "remote" && judge_providers.llm_endpoint.empty()) {
                throw Error(ErrorKind::invalid_argument, "--judge remote needs --judge-endpoint");
            }
            const auto engine = Engine::open(corpus_dir, providers.config(), qopts.config(), qopts.stopwords);
            std::unique_ptr<HttpChatClient> judge_client;
            if (judge == "remote") {
                judge_client = std::make_unique<HttpChatClient>(judge_providers.config().llm);
            }
            std::map<FineIntent, std::pair<double, std::size_t>> per_type;
            double total = 0;
            std::size_t n = 0;
            std::ofstream scores_out;
            if (!out_path.empty()) scores_out = open_out(out_path);
            for (const auto& item : read_qa_jsonl(qa_path)) {
                const auto result = engine->pipeline().run(item.question);
                const int score = judge_client
                                      ? eval::judge_remote(*judge_client, item.question, item.gold_answer,
                                                           result.answer.text)
                                      : eval::judge_exact(item, result.answer.text);
                if (scores_out.is_open()) scores_out << item.id << '\t' << to_string(item.fine_intent) << '\t' << score << '\n';
                auto& [sum, count] = per_type[item.fine_intent];
                sum += score;
                ++count;
                total += score;
                ++n;
            }
            if (n == 0) throw Error(ErrorKind::invalid_argument, "the QA set is empty");
            for (const auto& [fine, acc] : per_type) {
                out << to_string(fine) << '\t' << acc.second << '\t' << fixed(acc.first / acc.second, 2) << '\n';
            }
            out << "overall\t" << n << '\t' << fixed(total / n, 2) << '\n';
        };
    });
    auto* ev_agreement = eval_cmd->add_subcommand("agreement", "Judge/human agreement statistics");
    ev_agreement->add_option("--pairs", pairs_path)->required()->check(CLI::ExistingFile);
    ev_agreement->callback([&] {
        action = [&] {
            auto f = open_in(pairs_path);
            const auto pairs = eval::read_score_pairs(f);
            const auto r = eval::agreement(pairs);
            auto opt = [](const std::optional<double>& v) { return v ? fixed(*v) : std::string("undefined"); };
            out << "n\t" << r.n << '\n'
                << "exact_match_rate\t" << fixed(r.exact_match_rate) << '\n'
                << "within_one_category_rate\t" << fixed(r.within_one_category_rate) << '\n'
                << "mean_signed_diff\t" << fixed(r.mean_signed_diff) << '\n'
                << "mae\t" << fixed(r.mae) << '\n'
                << "pearson_r\t" << opt(r.pearson_r) << '\n'
                << "weighted_kappa_quadratic\t" << opt(r.weighted_kappa_quadratic) << '\n';
        };
    });

    std::vector<const char*> argv;
    argv.push_back("lexirag");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (action) action();
        return 0;
    } catch (const Error& e) {
        err << "error\t" << to_string(e.kind()) << '\t' << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error\tinternal\t" << e.what() << '\n';
    }
    return 1;
}

} // namespace lexirag::cli
