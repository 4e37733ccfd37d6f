#include "lexirag/intent.hpp"

#include "binary_io.hpp"
#include "lexirag/arabic_text.hpp"
#include "lexirag/error.hpp"
#include "lexirag/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <thread>
#include <unordered_map>

namespace lexirag::intent {

namespace {

constexpr std::string_view kModelMagic = "LXINTENT\n";
constexpr std::uint32_t kModelVersion = 1;

double gini_from_counts(double sum_sq, double n) { return n > 0 ? 1.0 - sum_sq / (n * n) : 0.0; }

class TreeBuilder {
public:
    TreeBuilder(const SparseMatrix& x, std::span<const std::uint32_t> y, std::size_t n_classes,
                std::size_t max_features, std::uint64_t seed)
        : x_(x), y_(y), n_classes_(n_classes), max_features_(max_features), rng_(seed) {}

    DecisionTree build() {
        const std::size_t n = x_.n_rows();
        samples_.resize(n);
        for (auto& s : samples_) s = static_cast<std::uint32_t>(rng_.below(n));

        DecisionTree tree;
        struct Pending {
            std::int32_t node;
            std::size_t begin;
            std::size_t end;
        };
        tree.nodes.emplace_back();
        std::vector<Pending> stack{{0, 0, n}};
        while (!stack.empty()) {
            const auto [node, begin, end] = stack.back();
            stack.pop_back();
            auto split = find_split(begin, end);
            if (!split) {
                tree.nodes[node].class_counts = counts(begin, end);
                continue;
            }
            const auto mid = partition(begin, end, split->feature, split->threshold);
            const auto left = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            auto& parent = tree.nodes[node];
            parent.feature = static_cast<std::int32_t>(split->feature);
            parent.threshold = split->threshold;
            parent.left = left;
            parent.right = left + 1;
            stack.push_back({left + 1, mid, end});
            stack.push_back({left, begin, mid});
        }
        return tree;
    }

private:
    struct Split {
        std::uint32_t feature;
        double threshold;
    };

    std::vector<std::uint32_t> counts(std::size_t begin, std::size_t end) const {
        std::vector<std::uint32_t> c(n_classes_, 0);
        for (std::size_t i = begin; i < end; ++i) ++c[y_[samples_[i]]];
        return c;
    }

    std::size_t partition(std::size_t begin, std::size_t end, std::uint32_t feature, double threshold) {
        auto first = samples_.begin() + static_cast<std::ptrdiff_t>(begin);
        auto last = samples_.begin() + static_cast<std::ptrdiff_t>(end);
        auto mid = std::stable_partition(first, last, [&](std::uint32_t s) {
            return static_cast<double>(x_.rows[s].at(feature)) <= threshold;
        });
        return static_cast<std::size_t>(mid - samples_.begin());
    }

    std::optional<Split> find_split(std::size_t begin, std::size_t end) {
        const auto node_counts = counts(begin, end);
        const double n = static_cast<double>(end - begin);
        const auto nonzero_classes = std::count_if(node_counts.begin(), node_counts.end(), [](auto c) { return c > 0; });
        if (nonzero_classes <= 1) return std::nullopt;

        // All-zero features are constant within the node, so only features
        // with a nonzero entry in some node sample are candidates.
        candidates_.clear();
        for (std::size_t i = begin; i < end; ++i) {
            const auto& idx = x_.rows[samples_[i]].indices;
            candidates_.insert(candidates_.end(), idx.begin(), idx.end());
        }
        std::sort(candidates_.begin(), candidates_.end());
        candidates_.erase(std::unique(candidates_.begin(), candidates_.end()), candidates_.end());

        std::optional<Split> best;
        double best_impurity = std::numeric_limits<double>::infinity();
        std::size_t evaluated = 0;
        for (std::size_t drawn = 0; drawn < candidates_.size() && evaluated < max_features_; ++drawn) {
            const auto j = drawn + static_cast<std::size_t>(rng_.below(candidates_.size() - drawn));
            std::swap(candidates_[drawn], candidates_[j]);
            const auto feature = candidates_[drawn];

            column_.clear();
            for (std::size_t i = begin; i < end; ++i) {
                const auto s = samples_[i];
                column_.emplace_back(x_.rows[s].at(feature), y_[s]);
            }
            std::sort(column_.begin(), column_.end());
            if (column_.front().first == column_.back().first) continue;  // constant: does not count
            ++evaluated;

            left_.assign(n_classes_, 0);
            double left_sq = 0.0;
            double right_sq = 0.0;
            right_.assign(node_counts.begin(), node_counts.end());
            for (auto c : right_) right_sq += static_cast<double>(c) * c;
            for (std::size_t i = 0; i + 1 < column_.size(); ++i) {
                const auto label = column_[i].second;
                left_sq += 2.0 * left_[label] + 1.0;
                ++left_[label];
                right_sq -= 2.0 * right_[label] - 1.0;
                --right_[label];
                if (column_[i].first == column_[i + 1].first) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = n - nl;
                const double impurity = (nl * gini_from_counts(left_sq, nl) + nr * gini_from_counts(right_sq, nr)) / n;
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    const double lo = column_[i].first;
                    const double hi = column_[i + 1].first;
                    double threshold = lo + (hi - lo) / 2.0;
                    if (threshold >= hi) threshold = lo;
                    best = Split{feature, threshold};
                }
            }
        }
        return best;
    }

    const SparseMatrix& x_;
    std::span<const std::uint32_t> y_;
    std::size_t n_classes_;
    std::size_t max_features_;
    Rng rng_;
    std::vector<std::uint32_t> samples_;
    std::vector<std::uint32_t> candidates_;
    std::vector<std::pair<float, std::uint32_t>> column_;
    std::vector<std::uint32_t> left_;
    std::vector<std::uint32_t> right_;
};

void write_sparse_tree(std::ostream& out, const DecisionTree& tree) {
    binio::write<std::uint32_t>(out, static_cast<std::uint32_t>(tree.nodes.size()));
    for (const auto& node : tree.nodes) {
        binio::write<std::int32_t>(out, node.feature);
        if (node.is_leaf()) {
            binio::write<std::uint32_t>(out, static_cast<std::uint32_t>(node.class_counts.size()));
            for (auto c : node.class_counts) binio::write<std::uint32_t>(out, c);
        } else {
            binio::write<double>(out, node.threshold);
            binio::write<std::int32_t>(out, node.left);
            binio::write<std::int32_t>(out, node.right);
        }
    }
}

DecisionTree read_tree(binio::Reader& r, std::size_t n_classes) {
    DecisionTree tree;
    const auto n = r.read<std::uint32_t>();
    if (n == 0) r.fail("empty tree");
    tree.nodes.resize(n);
    for (auto& node : tree.nodes) {
        node.feature = r.read<std::int32_t>();
        if (node.is_leaf()) {
            const auto k = r.read<std::uint32_t>();
            if (k != n_classes) r.fail("leaf class count mismatch");
            node.class_counts.resize(k);
            for (auto& c : node.class_counts) c = r.read<std::uint32_t>();
        } else {
            node.threshold = r.read<double>();
            node.left = r.read<std::int32_t>();
            node.right = r.read<std::int32_t>();
            if (node.left <= 0 || node.right <= 0 || static_cast<std::uint32_t>(node.left) >= n ||
                static_cast<std::uint32_t>(node.right) >= n) {
                r.fail("child index out of range");
            }
        }
    }
    return tree;
}

} // namespace

float SparseVector::at(std::uint32_t feature) const noexcept {
    auto it = std::lower_bound(indices.begin(), indices.end(), feature);
    if (it == indices.end() || *it != feature) return 0.0f;
    return values[static_cast<std::size_t>(it - indices.begin())];
}

double SparseVector::norm() const noexcept {
    double sum = 0.0;
    for (float v : values) sum += static_cast<double>(v) * v;
    return std::sqrt(sum);
}

TfidfVocabulary TfidfVocabulary::fit(std::span<const std::string> queries, std::size_t min_df) {
    if (queries.empty()) throw Error(ErrorKind::invalid_argument, "fit_tfidf: no queries");
    TfidfVocabulary vocab;
    vocab.doc_count_ = queries.size();
    std::map<std::string, std::uint32_t> df;
    for (const auto& q : queries) {
        const auto tokens = text::tokenize(q);
        const std::set<std::string> distinct(tokens.begin(), tokens.end());
        for (const auto& t : distinct) ++df[t];
    }
    const double n = static_cast<double>(queries.size());
    std::uint32_t index = 0;
    for (const auto& [term, count] : df) {
        if (count < min_df) continue;
        const double idf = std::log((1.0 + n) / (1.0 + count)) + 1.0;
        vocab.terms_.emplace(term, Term{index++, count, idf});
    }
    return vocab;
}

const TfidfVocabulary::Term* TfidfVocabulary::find(const std::string& term) const {
    auto it = terms_.find(term);
    return it == terms_.end() ? nullptr : &it->second;
}

SparseVector TfidfVocabulary::vectorize(const std::string& query) const {
    std::map<std::uint32_t, double> weights;
    for (const auto& tok : text::tokenize(query)) {
        if (const auto* term = find(tok)) weights[term->index] += term->idf;
    }
    SparseVector v;
    double norm = 0.0;
    for (const auto& [_, w] : weights) norm += w * w;
    norm = std::sqrt(norm);
    for (const auto& [i, w] : weights) {
        v.indices.push_back(i);
        v.values.push_back(static_cast<float>(w / norm));
    }
    return v;
}

void TfidfVocabulary::save(std::ostream& out) const {
    binio::write<std::uint64_t>(out, doc_count_);
    binio::write<std::uint64_t>(out, terms_.size());
    for (const auto& [term, info] : terms_) {
        binio::write_string(out, term);
        binio::write<std::uint32_t>(out, info.index);
        binio::write<std::uint32_t>(out, info.df);
        binio::write<double>(out, info.idf);
    }
}

TfidfVocabulary TfidfVocabulary::load(std::istream& in) {
    binio::Reader r(in, "tfidf vocabulary");
    TfidfVocabulary vocab;
    vocab.doc_count_ = r.read<std::uint64_t>();
    const auto n = r.read<std::uint64_t>();
    std::vector<bool> used(n, false);
    for (std::uint64_t i = 0; i < n; ++i) {
        auto term = r.read_string();
        Term info{};
        info.index = r.read<std::uint32_t>();
        info.df = r.read<std::uint32_t>();
        info.idf = r.read<double>();
        if (info.index >= n || used[info.index] || info.df == 0) r.fail("corrupt term table");
        used[info.index] = true;
        vocab.terms_.emplace(std::move(term), info);
    }
    return vocab;
}

SparseMatrix SparseMatrix::from_dense(const std::vector<std::vector<float>>& dense) {
    SparseMatrix m;
    m.n_features = dense.empty() ? 0 : dense.front().size();
    for (const auto& row : dense) {
        if (row.size() != m.n_features) throw Error(ErrorKind::invalid_argument, "ragged feature matrix");
        SparseVector v;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (row[j] != 0.0f) {
                v.indices.push_back(static_cast<std::uint32_t>(j));
                v.values.push_back(row[j]);
            }
        }
        m.rows.push_back(std::move(v));
    }
    return m;
}

const TreeNode& DecisionTree::leaf_for(const SparseVector& x) const {
    const TreeNode* node = &nodes.front();
    while (!node->is_leaf()) {
        const double v = x.at(static_cast<std::uint32_t>(node->feature));
        node = &nodes[static_cast<std::size_t>(v <= node->threshold ? node->left : node->right)];
    }
    return *node;
}

std::uint32_t DecisionTree::predict(const SparseVector& x) const {
    const auto& counts = leaf_for(x).class_counts;
    return static_cast<std::uint32_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

ForestModel::ForestModel(std::vector<DecisionTree> trees, std::size_t n_classes, std::uint64_t seed)
    : trees_(std::move(trees)), n_classes_(n_classes), seed_(seed) {}

std::vector<std::uint32_t> ForestModel::votes(const SparseVector& x) const {
    std::vector<std::uint32_t> v(n_classes_, 0);
    for (const auto& tree : trees_) ++v[tree.predict(x)];
    return v;
}

ForestModel::Vote ForestModel::predict(const SparseVector& x) const {
    const auto v = votes(x);
    const auto best = std::max_element(v.begin(), v.end());
    const double share = trees_.empty() ? 0.0 : static_cast<double>(*best) / static_cast<double>(trees_.size());
    return Vote{static_cast<std::uint32_t>(best - v.begin()), share};
}

void ForestModel::save(std::ostream& out) const {
    binio::write<std::uint64_t>(out, seed_);
    binio::write<std::uint32_t>(out, static_cast<std::uint32_t>(n_classes_));
    binio::write<std::uint32_t>(out, static_cast<std::uint32_t>(trees_.size()));
    for (const auto& tree : trees_) write_sparse_tree(out, tree);
}

ForestModel ForestModel::load(std::istream& in) {
    binio::Reader r(in, "forest");
    const auto seed = r.read<std::uint64_t>();
    const auto n_classes = r.read<std::uint32_t>();
    const auto n_trees = r.read<std::uint32_t>();
    std::vector<DecisionTree> trees;
    trees.reserve(n_trees);
    for (std::uint32_t t = 0; t < n_trees; ++t) trees.push_back(read_tree(r, n_classes));
    return ForestModel(std::move(trees), n_classes, seed);
}

ForestModel train_forest(const SparseMatrix& features, std::span<const std::uint32_t> labels, std::size_t n_classes,
                         const ForestParams& params) {
    if (features.n_rows() != labels.size()) {
        throw Error(ErrorKind::invalid_argument, "train_forest: " + std::to_string(features.n_rows()) + " rows but " +
                                                     std::to_string(labels.size()) + " labels");
    }
    if (params.n_trees == 0) throw Error(ErrorKind::invalid_argument, "train_forest: n_trees must be >= 1");
    std::set<std::uint32_t> distinct;
    for (auto l : labels) {
        if (l >= n_classes) throw Error(ErrorKind::invalid_argument, "train_forest: label out of range");
        distinct.insert(l);
    }
    if (distinct.size() < 2) throw Error(ErrorKind::invalid_argument, "train_forest: need at least two classes");

    std::size_t max_features = params.max_features;
    if (max_features == 0) {
        max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(features.n_features))));
    }

    std::vector<DecisionTree> trees(params.n_trees);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < trees.size(); t = next++) {
            TreeBuilder builder(features, labels, n_classes, max_features, derive_seed(params.seed, t));
            trees[t] = builder.build();
        }
    };
    std::size_t threads = params.threads == 0 ? std::thread::hardware_concurrency() : params.threads;
    threads = std::clamp<std::size_t>(threads, 1, trees.size());
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    return ForestModel(std::move(trees), n_classes, params.seed);
}

std::vector<LabeledQuery> read_labeled_tsv(std::istream& in) {
    std::vector<LabeledQuery> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::normalize(line).empty()) continue;
        const auto tab = line.rfind('\t');
        if (tab == std::string::npos) {
            throw Error(ErrorKind::format, "intent data line " + std::to_string(line_no) + ": expected query<TAB>label");
        }
        const auto label = parse_fine_intent(text::normalize(line.substr(tab + 1)));
        if (!label) {
            throw Error(ErrorKind::format, "intent data line " + std::to_string(line_no) + ": unknown label '" +
                                               line.substr(tab + 1) + "'");
        }
        rows.push_back(LabeledQuery{line.substr(0, tab), *label});
    }
    return rows;
}

void write_labeled_tsv(std::ostream& out, std::span<const LabeledQuery> rows) {
    for (const auto& row : rows) {
        std::string q = row.query;
        for (auto& c : q) {
            if (c == '\t' || c == '\n' || c == '\r') c = ' ';
        }
        out << q << '\t' << to_string(row.label) << '\n';
    }
}

IntentModel::IntentModel(TfidfVocabulary vocab, ForestModel forest) : vocab_(std::move(vocab)), forest_(std::move(forest)) {}

IntentModel IntentModel::train(std::span<const LabeledQuery> data, const ForestParams& params, std::size_t min_df) {
    std::vector<std::string> queries;
    std::vector<std::uint32_t> labels;
    queries.reserve(data.size());
    for (const auto& row : data) {
        queries.push_back(row.query);
        labels.push_back(static_cast<std::uint32_t>(row.label));
    }
    auto vocab = TfidfVocabulary::fit(queries, min_df);
    if (vocab.size() == 0) {
        throw Error(ErrorKind::insufficient_data,
                    "no term occurs in " + std::to_string(min_df) + " or more training queries");
    }
    SparseMatrix x;
    x.n_features = vocab.size();
    x.rows.reserve(queries.size());
    for (const auto& q : queries) x.rows.push_back(vocab.vectorize(q));
    auto forest = train_forest(x, labels, kFineIntents.size(), params);
    return IntentModel(std::move(vocab), std::move(forest));
}

Classification classify_intent(const ForestModel& model, const TfidfVocabulary& vocab, const std::string& query,
                               double threshold) {
    Classification out;
    const auto x = vocab.vectorize(query);
    if (x.empty() || model.n_trees() == 0) return out;
    const auto vote = model.predict(x);
    out.confidence = vote.share;
    if (vote.label < kFineIntents.size()) out.fine = kFineIntents[vote.label];
    if (vote.share < threshold || !out.fine) {
        out.intent = RoutingIntent::other;
    } else {
        out.intent = route(*out.fine);
    }
    return out;
}

Classification IntentModel::classify(const std::string& query, double threshold) const {
    return classify_intent(forest_, vocab_, query, threshold);
}

void IntentModel::save(std::ostream& out) const {
    binio::write_magic(out, kModelMagic, kModelVersion);
    binio::write<std::uint32_t>(out, static_cast<std::uint32_t>(kFineIntents.size()));
    for (auto label : kFineIntents) binio::write_string(out, to_string(label));
    vocab_.save(out);
    forest_.save(out);
    if (!out) throw Error(ErrorKind::io, "failed writing intent model");
}

IntentModel IntentModel::load(std::istream& in) {
    binio::Reader r(in, "intent model");
    r.expect_magic(kModelMagic, kModelVersion);
    const auto n_labels = r.read<std::uint32_t>();
    if (n_labels != kFineIntents.size()) r.fail("label set mismatch");
    for (auto label : kFineIntents) {
        if (r.read_string() != to_string(label)) r.fail("label set mismatch");
    }
    auto vocab = TfidfVocabulary::load(in);
    auto forest = ForestModel::load(in);
    if (forest.n_classes() != kFineIntents.size()) r.fail("class count mismatch");
    return IntentModel(std::move(vocab), std::move(forest));
}

void IntentModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    save(out);
}

IntentModel IntentModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::missing_artifact,
                    "missing intent model " + path.string() + " (run `lexirag intent train`)");
    }
    return load(in);
}

} // namespace lexirag::intent
