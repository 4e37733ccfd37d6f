#include "lexirag/bm25.hpp"

#include "binary_io.hpp"
#include "lexirag/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

namespace lexirag {

namespace {
constexpr std::string_view kMagic = "LXBM25\n";
constexpr std::uint32_t kVersion = 1;
} // namespace

void Bm25Params::validate() const {
    if (!(k1 > 0.0) || !std::isfinite(k1)) throw Error(ErrorKind::invalid_argument, "bm25 k1 must be > 0");
    if (!(b >= 0.0 && b <= 1.0)) throw Error(ErrorKind::invalid_argument, "bm25 b must lie in [0, 1]");
}

InvertedIndex InvertedIndex::build(std::span<const RetrievalDocument> documents) {
    InvertedIndex index;
    index.doc_ids_.reserve(documents.size());
    index.doc_lengths_.reserve(documents.size());
    std::unordered_map<std::string, std::uint32_t> tf;
    std::uint64_t total_length = 0;
    for (std::size_t d = 0; d < documents.size(); ++d) {
        tf.clear();
        const auto tokens = text::tokenize(documents[d].text);
        for (const auto& tok : tokens) ++tf[tok];
        // Sorted so postings are appended in a reproducible order.
        std::vector<std::pair<std::string, std::uint32_t>> terms(tf.begin(), tf.end());
        std::sort(terms.begin(), terms.end());
        for (auto& [term, count] : terms) {
            index.postings_[term].push_back(Posting{static_cast<std::uint32_t>(d), count});
        }
        index.doc_ids_.push_back(documents[d].doc_id);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_length += tokens.size();
    }
    if (!documents.empty()) {
        index.avg_doc_length_ = static_cast<double>(total_length) / static_cast<double>(documents.size());
    }
    return index;
}

std::span<const Posting> InvertedIndex::postings(const std::string& term) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) return {};
    return it->second;
}

double bm25_idf(std::size_t doc_count, std::size_t df) noexcept {
    const double n = static_cast<double>(doc_count);
    const double f = static_cast<double>(df);
    return std::log(1.0 + (n - f + 0.5) / (f + 0.5));
}

RankedList bm25_search(const InvertedIndex& index, const text::TokenizedQuery& query, const Bm25Params& params,
                       std::size_t k) {
    params.validate();
    if (k == 0) throw Error(ErrorKind::invalid_argument, "bm25_search: k must be >= 1");
    RankedList result;
    const std::size_t n = index.doc_count();
    if (n == 0) return result;

    std::vector<double> scores(n, 0.0);
    std::vector<std::uint32_t> touched;
    std::unordered_set<std::string> seen;
    const double avgdl = index.avg_doc_length() > 0.0 ? index.avg_doc_length() : 1.0;
    const auto& lengths = index.doc_lengths();

    for (const auto& term : query.tokens) {
        if (!seen.insert(term).second) continue;
        const auto postings = index.postings(term);
        if (postings.empty()) continue;
        const double weight = static_cast<double>(query.boost(term)) * bm25_idf(n, postings.size());
        for (const auto& p : postings) {
            const double tf = p.tf;
            const double norm = params.k1 * (1.0 - params.b + params.b * lengths[p.doc] / avgdl);
            if (scores[p.doc] == 0.0) touched.push_back(p.doc);
            scores[p.doc] += weight * tf * (params.k1 + 1.0) / (tf + norm);
        }
    }

    std::vector<ScoredDoc> hits;
    hits.reserve(touched.size());
    for (auto d : touched) {
        if (scores[d] > 0.0) hits.push_back(ScoredDoc{index.doc_ids()[d], scores[d]});
    }
    truncate_ranked(hits, k);
    result.items = std::move(hits);
    return result;
}

void InvertedIndex::save(std::ostream& out) const {
    binio::write_magic(out, kMagic, kVersion);
    binio::write<std::uint64_t>(out, doc_ids_.size());
    for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
        binio::write_string(out, doc_ids_[d]);
        binio::write<std::uint32_t>(out, doc_lengths_[d]);
    }
    std::vector<const std::string*> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, _] : postings_) terms.push_back(&term);
    std::sort(terms.begin(), terms.end(), [](const auto* a, const auto* b) { return *a < *b; });
    binio::write<std::uint64_t>(out, terms.size());
    for (const auto* term : terms) {
        const auto& list = postings_.at(*term);
        binio::write_string(out, *term);
        binio::write<std::uint32_t>(out, static_cast<std::uint32_t>(list.size()));
        for (const auto& p : list) {
            binio::write<std::uint32_t>(out, p.doc);
            binio::write<std::uint32_t>(out, p.tf);
        }
    }
    if (!out) throw Error(ErrorKind::io, "failed writing bm25 index");
}

InvertedIndex InvertedIndex::load(std::istream& in) {
    binio::Reader r(in, "bm25 index");
    r.expect_magic(kMagic, kVersion);
    InvertedIndex index;
    const auto n = r.read<std::uint64_t>();
    if (n > (1ull << 32)) r.fail("document count out of range");
    std::uint64_t total = 0;
    for (std::uint64_t d = 0; d < n; ++d) {
        index.doc_ids_.push_back(r.read_string());
        index.doc_lengths_.push_back(r.read<std::uint32_t>());
        total += index.doc_lengths_.back();
    }
    if (n > 0) index.avg_doc_length_ = static_cast<double>(total) / static_cast<double>(n);
    const auto term_count = r.read<std::uint64_t>();
    for (std::uint64_t t = 0; t < term_count; ++t) {
        auto term = r.read_string();
        const auto len = r.read<std::uint32_t>();
        if (len > n) r.fail("posting list longer than document count");
        std::vector<Posting> list(len);
        for (auto& p : list) {
            p.doc = r.read<std::uint32_t>();
            p.tf = r.read<std::uint32_t>();
            if (p.doc >= n) r.fail("posting references unknown document");
        }
        index.postings_.emplace(std::move(term), std::move(list));
    }
    return index;
}

void InvertedIndex::save(const std::filesystem::path& path) const {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "cannot write " + tmp);
        save(out);
    }
    std::filesystem::rename(tmp, path);
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::missing_artifact,
                    "missing bm25 index " + path.string() + " (run `lexirag index build --corpus <dir>`)");
    }
    return load(in);
}

} // namespace lexirag
