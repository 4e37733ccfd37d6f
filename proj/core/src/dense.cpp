#include "lexirag/dense.hpp"

#include "binary_io.hpp"
#include "lexirag/arabic_text.hpp"
#include "lexirag/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <unordered_set>

namespace lexirag {

namespace {
constexpr std::string_view kMagic = "LXVEC\n";
constexpr std::uint32_t kVersion = 1;
} // namespace

std::vector<Vector> embed_batch(EmbeddingProvider& provider, std::span<const std::string> texts) {
    for (const auto& t : texts) {
        if (t.empty()) throw Error(ErrorKind::invalid_argument, "embed_batch: empty text");
    }
    if (texts.empty()) return {};
    auto vectors = provider.embed(texts);
    if (vectors.size() != texts.size()) {
        throw Error(ErrorKind::contract_violation, provider.name() + ": returned " + std::to_string(vectors.size()) +
                                                       " vectors for " + std::to_string(texts.size()) + " texts");
    }
    for (const auto& v : vectors) {
        if (v.size() != provider.dimension()) {
            throw Error(ErrorKind::contract_violation, provider.name() + ": vector of dimension " +
                                                           std::to_string(v.size()) + ", declared " +
                                                           std::to_string(provider.dimension()));
        }
    }
    return vectors;
}

FileEmbeddingProvider::FileEmbeddingProvider(std::size_t dimension, std::string name)
    : dimension_(dimension), name_(std::move(name)) {
    if (dimension_ == 0) throw Error(ErrorKind::invalid_argument, "embedding dimension must be > 0");
}

void FileEmbeddingProvider::add(const std::string& text, Vector v) {
    if (v.size() != dimension_) {
        throw Error(ErrorKind::invalid_argument, "vector for '" + text + "' has dimension " + std::to_string(v.size()));
    }
    table_.insert_or_assign(text::normalize(text), std::move(v));
}

std::vector<Vector> FileEmbeddingProvider::embed(std::span<const std::string> texts) {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        auto it = table_.find(text::normalize(t));
        if (it == table_.end()) throw Error(ErrorKind::not_found, name_ + ": no embedding registered for '" + t + "'");
        out.push_back(it->second);
    }
    return out;
}

FileEmbeddingProvider FileEmbeddingProvider::parse(std::istream& in) {
    std::optional<FileEmbeddingProvider> provider;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::normalize(line).empty()) continue;
        auto obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.contains("text") || !obj.contains("embedding") ||
            !obj["text"].is_string() || !obj["embedding"].is_array()) {
            throw Error(ErrorKind::format, "embedding file line " + std::to_string(line_no) + ": expected {text, embedding}");
        }
        Vector v;
        for (const auto& x : obj["embedding"]) {
            if (!x.is_number()) throw Error(ErrorKind::format, "embedding file line " + std::to_string(line_no));
            v.push_back(x.get<float>());
        }
        if (!provider) provider.emplace(v.size());
        provider->add(obj["text"].get<std::string>(), std::move(v));
    }
    if (!provider) throw Error(ErrorKind::format, "embedding file is empty");
    return std::move(*provider);
}

FileEmbeddingProvider FileEmbeddingProvider::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open embedding file " + path.string());
    return parse(in);
}

void FileEmbeddingProvider::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    for (const auto& [text, v] : table_) {
        nlohmann::json obj;
        obj["text"] = text;
        obj["embedding"] = v;
        out << obj.dump() << '\n';
    }
    if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

VectorIndex::VectorIndex(std::span<const Vector> vectors, std::vector<std::string> ids) : ids_(std::move(ids)) {
    if (vectors.size() != ids_.size()) {
        throw Error(ErrorKind::invalid_argument, "vector index: " + std::to_string(vectors.size()) + " vectors but " +
                                                     std::to_string(ids_.size()) + " ids");
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : ids_) {
        if (!seen.insert(id).second) throw Error(ErrorKind::invalid_argument, "vector index: duplicate id " + id);
    }
    if (vectors.empty()) return;
    dimension_ = vectors.front().size();
    if (dimension_ == 0) throw Error(ErrorKind::invalid_argument, "vector index: zero-dimensional vectors");
    data_.reserve(vectors.size() * dimension_);
    for (const auto& v : vectors) {
        if (v.size() != dimension_) {
            throw Error(ErrorKind::invalid_argument, "vector index: dimension mismatch (" + std::to_string(v.size()) +
                                                         " vs " + std::to_string(dimension_) + ")");
        }
        data_.insert(data_.end(), v.begin(), v.end());
    }
}

double squared_l2(std::span<const float> a, std::span<const float> b) noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sum += d * d;
    }
    return sum;
}

RankedList knn_l2(const VectorIndex& index, std::span<const float> query, std::size_t k) {
    if (k == 0) throw Error(ErrorKind::invalid_argument, "knn_l2: k must be >= 1");
    RankedList result;
    if (index.size() == 0) return result;
    if (query.size() != index.dimension()) {
        throw Error(ErrorKind::invalid_argument, "knn_l2: query dimension " + std::to_string(query.size()) +
                                                     " != index dimension " + std::to_string(index.dimension()));
    }
    std::vector<ScoredDoc> all;
    all.reserve(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        all.push_back(ScoredDoc{index.ids()[i], -squared_l2(index.vector(i), query)});
    }
    truncate_ranked(all, k);
    result.items = std::move(all);
    return result;
}

void VectorIndex::save(std::ostream& out) const {
    binio::write_magic(out, kMagic, kVersion);
    binio::write<std::uint32_t>(out, static_cast<std::uint32_t>(dimension_));
    binio::write<std::uint64_t>(out, ids_.size());
    for (const auto& id : ids_) binio::write_string(out, id);
    out.write(reinterpret_cast<const char*>(data_.data()), static_cast<std::streamsize>(data_.size() * sizeof(float)));
    if (!out) throw Error(ErrorKind::io, "failed writing vector store");
}

VectorIndex VectorIndex::load(std::istream& in) {
    binio::Reader r(in, "vector store");
    r.expect_magic(kMagic, kVersion);
    VectorIndex index;
    index.dimension_ = r.read<std::uint32_t>();
    const auto count = r.read<std::uint64_t>();
    if (count > (1ull << 32)) r.fail("vector count out of range");
    if (count > 0 && index.dimension_ == 0) r.fail("zero dimension");
    index.ids_.reserve(count);
    std::unordered_set<std::string> seen;
    for (std::uint64_t i = 0; i < count; ++i) {
        index.ids_.push_back(r.read_string());
        if (!seen.insert(index.ids_.back()).second) r.fail("duplicate id " + index.ids_.back());
    }
    index.data_.resize(count * index.dimension_);
    r.read_bytes(index.data_.data(), index.data_.size() * sizeof(float));
    return index;
}

void VectorIndex::save(const std::filesystem::path& path) const {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "cannot write " + tmp);
        save(out);
    }
    std::filesystem::rename(tmp, path);
}

VectorIndex VectorIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::missing_artifact,
                    "missing vector store " + path.string() + " (run `lexirag index embed --corpus <dir>`)");
    }
    return load(in);
}

} // namespace lexirag
