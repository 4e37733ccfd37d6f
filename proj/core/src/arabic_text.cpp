#include "lexirag/arabic_text.hpp"

#include "lexirag/error.hpp"
#include "lexirag/resources.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lexirag::text {

namespace {

// Returns the decoded codepoint and its byte length, or length 0 for a
// malformed sequence at `pos`.
std::pair<char32_t, std::size_t> decode_one(std::string_view in, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(in[pos]);
    if (b0 < 0x80) return {b0, 1};
    std::size_t len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
        min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
        min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
        min = 0x10000;
    } else {
        return {0, 0};
    }
    if (pos + len > in.size()) return {0, 0};
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(in[pos + i]);
        if ((b & 0xC0) != 0x80) return {0, 0};
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return {0, 0};
    return {cp, len};
}

template <class Fn>
void for_each_codepoint(std::string_view in, Fn&& fn) {
    std::size_t pos = 0;
    while (pos < in.size()) {
        auto [cp, len] = decode_one(in, pos);
        if (len == 0) {
            // Malformed byte: report it as-is so callers can pass it through.
            fn(char32_t{0xFFFFFFFF}, in.substr(pos, 1));
            ++pos;
        } else {
            fn(cp, in.substr(pos, len));
            pos += len;
        }
    }
}

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Returns the matching closer for an opening quote/bracket, or 0.
char32_t closer_for(char32_t cp) noexcept {
    switch (cp) {
    case U'(': return U')';
    case U'[': return U']';
    case U'{': return U'}';
    case U'"': return U'"';
    case 0x00AB: return 0x00BB; // « »
    case 0x201C: return 0x201D; // “ ”
    case 0xFD3E: return 0xFD3F; // ornate parentheses, either orientation
    case 0xFD3F: return 0xFD3E;
    default: return 0;
    }
}

std::vector<std::string> bracketed_tokens(std::string_view raw) {
    std::u32string cps;
    for_each_codepoint(raw, [&](char32_t cp, std::string_view) { cps.push_back(cp); });
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < cps.size()) {
        const char32_t close = closer_for(cps[i]);
        if (close == 0) {
            ++i;
            continue;
        }
        const auto end = cps.find(close, i + 1);
        if (end == std::u32string::npos) {
            ++i;
            continue;
        }
        std::string inner;
        for (std::size_t j = i + 1; j < end; ++j) {
            if (cps[j] != kInvalid) append_utf8(inner, cps[j]);
        }
        for (auto& tok : tokenize(inner)) out.push_back(std::move(tok));
        i = end + 1;
    }
    return out;
}

bool matches_trigger(const std::string& token, const std::string& trigger) {
    if (token == trigger) return true;
    // Attached proclitics: و ف ب ك ل + trigger, and ل + ال-trigger → لل...
    static const std::vector<std::string> proclitics = {"و", "ف", "ب", "ك", "ل"};
    for (const auto& p : proclitics) {
        if (token == p + trigger) return true;
    }
    static const std::string al = "ال";
    if (trigger.starts_with(al) && token == "لل" + trigger.substr(al.size())) return true;
    return false;
}

} // namespace

bool is_space(char32_t cp) noexcept {
    switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
    case 0x0085: case 0x00A0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
        return true;
    default:
        return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_punctuation(char32_t cp) noexcept {
    if (cp < 0x80) {
        return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
               (cp >= 0x7B && cp <= 0x7E);
    }
    switch (cp) {
    case 0x00A1: case 0x00AB: case 0x00B7: case 0x00BB: case 0x00BF:
    case 0x060C: // ،
    case 0x061B: // ؛
    case 0x061E: case 0x061F: // ؟
    case 0x066A: case 0x066B: case 0x066C: case 0x066D:
    case 0x06D4: case 0xFD3E: case 0xFD3F:
        return true;
    default:
        return cp >= 0x2010 && cp <= 0x2027;
    }
}

bool decode_utf8(std::string_view in, std::u32string& out) {
    out.clear();
    std::size_t pos = 0;
    while (pos < in.size()) {
        auto [cp, len] = decode_one(in, pos);
        if (len == 0) return false;
        out.push_back(cp);
        pos += len;
    }
    return true;
}

bool is_valid_utf8(std::string_view in) {
    std::size_t pos = 0;
    while (pos < in.size()) {
        auto [cp, len] = decode_one(in, pos);
        if (len == 0) return false;
        pos += len;
    }
    return true;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string strip_diacritics(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    for_each_codepoint(in, [&](char32_t cp, std::string_view bytes) {
        if (cp == kInvalid || !is_diacritic(cp)) out.append(bytes);
    });
    return out;
}

std::string normalize(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    bool pending_space = false;
    for_each_codepoint(in, [&](char32_t cp, std::string_view bytes) {
        if (cp != kInvalid && is_diacritic(cp)) return;
        if (cp != kInvalid && is_space(cp)) {
            pending_space = !out.empty();
            return;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.append(bytes);
    });
    return out;
}

std::vector<std::string> tokenize(std::string_view in) {
    std::vector<std::string> tokens;
    std::u32string word;
    auto flush = [&] {
        std::size_t begin = 0;
        std::size_t end = word.size();
        while (begin < end && word[begin] != kInvalid && is_punctuation(word[begin])) ++begin;
        while (end > begin && word[end - 1] != kInvalid && is_punctuation(word[end - 1])) --end;
        if (begin < end) {
            std::string tok;
            for (std::size_t i = begin; i < end; ++i) {
                if (word[i] != kInvalid) append_utf8(tok, word[i]);
            }
            if (!tok.empty()) tokens.push_back(std::move(tok));
        }
        word.clear();
    };
    for_each_codepoint(in, [&](char32_t cp, std::string_view) {
        if (cp != kInvalid && is_diacritic(cp)) return;
        if (cp != kInvalid && is_space(cp)) {
            flush();
        } else {
            word.push_back(cp);
        }
    });
    flush();
    return tokens;
}

StopwordList::StopwordList(std::set<std::string> words) {
    for (const auto& w : words) {
        auto cleaned = normalize(w);
        if (!cleaned.empty()) words_.insert(std::move(cleaned));
    }
    if (words_.empty()) throw Error(ErrorKind::format, "stopword list is empty");
}

StopwordList StopwordList::parse(std::istream& in) {
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto word = normalize(line);
        if (!word.empty()) words.insert(std::move(word));
    }
    return StopwordList(std::move(words));
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open stopword file " + path.string());
    return parse(in);
}

const StopwordList& StopwordList::builtin() {
    static const StopwordList list = [] {
        std::istringstream in{std::string(resources::get("stopwords.txt"))};
        return parse(in);
    }();
    return list;
}

std::vector<std::string> remove_noise(const std::vector<std::string>& tokens, const StopwordList& stopwords) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    std::copy_if(tokens.begin(), tokens.end(), std::back_inserter(out),
                 [&](const std::string& t) { return !stopwords.contains(t); });
    return out;
}

const std::vector<std::string>& trigger_words() {
    static const std::vector<std::string> words = {"كلمة", "عبارة", "الجذر", "لفظ"};
    return words;
}

int key_term_weight(std::size_t cleaned_length) noexcept {
    const long w = std::lround(static_cast<double>(cleaned_length) / 4.0);
    return static_cast<int>(std::clamp(w, 1L, 3L));
}

std::map<std::string, int> term_boosts(std::string_view raw_query, const std::vector<std::string>& cleaned_tokens) {
    std::map<std::string, int> boosts;
    for (const auto& tok : cleaned_tokens) boosts.emplace(tok, 1);

    std::set<std::string> key_terms;
    const auto raw_tokens = tokenize(raw_query);
    for (std::size_t i = 0; i + 1 < raw_tokens.size(); ++i) {
        const bool trigger = std::any_of(trigger_words().begin(), trigger_words().end(),
                                         [&](const std::string& t) { return matches_trigger(raw_tokens[i], t); });
        if (trigger) key_terms.insert(raw_tokens[i + 1]);
    }
    for (auto& tok : bracketed_tokens(raw_query)) key_terms.insert(std::move(tok));

    const int weight = key_term_weight(cleaned_tokens.size());
    for (const auto& term : key_terms) {
        if (auto it = boosts.find(term); it != boosts.end()) it->second = weight;
    }
    return boosts;
}

std::string TokenizedQuery::cleaned_text() const {
    std::string out;
    for (const auto& tok : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += tok;
    }
    return out;
}

TokenizedQuery analyze(std::string_view raw_query, const StopwordList& stopwords) {
    TokenizedQuery q;
    q.raw = std::string(raw_query);
    q.tokens = remove_noise(tokenize(raw_query), stopwords);
    q.boosts = term_boosts(raw_query, q.tokens);
    return q;
}

} // namespace lexirag::text
