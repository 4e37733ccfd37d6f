#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lexirag::text {

// Diacritic set removed for indexing: harakat U+064B..U+065F, superscript
// alef U+0670 and tatweel U+0640.
constexpr bool is_diacritic(char32_t cp) noexcept {
    return (cp >= 0x064B && cp <= 0x065F) || cp == 0x0670 || cp == 0x0640;
}

bool is_space(char32_t cp) noexcept;
bool is_punctuation(char32_t cp) noexcept;

/// Decodes UTF-8 into codepoints. Returns false on a malformed sequence.
bool decode_utf8(std::string_view in, std::u32string& out);
void append_utf8(std::string& out, char32_t cp);
bool is_valid_utf8(std::string_view in);

/// Removes exactly the diacritic codepoints; everything else (including bytes
/// of malformed sequences) passes through in order.
std::string strip_diacritics(std::string_view in);

/// strip_diacritics, then trims and collapses whitespace runs to one ASCII space.
std::string normalize(std::string_view in);

/// Whitespace split with edge punctuation stripped, after diacritic removal.
std::vector<std::string> tokenize(std::string_view in);

class StopwordList {
public:
    /// Throws Error(format) if no words remain after parsing.
    explicit StopwordList(std::set<std::string> words);

    /// One word per line, `#` starts a comment.
    static StopwordList parse(std::istream& in);
    static StopwordList load(const std::filesystem::path& path);
    /// The list compiled into the library from resources/stopwords.txt.
    static const StopwordList& builtin();

    bool contains(const std::string& word) const { return words_.contains(word); }
    const std::set<std::string>& words() const noexcept { return words_; }
    std::size_t size() const noexcept { return words_.size(); }

private:
    std::set<std::string> words_;
};

std::vector<std::string> remove_noise(const std::vector<std::string>& tokens, const StopwordList& stopwords);

/// Words whose following token is treated as the query's key term.
const std::vector<std::string>& trigger_words();

/// Weight given to key terms for a cleaned query of `cleaned_length` tokens:
/// clamp(round(L / 4), 1, 3).
int key_term_weight(std::size_t cleaned_length) noexcept;

/// Returns a weight for every cleaned token: key terms (the token after a
/// trigger word, or any token enclosed in quotes or brackets in the raw query)
/// get key_term_weight(|cleaned|), all others 1.
std::map<std::string, int> term_boosts(std::string_view raw_query, const std::vector<std::string>& cleaned_tokens);

struct TokenizedQuery {
    std::string raw;
    std::vector<std::string> tokens;
    std::map<std::string, int> boosts;

    int boost(const std::string& token) const {
        auto it = boosts.find(token);
        return it == boosts.end() ? 1 : it->second;
    }
    /// Cleaned tokens joined by single spaces (what dense encoders receive).
    std::string cleaned_text() const;
};

TokenizedQuery analyze(std::string_view raw_query, const StopwordList& stopwords);

} // namespace lexirag::text
