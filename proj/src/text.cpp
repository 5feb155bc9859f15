#include "legalir/text.hpp"

#include <fstream>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "legalir/error.hpp"

namespace legalir {
namespace {

struct CodePoint {
    UChar32 value;
    std::size_t begin;
    std::size_t end;
};

std::vector<CodePoint> decode(std::string_view text) {
    std::vector<CodePoint> out;
    out.reserve(text.size());
    const auto* s = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t i = 0;
    while (i < length) {
        const int32_t begin = i;
        UChar32 c;
        U8_NEXT(s, i, length, c);
        if (c < 0) c = 0xFFFD;
        out.push_back({c, static_cast<std::size_t>(begin), static_cast<std::size_t>(i)});
    }
    return out;
}

void append_utf8(std::string& out, UChar32 c) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, c, error);
    if (error) return;
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

bool is_separator(UChar32 c, TokenUnit unit) {
    if (u_isUWhiteSpace(c)) return true;
    return unit == TokenUnit::kSyllable && c == '_';
}

// Letters, digits and combining marks (decomposed diacritics).
bool is_word_char(UChar32 c) {
    if (u_isalnum(c)) return true;
    const auto type = u_charType(c);
    return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK || type == U_ENCLOSING_MARK;
}

}  // namespace

std::string_view to_string(TokenUnit unit) {
    return unit == TokenUnit::kSyllable ? "syllable" : "word";
}

TokenUnit parse_token_unit(std::string_view name) {
    if (name == "syllable") return TokenUnit::kSyllable;
    if (name == "word") return TokenUnit::kWord;
    throw Error(ErrorKind::kInvalidArgument, "unknown token unit '" + std::string(name) + "'");
}

std::string to_lower_utf8(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (const auto& cp : decode(text)) append_utf8(out, u_tolower(cp.value));
    return out;
}

TokenStream tokenize(std::string_view text, TokenUnit unit, bool lowercase) {
    TokenStream tokens;
    const auto cps = decode(text);
    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && is_separator(cps[i].value, unit)) ++i;
        std::size_t j = i;
        while (j < cps.size() && !is_separator(cps[j].value, unit)) ++j;

        std::size_t lo = i;
        std::size_t hi = j;
        const auto keep = [&](UChar32 c) { return is_word_char(c) || c == '_'; };
        while (lo < hi && !keep(cps[lo].value)) ++lo;
        while (hi > lo && !keep(cps[hi - 1].value)) --hi;

        bool has_word_char = false;
        for (std::size_t p = lo; p < hi && !has_word_char; ++p) has_word_char = is_word_char(cps[p].value);

        if (has_word_char) {
            std::string token;
            if (lowercase) {
                for (std::size_t p = lo; p < hi; ++p) append_utf8(token, u_tolower(cps[p].value));
            } else {
                token.assign(text.substr(cps[lo].begin, cps[hi - 1].end - cps[lo].begin));
            }
            tokens.push_back(std::move(token));
        }
        i = j;
    }
    return tokens;
}

TokenStream remove_stopwords(const TokenStream& tokens, const StopwordSet& stoplist) {
    if (stoplist.empty()) return tokens;
    TokenStream out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (!stoplist.contains(t)) out.push_back(t);
    }
    return out;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path.string(), "cannot open stopword file");
    StopwordSet words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line.front() == '#') continue;
        // A stopword line may itself contain a segmented compound; normalize
        // it like any other text but keep underscores intact.
        for (auto& token : tokenize(line, TokenUnit::kWord, true)) words.insert(std::move(token));
    }
    if (words.empty()) throw Error(ErrorKind::kValidation, path.string() + ": stopword list is empty");
    return words;
}

Tokenizer::Tokenizer(TokenizerConfig config) : unit_(config.unit), lowercase_(config.lowercase) {
    if (config.stopword_path) stopwords_ = load_stopwords(*config.stopword_path);
}

Tokenizer::Tokenizer(TokenUnit unit, bool lowercase, StopwordSet stopwords)
    : unit_(unit), lowercase_(lowercase), stopwords_(std::move(stopwords)) {}

TokenStream Tokenizer::terms(std::string_view text) const {
    auto toks = tokens(text);
    if (stopwords_.empty()) return toks;
    return remove_stopwords(toks, stopwords_);
}

}  // namespace legalir
