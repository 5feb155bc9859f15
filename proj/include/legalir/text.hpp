#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace legalir {

enum class TokenUnit { kSyllable, kWord };

std::string_view to_string(TokenUnit unit);
TokenUnit parse_token_unit(std::string_view name);

struct TokenizerConfig {
    TokenUnit unit = TokenUnit::kWord;
    bool lowercase = true;
    std::optional<std::filesystem::path> stopword_path;
};

using TokenStream = std::vector<std::string>;
using StopwordSet = std::unordered_set<std::string>;

// Splits on whitespace and strips surrounding punctuation from each chunk.
// In syllable mode underscores act as separators, so pre-segmented text
// degrades to syllables; in word mode "bài_báo" stays one token.
TokenStream tokenize(std::string_view text, TokenUnit unit, bool lowercase = true);

TokenStream remove_stopwords(const TokenStream& tokens, const StopwordSet& stoplist);

/// Unicode-aware lowercasing of a UTF-8 string. Diacritics are preserved.
std::string to_lower_utf8(std::string_view text);

/// Reads a stopword file: one token per line, '#' starts a comment line.
/// Entries are lowercased. An empty list is rejected.
StopwordSet load_stopwords(const std::filesystem::path& path);

/// Tokenization plus optional stopword filtering, configured once per index.
class Tokenizer {
public:
    Tokenizer() = default;
    explicit Tokenizer(TokenizerConfig config);
    Tokenizer(TokenUnit unit, bool lowercase, StopwordSet stopwords);

    TokenUnit unit() const noexcept { return unit_; }
    bool lowercase() const noexcept { return lowercase_; }
    const StopwordSet& stopwords() const noexcept { return stopwords_; }

    TokenStream tokens(std::string_view text) const { return tokenize(text, unit_, lowercase_); }

    /// Tokens with stopwords removed, as used on the lexical path.
    TokenStream terms(std::string_view text) const;

private:
    TokenUnit unit_ = TokenUnit::kWord;
    bool lowercase_ = true;
    StopwordSet stopwords_;
};

}  // namespace legalir
