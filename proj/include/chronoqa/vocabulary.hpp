#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chronoqa/corpus.hpp"

namespace chronoqa {

using TokenId = std::uint32_t;

/// Lowercased word pieces: ASCII letters/digits and non-ASCII letters form
/// tokens; ASCII punctuation, whitespace and Unicode general punctuation
/// (dashes, quotes) separate them.
std::vector<std::string> model_tokens(std::string_view text);

/// Token table: id 0 is the reserved "no answer" token, then the known
/// tokens in sorted order, then `oov_buckets` hash buckets for everything else.
class Vocabulary {
public:
    static constexpr TokenId kNoAnswer = 0;

    Vocabulary() = default;
    Vocabulary(std::vector<std::string> tokens, std::size_t oov_buckets);

    /// Tokens of every context, every fact value and every train question.
    static Vocabulary from_corpus(const Corpus& corpus, std::size_t oov_buckets);

    TokenId id(std::string_view token) const;
    std::vector<TokenId> encode(std::string_view text) const;

    std::size_t size() const noexcept { return 1 + tokens_.size() + oov_buckets_; }
    std::size_t oov_buckets() const noexcept { return oov_buckets_; }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

private:
    std::vector<std::string> tokens_;
    std::size_t oov_buckets_ = 0;
    std::unordered_map<std::string, TokenId> index_;
};

}  // namespace chronoqa
