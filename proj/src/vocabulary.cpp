#include "chronoqa/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "chronoqa/errors.hpp"
#include "chronoqa/rng.hpp"

namespace chronoqa {
std::vector<std::string> model_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
    };
    for (std::size_t i = 0; i < text.size();) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (c < 0x80) {
            if (std::isalnum(c) != 0) {
                cur += static_cast<char>(std::tolower(c));
            } else {
                flush();
            }
            ++i;
            continue;
        }
        // U+2000..U+206F (general punctuation) is E2 80..81 xx in UTF-8.
        if (c == 0xE2 && i + 2 < text.size() &&
            (static_cast<unsigned char>(text[i + 1]) == 0x80 || static_cast<unsigned char>(text[i + 1]) == 0x81)) {
            flush();
            i += 3;
            continue;
        }
        cur += text[i];
        ++i;
    }
    flush();
    return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::size_t oov_buckets)
    : tokens_(std::move(tokens)), oov_buckets_(oov_buckets) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (!index_.emplace(tokens_[i], static_cast<TokenId>(i + 1)).second) {
            throw ValidationError("duplicate vocabulary token '" + tokens_[i] + "'");
        }
    }
}

Vocabulary Vocabulary::from_corpus(const Corpus& corpus, std::size_t oov_buckets) {
    std::set<std::string> seen;
    auto add = [&](std::string_view text) {
        for (auto& t : model_tokens(text)) seen.insert(std::move(t));
    };
    for (const auto& c : corpus.contexts) {
        add(c.entity);
        for (const auto& p : c.paragraphs) add(p);
        for (const auto& f : c.facts) add(f.value);
    }
    for (const auto& q : corpus.questions) {
        if (q.split == Split::train) add(q.text);
    }
    return Vocabulary(std::vector<std::string>(seen.begin(), seen.end()), oov_buckets);
}

TokenId Vocabulary::id(std::string_view token) const {
    if (const auto it = index_.find(std::string(token)); it != index_.end()) return it->second;
    if (oov_buckets_ == 0) return kNoAnswer;
    const auto bucket = fnv1a64(token) % oov_buckets_;
    return static_cast<TokenId>(1 + tokens_.size() + bucket);
}

std::vector<TokenId> Vocabulary::encode(std::string_view text) const {
    std::vector<TokenId> out;
    for (const auto& t : model_tokens(text)) out.push_back(id(t));
    return out;
}

}  // namespace chronoqa
