#include "chronoqa/qa_model.hpp"

#include <algorithm>
#include <cmath>

#include "chronoqa/errors.hpp"

namespace chronoqa {
namespace {

// Sentence of `paragraph` containing byte offset `pos`.
std::string_view sentence_around(std::string_view paragraph, std::size_t pos) {
    auto is_end = [&](std::size_t i) {
        const char c = paragraph[i];
        return (c == '.' || c == '!' || c == '?') &&
               (i + 1 == paragraph.size() || paragraph[i + 1] == ' ' || paragraph[i + 1] == '\n');
    };
    std::size_t begin = pos;
    while (begin > 0 && !is_end(begin - 1)) --begin;
    std::size_t end = pos;
    while (end < paragraph.size() && !is_end(end)) ++end;
    return paragraph.substr(begin, std::min(paragraph.size(), end + 1) - begin);
}

std::optional<TimeRange> stated_range(std::string_view sentence) {
    if (auto r = parse_range(sentence)) return r;
    const auto years = extract_years(sentence);
    if (years.size() == 1) return TimeRange::closed(years.front().value, years.front().value);
    return std::nullopt;
}

void check_ids(std::span<const TokenId> ids, std::size_t vocab) {
    for (TokenId t : ids) {
        if (t >= vocab) throw ValidationError("token id " + std::to_string(t) + " exceeds vocabulary size");
    }
}

}  // namespace

ContextEncoding encode_context(const Context& ctx, const Vocabulary& vocab) {
    ContextEncoding enc;
    for (const auto& p : ctx.paragraphs) {
        const auto ids = vocab.encode(p);
        enc.context_tokens.insert(enc.context_tokens.end(), ids.begin(), ids.end());
    }

    struct Located {
        std::size_t paragraph;
        std::size_t offset;
        const TimelineFact* fact;
    };
    std::vector<Located> located;
    for (const auto& f : ctx.facts) {
        if (std::any_of(located.begin(), located.end(), [&](const Located& l) { return l.fact->value == f.value; })) {
            continue;
        }
        std::size_t para = ctx.paragraphs.size();
        std::size_t offset = 0;
        const auto hint = static_cast<std::size_t>(std::max(0, f.paragraph_index));
        if (hint < ctx.paragraphs.size()) {
            if (auto pos = ctx.paragraphs[hint].find(f.value); pos != std::string::npos) {
                para = hint;
                offset = pos;
            }
        }
        for (std::size_t p = 0; para == ctx.paragraphs.size() && p < ctx.paragraphs.size(); ++p) {
            if (auto pos = ctx.paragraphs[p].find(f.value); pos != std::string::npos) {
                para = p;
                offset = pos;
            }
        }
        located.push_back({para, offset, &f});
    }
    std::stable_sort(located.begin(), located.end(), [](const Located& a, const Located& b) {
        return a.paragraph != b.paragraph ? a.paragraph < b.paragraph : a.offset < b.offset;
    });

    for (const auto& l : located) {
        enc.candidates.push_back(l.fact->value);
        auto ids = vocab.encode(l.fact->value);
        if (ids.empty()) ids.push_back(Vocabulary::kNoAnswer);
        enc.candidate_tokens.push_back(std::move(ids));
        if (l.paragraph < ctx.paragraphs.size()) {
            enc.stated_ranges.push_back(stated_range(sentence_around(ctx.paragraphs[l.paragraph], l.offset)));
        } else {
            enc.stated_ranges.push_back(std::nullopt);
        }
    }
    enc.candidates.emplace_back();
    enc.candidate_tokens.push_back({Vocabulary::kNoAnswer});
    enc.stated_ranges.push_back(std::nullopt);
    return enc;
}

EncodedInput make_input(const ContextEncoding& ctx, std::string_view question_text, Year anchor,
                        const Vocabulary& vocab, Year now_year) {
    EncodedInput in;
    in.question_tokens = vocab.encode(question_text);
    in.context_tokens = ctx.context_tokens;
    in.candidates = ctx.candidates;
    in.candidate_tokens = ctx.candidate_tokens;
    in.temporal_overlap.reserve(ctx.stated_ranges.size());
    for (const auto& r : ctx.stated_ranges) {
        const bool inside = r && r->start <= anchor && anchor <= r->resolved_end(now_year);
        in.temporal_overlap.push_back(inside ? 1.0 : 0.0);
    }
    return in;
}

std::optional<std::size_t> candidate_index(const EncodedInput& input, std::string_view answer) {
    for (std::size_t j = 0; j < input.candidates.size(); ++j) {
        if (input.candidates[j] == answer) return j;
    }
    return std::nullopt;
}

ModelParams::ModelParams(std::size_t vocab_size, std::size_t dim)
    : vocab_(vocab_size), dim_(dim), data_(vocab_size * dim + dim * dim + dim + 1, 0.0) {}

ModelParams ModelParams::random(std::size_t vocab_size, std::size_t dim, double scale, Rng& rng) {
    ModelParams p(vocab_size, dim);
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (double& v : p.data_) v = dist(rng.engine());
    return p;
}

std::span<double> ModelParams::embedding(TokenId id) {
    return std::span<double>(data_).subspan(static_cast<std::size_t>(id) * dim_, dim_);
}
std::span<const double> ModelParams::embedding(TokenId id) const {
    return std::span<const double>(data_).subspan(static_cast<std::size_t>(id) * dim_, dim_);
}
std::span<double> ModelParams::projection() { return std::span<double>(data_).subspan(vocab_ * dim_, dim_ * dim_); }
std::span<const double> ModelParams::projection() const {
    return std::span<const double>(data_).subspan(vocab_ * dim_, dim_ * dim_);
}
std::span<double> ModelParams::bias() { return std::span<double>(data_).subspan(vocab_ * dim_ + dim_ * dim_, dim_); }
std::span<const double> ModelParams::bias() const {
    return std::span<const double>(data_).subspan(vocab_ * dim_ + dim_ * dim_, dim_);
}

void ModelParams::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

Representation encode(const EncodedInput& input, const ModelParams& params) {
    const std::size_t n = input.question_tokens.size() + input.context_tokens.size();
    if (input.question_tokens.empty() || input.context_tokens.empty()) {
        throw ValidationError("encode: question and context must both contain tokens");
    }
    check_ids(input.question_tokens, params.vocab_size());
    check_ids(input.context_tokens, params.vocab_size());

    const std::size_t d = params.dim();
    Representation rep{std::vector<double>(d, 0.0)};
    auto add = [&](TokenId t) {
        const auto e = params.embedding(t);
        for (std::size_t i = 0; i < d; ++i) rep.values[i] += e[i];
    };
    for (TokenId t : input.question_tokens) add(t);
    for (TokenId t : input.context_tokens) add(t);
    const double inv = 1.0 / static_cast<double>(n);
    for (double& v : rep.values) v *= inv;
    return rep;
}

namespace {

std::vector<double> hidden(const Representation& rep, const ModelParams& params) {
    const std::size_t d = params.dim();
    const auto w = params.projection();
    const auto b = params.bias();
    std::vector<double> h(b.begin(), b.end());
    for (std::size_t i = 0; i < d; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) acc += w[i * d + j] * rep.values[j];
        h[i] += acc;
    }
    return h;
}

std::vector<double> candidate_embedding(std::span<const TokenId> tokens, const ModelParams& params) {
    const std::size_t d = params.dim();
    std::vector<double> e(d, 0.0);
    for (TokenId t : tokens) {
        const auto row = params.embedding(t);
        for (std::size_t i = 0; i < d; ++i) e[i] += row[i];
    }
    const double inv = 1.0 / static_cast<double>(tokens.size());
    for (double& v : e) v *= inv;
    return e;
}

}  // namespace

CandidateScores score_candidates(const Representation& rep, const EncodedInput& input, const ModelParams& params) {
    const auto h = hidden(rep, params);
    CandidateScores out;
    out.logits.reserve(input.candidates.size());
    for (std::size_t j = 0; j < input.candidate_tokens.size(); ++j) {
        check_ids(input.candidate_tokens[j], params.vocab_size());
        const auto e = candidate_embedding(input.candidate_tokens[j], params);
        double logit = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) logit += h[i] * e[i];
        const double tau = j < input.temporal_overlap.size() ? input.temporal_overlap[j] : 0.0;
        out.logits.push_back(logit + params.temporal_weight() * tau);
    }
    return out;
}

std::size_t argmax(std::span<const double> logits) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < logits.size(); ++j) {
        if (logits[j] > logits[best]) best = j;
    }
    return best;
}

std::size_t predict_index(const EncodedInput& input, const ModelParams& params) {
    return argmax(score_candidates(encode(input, params), input, params).logits);
}

std::string predict(const EncodedInput& input, const ModelParams& params) {
    return input.candidates[predict_index(input, params)];
}

void encode_backward(const EncodedInput& input, std::span<const double> grad_rep, ModelParams& grads) {
    const std::size_t n = input.question_tokens.size() + input.context_tokens.size();
    const double inv = 1.0 / static_cast<double>(n);
    const std::size_t d = grads.dim();
    auto add = [&](TokenId t) {
        auto row = grads.embedding(t);
        for (std::size_t i = 0; i < d; ++i) row[i] += grad_rep[i] * inv;
    };
    for (TokenId t : input.question_tokens) add(t);
    for (TokenId t : input.context_tokens) add(t);
}

std::vector<double> score_backward(const Representation& rep, const EncodedInput& input, const ModelParams& params,
                                   std::span<const double> grad_logits, ModelParams& grads) {
    const std::size_t d = params.dim();
    const auto h = hidden(rep, params);

    std::vector<double> grad_h(d, 0.0);
    for (std::size_t j = 0; j < input.candidate_tokens.size(); ++j) {
        const double g = grad_logits[j];
        if (g == 0.0) continue;
        const auto& toks = input.candidate_tokens[j];
        const auto e = candidate_embedding(toks, params);
        for (std::size_t i = 0; i < d; ++i) grad_h[i] += g * e[i];
        const double share = g / static_cast<double>(toks.size());
        for (TokenId t : toks) {
            auto row = grads.embedding(t);
            for (std::size_t i = 0; i < d; ++i) row[i] += share * h[i];
        }
        const double tau = j < input.temporal_overlap.size() ? input.temporal_overlap[j] : 0.0;
        grads.temporal_weight() += g * tau;
    }

    auto gw = grads.projection();
    auto gb = grads.bias();
    const auto w = params.projection();
    std::vector<double> grad_rep(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        gb[i] += grad_h[i];
        for (std::size_t j = 0; j < d; ++j) {
            gw[i * d + j] += grad_h[i] * rep.values[j];
            grad_rep[j] += w[i * d + j] * grad_h[i];
        }
    }
    return grad_rep;
}

}  // namespace chronoqa
