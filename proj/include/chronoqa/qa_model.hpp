#pragma once

// Bundled candidate-selection QA model.
//
//   rep      = mean of token embeddings over [question tokens ; context tokens]
//   logit_j  = (W rep + b) . embed(candidate_j) + w_tau * tau_j
//
// embed(candidate) is the mean embedding of the candidate's tokens (the
// reserved no-answer token for ""). tau_j is 1 when the anchor year lies in
// the range the context text states for candidate j, else 0.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronoqa/corpus.hpp"
#include "chronoqa/rng.hpp"
#include "chronoqa/vocabulary.hpp"

namespace chronoqa {

struct EncodedInput {
    std::vector<TokenId> question_tokens;
    std::vector<TokenId> context_tokens;
    std::vector<std::string> candidates;  ///< document order, then ""
    std::vector<std::vector<TokenId>> candidate_tokens;
    std::vector<double> temporal_overlap;  ///< tau_j, one per candidate
};

/// Context-side encoding shared by every question on the context.
struct ContextEncoding {
    std::vector<TokenId> context_tokens;
    std::vector<std::string> candidates;
    std::vector<std::vector<TokenId>> candidate_tokens;
    /// Range the text states for each candidate, read from the sentence that
    /// names it (a single year reads as [y, y]). None for "" and for
    /// candidates whose sentence carries no year.
    std::vector<std::optional<TimeRange>> stated_ranges;
};

ContextEncoding encode_context(const Context& ctx, const Vocabulary& vocab);
EncodedInput make_input(const ContextEncoding& ctx, std::string_view question_text, Year anchor,
                        const Vocabulary& vocab, Year now_year);

/// Index of `answer` in the candidate list, if present.
std::optional<std::size_t> candidate_index(const EncodedInput& input, std::string_view answer);

struct Representation {
    std::vector<double> values;
};

struct CandidateScores {
    std::vector<double> logits;
};

/// Flat parameter store: [embeddings V*d][W d*d, row-major][b d][w_tau].
/// Gradients use the same type and layout.
class ModelParams {
public:
    ModelParams() = default;
    ModelParams(std::size_t vocab_size, std::size_t dim);

    /// Entries drawn uniformly from [-scale, scale].
    static ModelParams random(std::size_t vocab_size, std::size_t dim, double scale, Rng& rng);

    std::size_t vocab_size() const noexcept { return vocab_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<double> embedding(TokenId id);
    std::span<const double> embedding(TokenId id) const;
    std::span<double> projection();
    std::span<const double> projection() const;
    std::span<double> bias();
    std::span<const double> bias() const;
    double& temporal_weight() { return data_.back(); }
    double temporal_weight() const { return data_.back(); }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    void set_zero();

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
    std::size_t vocab_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// Throws ValidationError when the input has no tokens or ids exceed the table.
Representation encode(const EncodedInput& input, const ModelParams& params);
CandidateScores score_candidates(const Representation& rep, const EncodedInput& input, const ModelParams& params);

/// Argmax of the logits; ties go to the lowest index.
std::size_t argmax(std::span<const double> logits);
std::size_t predict_index(const EncodedInput& input, const ModelParams& params);
std::string predict(const EncodedInput& input, const ModelParams& params);

// Reverse mode. Gradients accumulate into `grads`.

/// d(loss)/d(embeddings) from d(loss)/d(rep).
void encode_backward(const EncodedInput& input, std::span<const double> grad_rep, ModelParams& grads);

/// Backpropagates d(loss)/d(logits) into W, b, w_tau and the candidate
/// embeddings; returns d(loss)/d(rep).
std::vector<double> score_backward(const Representation& rep, const EncodedInput& input, const ModelParams& params,
                                   std::span<const double> grad_logits, ModelParams& grads);

}  // namespace chronoqa
