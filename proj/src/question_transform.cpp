#include "chronoqa/question_transform.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "chronoqa/errors.hpp"

namespace chronoqa {

std::string_view to_string(SimilarMethod m) {
    return m == SimilarMethod::dataset_paraphrase ? "dataset_paraphrase" : "token_shuffle";
}

std::optional<SimilarMethod> parse_similar_method(std::string_view s) {
    if (s == "dataset_paraphrase") return SimilarMethod::dataset_paraphrase;
    if (s == "token_shuffle") return SimilarMethod::token_shuffle;
    return std::nullopt;
}

std::vector<Year> answer_changing_years(const Question& q, const Context& ctx, Year earliest, Year now_year) {
    const auto relation = resolve_relation(q, ctx);
    std::vector<Year> out;
    if (!relation) return out;
    for (Year y = earliest; y <= now_year; ++y) {
        if (answer_at(ctx, *relation, y, now_year) != q.answer) out.push_back(y);
    }
    return out;
}

ContrastiveQuestion make_contrastive(const Question& q, const Context& ctx, Year earliest, Year now_year, Rng& rng) {
    const auto mentions = extract_years(q.text);
    const YearMention* anchor = nullptr;
    for (const auto& m : mentions) {
        if (m.value == q.anchor_year) anchor = &m;
    }
    if (anchor == nullptr) throw TransformUnavailable(q.question_id + ": anchor year not found in text");

    const auto years = answer_changing_years(q, ctx, earliest, now_year);
    if (years.empty()) throw TransformUnavailable(q.question_id + ": no year changes the answer");
    const Year chosen = years[rng.index(years.size())];
    return {replace_year(q.text, *anchor, chosen), chosen};
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) out.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string shuffle_non_temporal_tokens(std::string_view text, Rng& rng) {
    auto tokens = whitespace_tokens(text);
    std::vector<std::size_t> movable;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (extract_years(tokens[i]).empty()) movable.push_back(i);
    }
    std::vector<std::size_t> perm(movable.size());
    std::iota(perm.begin(), perm.end(), 0);
    if (perm.size() >= 2) {
        do {
            std::shuffle(perm.begin(), perm.end(), rng.engine());
        } while (std::is_sorted(perm.begin(), perm.end()));
    }
    auto shuffled = tokens;
    for (std::size_t i = 0; i < movable.size(); ++i) shuffled[movable[i]] = tokens[movable[perm[i]]];

    std::string out;
    for (const auto& t : shuffled) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

SimilarQuestion make_similar(const Question& q, const TemplateAvailability& templates, Rng& rng) {
    if (const auto m = match_template(q.text)) {
        const auto alternatives = templates.alternatives(m->relation, m->template_id);
        if (!alternatives.empty()) {
            const int id = alternatives[rng.index(alternatives.size())];
            return {render_template(m->relation, id, m->entity, m->year), SimilarMethod::dataset_paraphrase};
        }
    }
    return {shuffle_non_temporal_tokens(q.text, rng), SimilarMethod::token_shuffle};
}

std::vector<TripletRecord> build_triplets(const Corpus& corpus, std::uint64_t seed, Year now_year) {
    const auto templates = TemplateAvailability::from_questions(corpus.questions);
    const Year earliest = corpus.earliest_year().value_or(now_year);

    std::vector<TripletRecord> out;
    for (const auto& q : corpus.questions) {
        if (q.split != Split::train) continue;
        const Context* ctx = corpus.find_context(q.context_id);
        if (ctx == nullptr) continue;
        Rng rng(seed, "transform", {fnv1a64(q.question_id)});
        try {
            const auto con = make_contrastive(q, *ctx, earliest, now_year, rng);
            const auto sim = make_similar(q, templates, rng);
            out.push_back({q.question_id, sim.text, con.text, con.anchor, sim.method});
        } catch (const TransformUnavailable&) {
            // trained prediction-only
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.question_id < b.question_id; });
    return out;
}

std::string triplets_to_jsonl(const std::vector<TripletRecord>& triplets) {
    std::string out;
    for (const auto& t : triplets) {
        nlohmann::ordered_json obj;
        obj["question_id"] = t.question_id;
        obj["similar"] = t.similar;
        obj["contrastive"] = t.contrastive;
        obj["contrastive_anchor"] = t.contrastive_anchor;
        obj["method"] = to_string(t.method);
        out += obj.dump(-1, ' ', false);
        out += '\n';
    }
    return out;
}

std::vector<TripletRecord> parse_triplets_jsonl(std::string_view text, const std::string& source) {
    std::vector<TripletRecord> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        const auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            const auto obj = nlohmann::json::parse(line);
            TripletRecord t;
            t.question_id = obj.at("question_id").get<std::string>();
            t.similar = obj.at("similar").get<std::string>();
            t.contrastive = obj.at("contrastive").get<std::string>();
            t.contrastive_anchor = obj.at("contrastive_anchor").get<int>();
            const auto method = parse_similar_method(obj.at("method").get<std::string>());
            if (!method) throw ParseError(source, line_no, "unknown method");
            t.method = *method;
            out.push_back(std::move(t));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    return out;
}

}  // namespace chronoqa
