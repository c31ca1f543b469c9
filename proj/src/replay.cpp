#include "chronoqa/replay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "chronoqa/errors.hpp"
#include "chronoqa/metrics.hpp"

namespace chronoqa {

std::string_view to_string(HardnessMetric m) { return m == HardnessMetric::f1 ? "f1" : "em"; }

std::optional<HardnessMetric> parse_hardness_metric(std::string_view s) {
    if (s == "f1") return HardnessMetric::f1;
    if (s == "em") return HardnessMetric::em;
    return std::nullopt;
}

std::string_view to_string(ReplayRole r) {
    switch (r) {
        case ReplayRole::current: return "current";
        case ReplayRole::replayed: return "replayed";
        case ReplayRole::dropped: return "dropped";
        case ReplayRole::distractor: return "distractor";
    }
    return "?";
}

void ReplayConfig::validate() const {
    if (!(mu >= 0.0 && mu < 1.0)) throw ValidationError("mu must lie in [0, 1)");
    if (!(nu >= 0.0 && nu < 1.0)) throw ValidationError("nu must lie in [0, 1)");
    if (!(retain_rate >= 0.0 && retain_rate <= 1.0)) throw ValidationError("retain_rate must lie in [0, 1]");
}

std::size_t fraction_count(double rate, std::size_t n) {
    if (rate <= 0.0 || n == 0) return 0;
    const double exact = rate * static_cast<double>(n);
    const auto count = static_cast<std::size_t>(std::ceil(exact - 1e-9));
    return std::min(count, n);
}

std::vector<ScoredSample> score_previous(const AnswerFn& answer, std::span<const Question> previous,
                                         HardnessMetric metric) {
    std::vector<ScoredSample> out;
    out.reserve(previous.size());
    for (const auto& q : previous) {
        const std::string pred = answer(q);
        const double score =
            metric == HardnessMetric::f1 ? token_f1(pred, q.answer) : static_cast<double>(exact_match(pred, q.answer));
        out.push_back({q.question_id, score, q.subset});
    }
    return out;
}

HardDropResult drop_hard(std::span<const ScoredSample> scored, double mu) {
    HardDropResult out;
    const std::size_t n_drop = fraction_count(mu, scored.size());
    std::vector<std::size_t> order(scored.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scored[a].score != scored[b].score) return scored[a].score < scored[b].score;
        return scored[a].question_id < scored[b].question_id;
    });
    std::vector<bool> removed(scored.size(), false);
    for (std::size_t i = 0; i < n_drop; ++i) {
        removed[order[i]] = true;
        out.removed.push_back(scored[order[i]]);
    }
    for (std::size_t i = 0; i < scored.size(); ++i) {
        if (!removed[i]) out.retained.push_back(scored[i]);
    }
    return out;
}

std::vector<Question> select_distractors(std::span<const Question> previous, std::span<const Question> current,
                                         double nu, Rng& rng) {
    std::unordered_map<std::string, std::set<std::string>> answers_by_context;
    for (const auto& q : current) answers_by_context[q.context_id].insert(q.answer);

    std::vector<Question> eligible;
    for (const auto& q : previous) {
        const auto it = answers_by_context.find(q.context_id);
        if (it == answers_by_context.end()) continue;
        const bool differs = std::any_of(it->second.begin(), it->second.end(),
                                         [&](const std::string& a) { return a != q.answer; });
        if (differs) eligible.push_back(q);
    }
    const std::size_t n = fraction_count(nu, eligible.size());
    std::vector<Question> out;
    if (n == 0) return out;
    std::sample(eligible.begin(), eligible.end(), std::back_inserter(out), n, rng.engine());
    return out;
}

StageTrainingSet build_stage_training_set(int stage, std::span<const Question> current,
                                          std::span<const std::vector<Question>> previous, const AnswerFn& answer,
                                          const ReplayConfig& cfg, std::uint64_t seed) {
    StageTrainingSet out;
    for (const auto& q : current) out.manifest.push_back({q.question_id, ReplayRole::current, -1.0, q.subset});
    if (stage <= 1 || previous.empty()) {
        out.questions.assign(current.begin(), current.end());
        return out;
    }

    Rng rng(seed, "replay", {static_cast<std::uint64_t>(stage)});
    std::vector<Question> pooled;
    for (const auto& subset : previous) pooled.insert(pooled.end(), subset.begin(), subset.end());
    std::unordered_map<std::string, const Question*> by_id;
    for (const auto& q : pooled) by_id.emplace(q.question_id, &q);

    std::vector<Question> replayed;
    std::vector<Question> distractors;

    if (cfg.mode == ReplayMode::uniform_subset) {
        for (const auto& subset : previous) {
            const std::size_t n = fraction_count(cfg.retain_rate, subset.size());
            if (n == 0) continue;
            std::sample(subset.begin(), subset.end(), std::back_inserter(replayed), n, rng.engine());
        }
    } else if (cfg.mode == ReplayMode::temporal) {
        std::vector<ScoredSample> retained;
        if (cfg.retain_rate > 0.0) {
            const auto scored = score_previous(answer, pooled, cfg.hardness_metric);
            std::vector<ScoredSample> removed;
            if (cfg.per_subset_hardness) {
                std::map<int, std::vector<ScoredSample>> by_subset;
                for (const auto& s : scored) by_subset[s.source_subset].push_back(s);
                for (const auto& [_, group] : by_subset) {
                    auto r = drop_hard(group, cfg.mu);
                    retained.insert(retained.end(), r.retained.begin(), r.retained.end());
                    removed.insert(removed.end(), r.removed.begin(), r.removed.end());
                }
            } else {
                auto r = drop_hard(scored, cfg.mu);
                retained = std::move(r.retained);
                removed = std::move(r.removed);
            }
            for (const auto& s : removed) {
                out.manifest.push_back({s.question_id, ReplayRole::dropped, s.score, s.source_subset});
            }
        }
        const std::size_t n = fraction_count(cfg.retain_rate, retained.size());
        if (n > 0) {
            std::vector<ScoredSample> picked;
            std::sample(retained.begin(), retained.end(), std::back_inserter(picked), n, rng.engine());
            for (const auto& s : picked) {
                replayed.push_back(*by_id.at(s.question_id));
                out.manifest.push_back({s.question_id, ReplayRole::replayed, s.score, s.source_subset});
            }
        }
        distractors = select_distractors(pooled, current, cfg.nu, rng);
    }

    if (cfg.mode == ReplayMode::uniform_subset) {
        for (const auto& q : replayed) out.manifest.push_back({q.question_id, ReplayRole::replayed, -1.0, q.subset});
    }

    std::unordered_set<std::string> seen;
    auto take = [&](const Question& q) {
        if (seen.insert(q.question_id).second) {
            out.questions.push_back(q);
            return true;
        }
        return false;
    };
    for (const auto& q : current) take(q);
    for (const auto& q : replayed) take(q);
    for (const auto& q : distractors) {
        if (take(q)) {
            out.distractor_ids.push_back(q.question_id);
            out.manifest.push_back({q.question_id, ReplayRole::distractor, -1.0, q.subset});
        }
    }
    std::shuffle(out.questions.begin(), out.questions.end(), rng.engine());
    std::stable_sort(out.manifest.begin(), out.manifest.end(), [](const auto& a, const auto& b) {
        if (a.role != b.role) return a.role < b.role;
        return a.question_id < b.question_id;
    });
    return out;
}

std::string manifest_to_jsonl(const std::vector<ReplayManifestEntry>& manifest) {
    std::string out;
    for (const auto& e : manifest) {
        nlohmann::ordered_json obj;
        obj["question_id"] = e.question_id;
        obj["role"] = to_string(e.role);
        obj["score"] = e.score < 0.0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(e.score);
        obj["source_subset"] = e.source_subset;
        out += obj.dump();
        out += '\n';
    }
    return out;
}

}  // namespace chronoqa
