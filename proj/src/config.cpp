#include "chronoqa/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <functional>

#include "chronoqa/errors.hpp"
#include "chronoqa/rng.hpp"

namespace chronoqa {
namespace {

using nlohmann::json;

struct KeySpec {
    const char* name;
    const char* help;
    std::function<json(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const json&)> set;
};

[[noreturn]] void bad_type(std::string_view key, std::string_view expected, const json& v) {
    throw ValidationError("config key '" + std::string(key) + "' expects " + std::string(expected) + ", got " +
                          v.dump());
}

double as_real(std::string_view key, const json& v) {
    if (!v.is_number()) bad_type(key, "a number", v);
    return v.get<double>();
}

long long as_int(std::string_view key, const json& v) {
    if (!v.is_number_integer()) bad_type(key, "an integer", v);
    return v.get<long long>();
}

bool as_bool(std::string_view key, const json& v) {
    if (!v.is_boolean()) bad_type(key, "true or false", v);
    return v.get<bool>();
}

std::string as_string(std::string_view key, const json& v) {
    if (!v.is_string()) bad_type(key, "a string", v);
    return v.get<std::string>();
}

template <std::size_t N>
std::array<double, N> as_mix(std::string_view key, const json& v) {
    if (!v.is_array() || v.size() != N) bad_type(key, "an array of " + std::to_string(N) + " numbers", v);
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = as_real(key, v[i]);
    return out;
}

#define REAL_KEY(NAME, HELP, FIELD)                                                       \
    KeySpec {                                                                             \
        NAME, HELP, [](const ExperimentConfig& c) { return json(c.FIELD); },              \
            [](ExperimentConfig& c, const json& v) { c.FIELD = as_real(NAME, v); }        \
    }
#define INT_KEY(NAME, HELP, FIELD, TYPE)                                                  \
    KeySpec {                                                                             \
        NAME, HELP, [](const ExperimentConfig& c) { return json(c.FIELD); },              \
            [](ExperimentConfig& c, const json& v) { c.FIELD = static_cast<TYPE>(as_int(NAME, v)); } \
    }
#define BOOL_KEY(NAME, HELP, FIELD)                                                       \
    KeySpec {                                                                             \
        NAME, HELP, [](const ExperimentConfig& c) { return json(c.FIELD); },              \
            [](ExperimentConfig& c, const json& v) { c.FIELD = as_bool(NAME, v); }        \
    }

const std::vector<KeySpec>& registry() {
    static const std::vector<KeySpec> keys = {
        KeySpec{"alpha", "weight of the prediction loss",
                [](const ExperimentConfig& c) { return json(c.loss.alpha); },
                [](ExperimentConfig& c, const json& v) { c.loss.alpha = as_real("alpha", v); }},
        KeySpec{"arm", "baseline | tmr_only | tcl_only | full | plain_mr | tmr_no_harddrop",
                [](const ExperimentConfig& c) { return json(std::string(to_string(c.arm))); },
                [](ExperimentConfig& c, const json& v) {
                    const auto s = as_string("arm", v);
                    const auto a = parse_arm(s);
                    if (!a) throw ValidationError("unknown arm '" + s + "'");
                    c.arm = *a;
                }},
        INT_KEY("batch_size", "samples per optimizer step", training.batch_size, int),
        REAL_KEY("beta", "weight of the similar-question loss", loss.beta),
        REAL_KEY("beta1", "AdamW first-moment decay", training.adamw.beta1),
        REAL_KEY("beta2", "AdamW second-moment decay", training.adamw.beta2),
        KeySpec{"boundaries", "subset year ranges, e.g. \"190-1939,1940-1976\"; last may end in now",
                [](const ExperimentConfig& c) { return json(format_boundaries(c.corpus.boundaries)); },
                [](ExperimentConfig& c, const json& v) {
                    c.corpus.boundaries = parse_boundaries(as_string("boundaries", v));
                }},
        INT_KEY("dim", "embedding dimension", training.dim, std::size_t),
        BOOL_KEY("distractor_full_loss", "distractors train on the full objective (false: prediction loss only)",
                 training.distractor_full_loss),
        INT_KEY("earliest_timeline_year", "synthesized timelines never start before this year",
                corpus.earliest_timeline_year, Year),
        REAL_KEY("eps", "AdamW epsilon", training.adamw.epsilon),
        INT_KEY("epochs", "passes over each stage's training set", training.epochs, int),
        REAL_KEY("gamma", "weight of the triplet loss", loss.gamma),
        KeySpec{"hardness_metric", "f1 | em, scores previous samples for hard-sample removal",
                [](const ExperimentConfig& c) { return json(std::string(to_string(c.replay.hardness_metric))); },
                [](ExperimentConfig& c, const json& v) {
                    const auto s = as_string("hardness_metric", v);
                    const auto m = parse_hardness_metric(s);
                    if (!m) throw ValidationError("unknown hardness_metric '" + s + "'");
                    c.replay.hardness_metric = *m;
                }},
        REAL_KEY("init_scale", "parameters start uniform in [-init_scale, init_scale]", training.init_scale),
        REAL_KEY("lr", "AdamW learning rate", training.adamw.learning_rate),
        REAL_KEY("margin", "triplet margin", loss.margin),
        INT_KEY("max_paragraphs", "paragraphs per synthesized context", corpus.max_paragraphs, int),
        REAL_KEY("mu", "fraction of hardest previous samples removed before replay", replay.mu),
        INT_KEY("n_contexts", "synthesized contexts", corpus.n_contexts, int),
        INT_KEY("n_questions", "synthesized questions over all subsets and splits", corpus.n_questions, int),
        REAL_KEY("norm_p", "order of the distance norm in the triplet loss", loss.norm_p),
        INT_KEY("now_year", "year that open-ended ranges resolve to", corpus.now_year, Year),
        INT_KEY("num_subsets", "chronological subsets K", corpus.num_subsets, int),
        REAL_KEY("nu", "fraction of eligible distractors injected", replay.nu),
        INT_KEY("oov_buckets", "hash buckets for unseen tokens", training.oov_buckets, std::size_t),
        BOOL_KEY("per_subset_hardness", "remove hard samples per previous subset instead of pooled",
                 replay.per_subset_hardness),
        REAL_KEY("retain_rate", "fraction of the non-hard previous pool replayed", replay.retain_rate),
        KeySpec{"seed", "root seed of every random stream",
                [](const ExperimentConfig& c) { return json(c.corpus.seed); },
                [](ExperimentConfig& c, const json& v) {
                    const bool ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
                    if (!ok) bad_type("seed", "a non-negative integer", v);
                    c.corpus.seed = v.get<std::uint64_t>();
                }},
        KeySpec{"split_mix", "(train, dev, test) proportions",
                [](const ExperimentConfig& c) { return json(c.corpus.split_mix); },
                [](ExperimentConfig& c, const json& v) { c.corpus.split_mix = as_mix<3>("split_mix", v); }},
        KeySpec{"type_mix", "(easy, commonsense, multi_description, multi_paragraph, unanswerable) proportions",
                [](const ExperimentConfig& c) { return json(c.corpus.type_mix); },
                [](ExperimentConfig& c, const json& v) { c.corpus.type_mix = as_mix<5>("type_mix", v); }},
        REAL_KEY("weight_decay", "AdamW decoupled weight decay", training.adamw.weight_decay),
    };
    return keys;
}

#undef REAL_KEY
#undef INT_KEY
#undef BOOL_KEY

const KeySpec* find_key(std::string_view name) {
    for (const auto& k : registry()) {
        if (name == k.name) return &k;
    }
    return nullptr;
}

}  // namespace

std::vector<ConfigKey> config_keys() {
    const ExperimentConfig defaults;
    std::vector<ConfigKey> out;
    for (const auto& k : registry()) out.push_back({k.name, k.help, k.get(defaults)});
    return out;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    json doc = json::object();
    for (const auto& k : registry()) doc[k.name] = k.get(cfg);
    return doc;
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");
    ExperimentConfig cfg;
    for (const auto& [key, value] : doc.items()) {
        const KeySpec* k = find_key(key);
        if (k == nullptr) throw ValidationError("unknown config key '" + key + "'");
        k->set(cfg, value);
    }
    cfg.validate();
    return cfg;
}

void apply_override(nlohmann::json& doc, std::string_view key, std::string_view value) {
    if (find_key(key) == nullptr) throw ValidationError("unknown config key '" + std::string(key) + "'");
    json parsed = json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = std::string(value);
    doc[std::string(key)] = std::move(parsed);
}

void apply_environment(nlohmann::json& doc) {
    const char* env = std::getenv("CHRONOQA_NOW_YEAR");
    if (env == nullptr || *env == '\0') return;
    char* end = nullptr;
    const long y = std::strtol(env, &end, 10);
    if (end == env || *end != '\0') {
        throw ValidationError("CHRONOQA_NOW_YEAR must be an integer year, got '" + std::string(env) + "'");
    }
    doc["now_year"] = y;
}

std::string canonical_config(const ExperimentConfig& cfg) { return config_to_json(cfg).dump(); }

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string config_hash(const ExperimentConfig& cfg) { return hex64(fnv1a64(canonical_config(cfg))); }

}  // namespace chronoqa
