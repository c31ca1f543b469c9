#include "chronoqa/corpus_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chronoqa/errors.hpp"

namespace chronoqa {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        fn(line_no, line);
    }
}

const json& require(const json& obj, const char* key, json::value_t type, const std::string& source, std::size_t line) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(source, line, std::string("missing field '") + key + "'");
    const bool ok = it->type() == type ||
                    (type == json::value_t::number_integer && it->type() == json::value_t::number_unsigned);
    if (!ok) throw ParseError(source, line, std::string("field '") + key + "' has the wrong type");
    return *it;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> keys, const std::string& source,
                    std::size_t line) {
    for (const auto& [k, _] : obj.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* allowed) { return k == allowed; })) {
            throw ParseError(source, line, "unknown field '" + k + "'");
        }
    }
}

json parse_line(std::string_view line, const std::string& source, std::size_t line_no) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(source, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(source, line_no, "expected a JSON object");
    return obj;
}

}  // namespace

std::string contexts_to_jsonl(const std::vector<Context>& contexts) {
    std::vector<const Context*> sorted;
    for (const auto& c : contexts) sorted.push_back(&c);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->context_id < b->context_id; });

    std::string out;
    for (const Context* c : sorted) {
        ordered_json obj;
        obj["context_id"] = c->context_id;
        obj["entity"] = c->entity;
        obj["paragraphs"] = c->paragraphs;
        ordered_json facts = ordered_json::array();
        for (const auto& f : c->facts) {
            ordered_json fo;
            fo["relation"] = to_string(f.relation);
            fo["value"] = f.value;
            fo["start_year"] = f.valid.start;
            fo["end_year"] = f.valid.end ? ordered_json(*f.valid.end) : ordered_json(nullptr);
            fo["paragraph_index"] = f.paragraph_index;
            fo["surface_form"] = to_string(f.surface_form);
            facts.push_back(std::move(fo));
        }
        obj["facts"] = std::move(facts);
        out += obj.dump(-1, ' ', false);
        out += '\n';
    }
    return out;
}

std::string questions_to_jsonl(const std::vector<Question>& questions) {
    std::vector<const Question*> sorted;
    for (const auto& q : questions) sorted.push_back(&q);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->question_id < b->question_id; });

    std::string out;
    for (const Question* q : sorted) {
        ordered_json obj;
        obj["question_id"] = q->question_id;
        obj["context_id"] = q->context_id;
        obj["text"] = q->text;
        obj["anchor_year"] = q->anchor_year;
        obj["qtype"] = to_string(q->qtype);
        obj["answer"] = q->answer;
        obj["subset"] = q->subset;
        obj["split"] = to_string(q->split);
        out += obj.dump(-1, ' ', false);
        out += '\n';
    }
    return out;
}

std::vector<Context> parse_contexts_jsonl(std::string_view text, const std::string& source) {
    std::vector<Context> out;
    for_each_line(text, [&](std::size_t line, std::string_view raw) {
        const json obj = parse_line(raw, source, line);
        reject_unknown(obj, {"context_id", "entity", "paragraphs", "facts"}, source, line);
        Context c;
        c.context_id = require(obj, "context_id", json::value_t::string, source, line).get<std::string>();
        c.entity = require(obj, "entity", json::value_t::string, source, line).get<std::string>();
        for (const auto& p : require(obj, "paragraphs", json::value_t::array, source, line)) {
            if (!p.is_string()) throw ParseError(source, line, "paragraphs must be strings");
            c.paragraphs.push_back(p.get<std::string>());
        }
        for (const auto& fo : require(obj, "facts", json::value_t::array, source, line)) {
            if (!fo.is_object()) throw ParseError(source, line, "facts must be objects");
            reject_unknown(fo, {"relation", "value", "start_year", "end_year", "paragraph_index", "surface_form"},
                           source, line);
            TimelineFact f;
            const auto rel = require(fo, "relation", json::value_t::string, source, line).get<std::string>();
            const auto relation = parse_relation(rel);
            if (!relation) throw ParseError(source, line, "unknown relation '" + rel + "'");
            f.relation = *relation;
            f.value = require(fo, "value", json::value_t::string, source, line).get<std::string>();
            f.valid.start = require(fo, "start_year", json::value_t::number_integer, source, line).get<int>();
            const auto end_it = fo.find("end_year");
            if (end_it == fo.end()) throw ParseError(source, line, "missing field 'end_year'");
            if (end_it->is_null()) {
                f.valid.end.reset();
            } else if (end_it->is_number_integer()) {
                f.valid.end = end_it->get<int>();
            } else {
                throw ParseError(source, line, "field 'end_year' must be an integer or null");
            }
            f.paragraph_index = require(fo, "paragraph_index", json::value_t::number_integer, source, line).get<int>();
            const auto sf = require(fo, "surface_form", json::value_t::string, source, line).get<std::string>();
            const auto surface = parse_surface_form(sf);
            if (!surface) throw ParseError(source, line, "unknown surface_form '" + sf + "'");
            f.surface_form = *surface;
            c.facts.push_back(std::move(f));
        }
        out.push_back(std::move(c));
    });
    return out;
}

std::vector<Question> parse_questions_jsonl(std::string_view text, const std::string& source) {
    std::vector<Question> out;
    for_each_line(text, [&](std::size_t line, std::string_view raw) {
        const json obj = parse_line(raw, source, line);
        reject_unknown(obj, {"question_id", "context_id", "text", "anchor_year", "qtype", "answer", "subset", "split"},
                       source, line);
        Question q;
        q.question_id = require(obj, "question_id", json::value_t::string, source, line).get<std::string>();
        q.context_id = require(obj, "context_id", json::value_t::string, source, line).get<std::string>();
        q.text = require(obj, "text", json::value_t::string, source, line).get<std::string>();
        q.anchor_year = require(obj, "anchor_year", json::value_t::number_integer, source, line).get<int>();
        const auto qt = require(obj, "qtype", json::value_t::string, source, line).get<std::string>();
        const auto qtype = parse_question_type(qt);
        if (!qtype) throw ParseError(source, line, "unknown qtype '" + qt + "'");
        q.qtype = *qtype;
        q.answer = require(obj, "answer", json::value_t::string, source, line).get<std::string>();
        q.subset = require(obj, "subset", json::value_t::number_integer, source, line).get<int>();
        const auto sp = require(obj, "split", json::value_t::string, source, line).get<std::string>();
        const auto split = parse_split(sp);
        if (!split) throw ParseError(source, line, "unknown split '" + sp + "'");
        q.split = *split;
        out.push_back(std::move(q));
    });
    return out;
}

std::vector<std::string> validate_corpus(const Corpus& corpus, const ValidationOptions& options) {
    std::vector<std::string> errors;
    auto fail = [&](const char* file, std::size_t line, const std::string& what) {
        errors.push_back(std::string(file) + ":" + std::to_string(line) + ": " + what);
    };

    std::map<std::string, std::size_t, std::less<>> context_line;
    for (std::size_t i = 0; i < corpus.contexts.size(); ++i) {
        const auto& c = corpus.contexts[i];
        const std::size_t line = i + 1;
        if (!context_line.emplace(c.context_id, line).second) fail("contexts.jsonl", line, "duplicate context_id " + c.context_id);
        if (c.paragraphs.empty()) fail("contexts.jsonl", line, "context has no paragraphs");
        for (std::size_t fi = 0; fi < c.facts.size(); ++fi) {
            const auto& f = c.facts[fi];
            const std::string where = "fact " + std::to_string(fi) + ": ";
            if (f.value.empty()) fail("contexts.jsonl", line, where + "value is empty");
            if (f.paragraph_index < 0 || static_cast<std::size_t>(f.paragraph_index) >= c.paragraphs.size()) {
                fail("contexts.jsonl", line, where + "paragraph_index out of range");
            } else if (!f.value.empty() &&
                       c.paragraphs[static_cast<std::size_t>(f.paragraph_index)].find(f.value) == std::string::npos) {
                fail("contexts.jsonl", line, where + "value '" + f.value + "' is not stated in its paragraph");
            }
            if (f.valid.start < kMinYear || f.valid.start > kMaxYear || (f.valid.end && (*f.valid.end > kMaxYear))) {
                fail("contexts.jsonl", line, where + "year out of range");
            }
            if (f.valid.end && *f.valid.end < f.valid.start) fail("contexts.jsonl", line, where + "range is reversed");
            for (std::size_t fj = 0; fj < fi; ++fj) {
                const auto& g = c.facts[fj];
                if (g.relation != f.relation) continue;
                const bool overlap = f.valid.start <= g.valid.resolved_end(options.now_year) &&
                                     g.valid.start <= f.valid.resolved_end(options.now_year);
                if (overlap) {
                    fail("contexts.jsonl", line,
                         where + "overlaps fact " + std::to_string(fj) + " of relation " + std::string(to_string(f.relation)));
                }
            }
        }
    }

    std::set<std::string, std::less<>> question_ids;
    for (std::size_t i = 0; i < corpus.questions.size(); ++i) {
        const auto& q = corpus.questions[i];
        const std::size_t line = i + 1;
        if (!question_ids.insert(q.question_id).second) fail("questions.jsonl", line, "duplicate question_id " + q.question_id);

        const auto mentions = extract_years(q.text);
        if (std::none_of(mentions.begin(), mentions.end(), [&](const YearMention& m) { return m.value == q.anchor_year; })) {
            fail("questions.jsonl", line, "anchor_year " + std::to_string(q.anchor_year) + " does not appear in the text");
        }
        if (q.qtype == QuestionType::unanswerable && !q.answer.empty()) {
            fail("questions.jsonl", line, "unanswerable question carries a non-empty answer");
        }
        if (q.qtype != QuestionType::unanswerable && q.answer.empty()) {
            fail("questions.jsonl", line, "empty answer requires qtype unanswerable");
        }
        if (q.subset < 1 || (!options.boundaries.empty() && q.subset > static_cast<int>(options.boundaries.size()))) {
            fail("questions.jsonl", line, "subset " + std::to_string(q.subset) + " out of range");
        } else if (!options.boundaries.empty() && assign_subset(q.anchor_year, options.boundaries) != q.subset) {
            fail("questions.jsonl", line, "subset does not match anchor_year " + std::to_string(q.anchor_year));
        }

        const Context* ctx = corpus.find_context(q.context_id);
        if (ctx == nullptr) {
            fail("questions.jsonl", line, "unknown context_id " + q.context_id);
            continue;
        }
        const auto relation = resolve_relation(q, *ctx);
        if (!relation) {
            if (!q.answer.empty()) fail("questions.jsonl", line, "answer '" + q.answer + "' matches no fact of the context");
            continue;
        }
        const std::string expected = answer_at(*ctx, *relation, q.anchor_year, options.now_year);
        if (expected != q.answer) {
            fail("questions.jsonl", line,
                 "answer '" + q.answer + "' differs from the covering fact value '" + expected + "' at " +
                     std::to_string(q.anchor_year));
        }
    }
    return errors;
}

Corpus ingest_corpus(const std::filesystem::path& context_path, const std::filesystem::path& question_path,
                     const ValidationOptions& options) {
    Corpus corpus;
    corpus.contexts = parse_contexts_jsonl(read_text_file(context_path), context_path.filename().string());
    corpus.questions = parse_questions_jsonl(read_text_file(question_path), question_path.filename().string());
    corpus.reindex();
    const auto errors = validate_corpus(corpus, options);
    if (!errors.empty()) {
        std::string msg = std::to_string(errors.size()) + " invariant violation(s):";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ValidationError(msg);
    }
    return corpus;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + path.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw ValidationError("short write to " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace chronoqa
