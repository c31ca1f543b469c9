#pragma once

// JSON-lines persistence for contexts and questions.
//
//   contexts.jsonl  {"context_id", "entity", "paragraphs": [str],
//                    "facts": [{"relation", "value", "start_year", "end_year" (int|null),
//                               "paragraph_index", "surface_form"}]}
//   questions.jsonl {"question_id", "context_id", "text", "anchor_year", "qtype",
//                    "answer", "subset", "split"}
//
// UTF-8, LF line endings, one object per line, rows sorted by id.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chronoqa/corpus.hpp"

namespace chronoqa {

std::string contexts_to_jsonl(const std::vector<Context>& contexts);
std::string questions_to_jsonl(const std::vector<Question>& questions);

/// Parse without invariant checks. Schema violations throw ParseError with
/// the 1-based line number; `source` names the input in messages.
std::vector<Context> parse_contexts_jsonl(std::string_view text, const std::string& source = "contexts.jsonl");
std::vector<Question> parse_questions_jsonl(std::string_view text, const std::string& source = "questions.jsonl");

struct ValidationOptions {
    Year now_year = 2023;
    /// When non-empty, each question's subset must match its anchor year.
    std::vector<TimeRange> boundaries;
};

/// Every invariant violation found, each prefixed with its file and line.
std::vector<std::string> validate_corpus(const Corpus& corpus, const ValidationOptions& options = {});

/// Read, parse and validate. Throws ParseError on schema problems and
/// ValidationError listing all failed invariants otherwise.
Corpus ingest_corpus(const std::filesystem::path& context_path, const std::filesystem::path& question_path,
                     const ValidationOptions& options = {});

std::string read_text_file(const std::filesystem::path& path);
/// Writes atomically (temp file + rename) with LF line endings untouched.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace chronoqa
