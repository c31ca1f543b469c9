#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace chronoqa {

/// Lowercase, drop ASCII punctuation, drop the articles a/an/the, collapse
/// whitespace.
std::string normalize_answer(std::string_view s);

/// 1 when the normalized strings are equal (two empty answers agree).
int exact_match(std::string_view prediction, std::string_view gold);

/// Token-overlap F1 over normalized tokens. Both empty gives 1, exactly one
/// empty gives 0.
double token_f1(std::string_view prediction, std::string_view gold);

}  // namespace chronoqa
