#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace proofloop {

// Contents of data/vocabulary.txt and data/synonyms.txt, embedded at build
// time.
std::string_view builtin_vocabulary_text() noexcept;
std::string_view builtin_synonyms_text() noexcept;

// One lowercase word per line; '#' starts a comment. Throws ConfigError on an
// illegal or repeated word.
std::vector<std::string> parse_word_list(std::string_view text);

const std::vector<std::string>& default_vocabulary();

}  // namespace proofloop
