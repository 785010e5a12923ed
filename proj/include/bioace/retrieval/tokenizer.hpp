#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bioace::retrieval {

/// Lowercases, splits on non-alphanumeric bytes and drops tokens shorter than
/// two characters. No stemming, no stopwords. Bytes >= 0x80 count as
/// alphanumeric so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace bioace::retrieval
