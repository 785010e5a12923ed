#include "bioace/core/segmenter.hpp"

#include <cctype>

#include "bioace/util/text.hpp"

namespace bioace::core {

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

bool starts_sentence(char c) {
    return std::isupper(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c));
}

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80;
}

}  // namespace

const std::vector<std::string>& RuleBasedSegmenter::default_abbreviations() {
    static const std::vector<std::string> list{"vs.", "e.g.", "i.e.", "Fig.", "et al.", "approx.", "No."};
    return list;
}

RuleBasedSegmenter::RuleBasedSegmenter() : abbreviations_(default_abbreviations()) {}

RuleBasedSegmenter::RuleBasedSegmenter(std::vector<std::string> abbreviations)
    : abbreviations_(std::move(abbreviations)) {}

bool RuleBasedSegmenter::ends_with_abbreviation(std::string_view text, std::size_t period_pos) const {
    const auto head = text.substr(0, period_pos + 1);
    for (const auto& abbr : abbreviations_) {
        if (abbr.size() > head.size()) continue;
        if (head.substr(head.size() - abbr.size()) != abbr) continue;
        const auto before = head.size() - abbr.size();
        if (before == 0 || !is_word_char(head[before - 1])) return true;
    }
    return false;
}

std::vector<std::string> RuleBasedSegmenter::split(std::string_view text) const {
    std::vector<std::string> out;
    auto emit = [&](std::size_t from, std::size_t to) {
        auto piece = text::trim(text.substr(from, to - from));
        if (!piece.empty()) out.emplace_back(piece);
    };

    std::size_t start = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (!is_terminator(text[i])) {
            ++i;
            continue;
        }
        const std::size_t term = i;
        std::size_t j = i + 1;
        while (j < n && is_terminator(text[j])) ++j;
        while (j < n && is_closer(text[j])) ++j;
        if (j < n && !text::is_space(text[j])) {
            i = j;
            continue;
        }
        std::size_t k = j;
        while (k < n && text::is_space(text[k])) ++k;
        const bool at_end = k == n;
        const bool abbreviation = text[term] == '.' && j == term + 1 && ends_with_abbreviation(text, term);
        if (at_end || (starts_sentence(text[k]) && !abbreviation)) {
            emit(start, j);
            start = k;
        }
        i = k;
    }
    if (start < n) emit(start, n);
    return out;
}

std::vector<std::string> segment_sentences(std::string_view text) { return RuleBasedSegmenter{}.split(text); }

}  // namespace bioace::core
