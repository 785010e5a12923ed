#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bioace::core {

/// Splits running text into sentences. Implementations must preserve every
/// non-whitespace character in order.
class SentenceSegmenter {
public:
    virtual ~SentenceSegmenter() = default;
    virtual std::vector<std::string> split(std::string_view text) const = 0;
};

/// Deterministic splitter: a sentence ends at '.', '!' or '?' (optionally
/// followed by closing quotes/brackets) when the next non-space character is
/// an uppercase letter or a digit, unless the terminator closes a listed
/// abbreviation.
class RuleBasedSegmenter final : public SentenceSegmenter {
public:
    RuleBasedSegmenter();
    explicit RuleBasedSegmenter(std::vector<std::string> abbreviations);

    std::vector<std::string> split(std::string_view text) const override;

    const std::vector<std::string>& abbreviations() const { return abbreviations_; }

    static const std::vector<std::string>& default_abbreviations();

private:
    bool ends_with_abbreviation(std::string_view text, std::size_t period_pos) const;

    std::vector<std::string> abbreviations_;
};

/// Shorthand for RuleBasedSegmenter{}.split(text).
std::vector<std::string> segment_sentences(std::string_view text);

}  // namespace bioace::core
