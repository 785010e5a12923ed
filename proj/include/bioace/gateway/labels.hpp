#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bioace::gateway {

/// A closed label vocabulary. Each label may list exact-form aliases
/// ("supporting" for "support"); matching never uses substrings.
class LabelSet {
public:
    struct Label {
        std::string name;
        std::vector<std::string> aliases;
    };

    LabelSet(std::initializer_list<Label> labels);
    explicit LabelSet(std::vector<Label> labels);

    const std::vector<Label>& labels() const { return labels_; }
    bool empty() const { return labels_.empty(); }

    /// Canonical label name for a raw model output, or nullopt.
    std::optional<std::string> match(std::string_view raw) const;

    /// "a, b, or c" listing of canonical names.
    std::string listing() const;

private:
    std::vector<Label> labels_;
};

/// Trim, case-fold, strip surrounding quotes and punctuation, collapse runs of
/// whitespace and underscores to one space.
std::string normalize_label(std::string_view raw);

}  // namespace bioace::gateway
