#include "bioace/gateway/labels.hpp"

#include <array>

#include "bioace/util/text.hpp"

namespace bioace::gateway {

namespace {

constexpr std::string_view kStripAscii = "\"'`.,;:!?*()[]{}<>";
// UTF-8 curly quotes.
constexpr std::array<std::string_view, 4> kStripUtf8{"\xE2\x80\x98", "\xE2\x80\x99", "\xE2\x80\x9C",
                                                     "\xE2\x80\x9D"};

bool strip_one(std::string_view& s) {
    if (s.empty()) return false;
    if (text::is_space(s.front()) || kStripAscii.find(s.front()) != std::string_view::npos) {
        s.remove_prefix(1);
        return true;
    }
    if (text::is_space(s.back()) || kStripAscii.find(s.back()) != std::string_view::npos) {
        s.remove_suffix(1);
        return true;
    }
    for (auto q : kStripUtf8) {
        if (s.starts_with(q)) {
            s.remove_prefix(q.size());
            return true;
        }
        if (s.ends_with(q)) {
            s.remove_suffix(q.size());
            return true;
        }
    }
    return false;
}

}  // namespace

std::string normalize_label(std::string_view raw) {
    std::string_view s = raw;
    while (strip_one(s)) {
    }
    std::string out;
    bool gap = false;
    for (char c : text::to_lower(s)) {
        if (text::is_space(c) || c == '_') {
            gap = true;
            continue;
        }
        if (gap && !out.empty()) out.push_back(' ');
        gap = false;
        out.push_back(c);
    }
    return out;
}

LabelSet::LabelSet(std::initializer_list<Label> labels) : labels_(labels) {}
LabelSet::LabelSet(std::vector<Label> labels) : labels_(std::move(labels)) {}

std::optional<std::string> LabelSet::match(std::string_view raw) const {
    const auto norm = normalize_label(raw);
    if (norm.empty()) return std::nullopt;
    for (const auto& label : labels_) {
        if (normalize_label(label.name) == norm) return label.name;
        for (const auto& alias : label.aliases) {
            if (normalize_label(alias) == norm) return label.name;
        }
    }
    return std::nullopt;
}

std::string LabelSet::listing() const {
    std::string out;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (i) out += (i + 1 == labels_.size()) ? (labels_.size() > 2 ? ", or " : " or ") : ", ";
        out += labels_[i].name;
    }
    return out;
}

}  // namespace bioace::gateway
