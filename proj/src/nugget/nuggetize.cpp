#include "bioace/nugget/nuggetize.hpp"

#include <cctype>

#include "bioace/error.hpp"
#include "bioace/util/text.hpp"

namespace bioace::nugget {

namespace {

constexpr std::string_view kPromptHead =
    "List all of the information nuggets in the text given below. Each nugget must contain one, and only one, "
    "fact from the text. A nugget must be as concise and as specific as possible. Each element in a list must be "
    "its own nugget. The list of nuggets must not contain redundant information. Return a list of nuggets such "
    "that each nugget is on a new line. Do not number or bullet the list. Do not include anything in your "
    "response except for the list of nuggets. Here is an example of the output format:\n"
    "\n"
    "nugget1\n"
    "nugget2\n"
    "…\n"
    "\n"
    "Here is an example text: During infections, a battle for iron takes place between the human host and the "
    "invading pathogens. Lymphocytes need iron to mount an effective cellular and humoral response. Viruses "
    "depend on iron to replicate within living host cells. During the acute phase of infection, blood levels of "
    "iron decrease. Ferritin levels are high. Elevated serum ferritin is associated with increased mortality. As "
    "a major iron storage protein, ferritin is essential to iron homeostasis and is involved in a wide range of "
    "physiologic and pathologic processes. The inflammation cascade and poor prognosis of COVID-19 may be "
    "attributed to high ferritin levels. Iron depletion therapy was proposed as a novel therapeutic approach in "
    "the COVID-19 pandemic.\n"
    "\n"
    "This is the list of nuggets that should be extracted from this text:\n"
    "\n"
    "Lymphocytes and viruses compete for iron.\n"
    "Lymphocytes need iron for cellular response.\n"
    "Lymphocytes need iron for humoral response.\n"
    "Viruses need iron to replicate.\n"
    "Infection lowers iron levels in the blood.\n"
    "Infection increases ferritin levels in the blood.\n"
    "High ferritin is associated with increased mortality.\n"
    "Iron homeostasis needs ferritin.\n"
    "Ferritin is involved in physiologic processes.\n"
    "Ferritin is involved in pathologic processes.\n"
    "High ferritin indicates response to inflammation.\n"
    "High ferritin levels are linked to poor outcomes of COVID-19.\n"
    "Iron depletion therapy showed anti-viral activity in the COVID-19 pandemic.\n"
    "Iron depletion therapy showed anti-fibrotic activity in the COVID-19 pandemic.\n"
    "\n"
    "Text: ";

/// Removes one leading bullet ("-", "*", "+", U+2022, U+2013) or enumeration
/// ("1.", "1)", "(1)") when it is followed by whitespace.
std::string_view strip_list_marker(std::string_view s) {
    std::size_t i = 0;
    if (s.starts_with("\xE2\x80\xA2") || s.starts_with("\xE2\x80\x93")) {
        i = 3;
    } else if (!s.empty() && (s[0] == '-' || s[0] == '*' || s[0] == '+')) {
        i = 1;
    } else {
        std::size_t j = 0;
        const bool paren = !s.empty() && s[0] == '(';
        if (paren) ++j;
        const std::size_t digits = j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == digits || j >= s.size()) return s;
        if (s[j] == ')' || (!paren && s[j] == '.')) {
            i = j + 1;
        } else {
            return s;
        }
    }
    if (i >= s.size() || !text::is_space(s[i])) return s;
    return text::trim(s.substr(i));
}

}  // namespace

std::string nugget_generation_prompt(std::string_view text) {
    std::string prompt(kPromptHead);
    prompt += text;
    return prompt;
}

std::vector<std::string> parse_nugget_list(std::string_view response) {
    std::vector<std::string> out;
    for (const auto& line : text::split_lines(response)) {
        auto item = strip_list_marker(text::trim(line));
        if (!item.empty()) out.emplace_back(item);
    }
    return out;
}

std::vector<std::string> extract_nugget_texts(std::string_view text, gateway::ModelGateway& gateway,
                                              const gateway::EndpointConfig& endpoint) {
    if (text::is_blank(text)) fail(ErrorKind::EmptyInput, "cannot extract nuggets from empty text");
    auto nuggets = parse_nugget_list(gateway.generate_text(nugget_generation_prompt(text), endpoint));
    if (nuggets.empty()) fail(ErrorKind::EmptyNuggetList, "model returned no nuggets");
    return nuggets;
}

std::vector<core::Nugget> extract_nuggets(std::string_view text, gateway::ModelGateway& gateway,
                                          const gateway::EndpointConfig& endpoint, const std::string& question_id,
                                          const std::string& system_id) {
    std::vector<core::Nugget> out;
    for (auto& t : extract_nugget_texts(text, gateway, endpoint)) {
        core::Nugget n;
        n.text = std::move(t);
        n.origin = core::NuggetOrigin::system;
        n.question_id = question_id;
        n.system_id = system_id;
        out.push_back(std::move(n));
    }
    return out;
}

}  // namespace bioace::nugget
