#include "bioace/completeness/completeness.hpp"

#include <algorithm>

#include "bioace/error.hpp"
#include "bioace/util/parallel.hpp"

namespace bioace::completeness {

std::string completeness_prompt(std::string_view question, std::string_view answer_sentence) {
    std::string p =
        "You are an expert annotator. Given a question and an answer sentence, your task is to assign a single "
        "label from the following list: ['Required', 'Unnecessary', 'Borderline', 'Inappropriate']. The label "
        "definitions are as follows:\n"
        "Required: The answer sentence is necessary to have in the generated answer for completeness of the "
        "answers.\n"
        "Unnecessary: The answer sentence is not required to be included in the generated answer. An answer "
        "sentence may be unnecessary for several reasons:\n"
        "1. If including it would cause information overload, if it is added to the answer;\n"
        "2. If it is trivial, e.g., stating that many treatment options exist.\n"
        "3. If it consists entirely of a recommendation to see a health professional.\n"
        "4. If it is not relevant to the answer, e.g., describing the causes of a disease when the question is "
        "about treatments,\n"
        "Borderline: If an answer sentence is relevant, possibly even “good to know,” but not required, the "
        "answer sentence may be marked borderline.\n"
        "Inappropriate: The assertion may harm the patient, e.g., if, according to the answer, physical therapy "
        "reduces the pain level, but the patient experiences more pain due to hip mobilization, the patient may "
        "start doubting they are receiving adequate treatment.\n"
        "Do not generate anything else.\n"
        "Respond ONLY with the label, no explanation.\n"
        "Question : ";
    p += question;
    p += "\nAnswer Sentence: ";
    p += answer_sentence;
    return p;
}

const gateway::LabelSet& relevance_labels() {
    static const gateway::LabelSet labels{
        {"Required", {}}, {"Unnecessary", {}}, {"Borderline", {}}, {"Inappropriate", {}}};
    return labels;
}

core::RelevanceLabel label_sentence(const core::Question& question, const core::AnswerSentence& sentence,
                                    gateway::ModelGateway& gateway, const gateway::EndpointConfig& endpoint) {
    try {
        const auto raw = gateway.generate_label(completeness_prompt(question.text, sentence.text), relevance_labels(),
                                                endpoint);
        return *core::parse_relevance(raw);
    } catch (const UnparsableLabelError& e) {
        throw UnparsableLabelError(e.raw_output(), "sentence " + sentence.id);
    }
}

RelevanceMetrics compute_relevance_metrics(const std::vector<core::RelevanceLabel>& labels) {
    if (labels.empty()) fail(ErrorKind::EmptyAnswer, "no sentences to aggregate");
    RelevanceMetrics m;
    for (auto l : labels) ++m.counts[static_cast<std::size_t>(l)];
    const auto n = static_cast<double>(labels.size());
    const auto count = [&](core::RelevanceLabel l) { return static_cast<double>(m.counts[static_cast<std::size_t>(l)]); };
    m.completeness = count(core::RelevanceLabel::Required) / n;
    m.redundancy = count(core::RelevanceLabel::Unnecessary) / n;
    m.harmfulness = count(core::RelevanceLabel::Inappropriate) / n;
    return m;
}

CompletenessReport evaluate_answer(const core::Question& question, const core::Answer& answer,
                                   gateway::ModelGateway& gateway, const gateway::EndpointConfig& endpoint,
                                   std::size_t workers) {
    if (answer.sentences.empty()) fail(ErrorKind::EmptyAnswer, "answer of " + answer.system_id + " is empty");
    std::vector<core::RelevanceLabel> labels(answer.sentences.size());
    parallel_for_index(labels.size(), workers, [&](std::size_t i) {
        labels[i] = label_sentence(question, answer.sentences[i], gateway, endpoint);
    });
    CompletenessReport report{question.id, answer.system_id, {}, compute_relevance_metrics(labels)};
    for (std::size_t i = 0; i < labels.size(); ++i) report.per_sentence[answer.sentences[i].id] = labels[i];
    return report;
}

stats::ConfusionMatrix relevance_confusion(const std::map<std::string, core::RelevanceLabel>& predicted,
                                           const std::map<std::string, core::RelevanceLabel>& gold) {
    if (predicted.size() != gold.size() ||
        !std::equal(predicted.begin(), predicted.end(), gold.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
        fail(ErrorKind::KeyMismatch, "predicted and gold labels cover different sentences");
    }
    std::vector<std::string> classes;
    for (std::size_t i = 0; i < core::kRelevanceLabelCount; ++i)
        classes.emplace_back(core::to_string(static_cast<core::RelevanceLabel>(i)));
    stats::ConfusionMatrix cm(classes);
    for (const auto& [id, label] : gold) cm.add(std::string(core::to_string(label)), std::string(core::to_string(predicted.at(id))));
    return cm;
}

stats::Prf evaluate_labels_vs_gold(const std::map<std::string, core::RelevanceLabel>& predicted,
                                   const std::map<std::string, core::RelevanceLabel>& gold) {
    return stats::prf(relevance_confusion(predicted, gold), stats::Averaging::weighted);
}

}  // namespace bioace::completeness
