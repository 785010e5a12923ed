#include "bioace/error.hpp"

namespace bioace {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::KeyMismatch: return "KeyMismatch";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::EmptyAnswer: return "EmptyAnswer";
    case ErrorKind::EmptyNuggetList: return "EmptyNuggetList";
    case ErrorKind::EmptyDocument: return "EmptyDocument";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::DegenerateModel: return "DegenerateModel";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::TooFewSystems: return "TooFewSystems";
    case ErrorKind::EmptyTrainSet: return "EmptyTrainSet";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::MissingGold: return "MissingGold";
    case ErrorKind::InsufficientQuestions: return "InsufficientQuestions";
    case ErrorKind::NoNegativeAvailable: return "NoNegativeAvailable";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::EndpointUnavailable: return "EndpointUnavailable";
    case ErrorKind::MalformedResponse: return "MalformedResponse";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnparsableLabel: return "UnparsableLabel";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_endpoint_failure(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::EndpointUnavailable:
    case ErrorKind::MalformedResponse:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::UnparsableLabel:
        return true;
    default:
        return false;
    }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

MalformedRecordError::MalformedRecordError(std::string file, std::size_t line, std::string field,
                                           const std::string& detail)
    : Error(ErrorKind::MalformedRecord,
            file + ":" + std::to_string(line) + ": field '" + field + "': " + detail),
      file_(std::move(file)),
      line_(line),
      field_(std::move(field)) {}

UnparsableLabelError::UnparsableLabelError(std::string raw_output, const std::string& context)
    : Error(ErrorKind::UnparsableLabel,
            (context.empty() ? std::string() : context + ": ") + "raw output \"" + raw_output + "\""),
      raw_output_(std::move(raw_output)) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace bioace
