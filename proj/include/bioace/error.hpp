#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bioace {

enum class ErrorKind {
    // input / validation
    MalformedRecord,
    DanglingReference,
    DuplicateId,
    EmptyInput,
    KeyMismatch,
    EmptyCorpus,
    EmptyAnswer,
    EmptyNuggetList,
    EmptyDocument,
    TooFewSamples,
    DegenerateModel,
    DegenerateLabels,
    DegenerateInput,
    TooFewSystems,
    EmptyTrainSet,
    EmptyMatrix,
    ZeroVector,
    MissingGold,
    InsufficientQuestions,
    NoNegativeAvailable,
    PreconditionFailed,
    // model endpoints
    EndpointUnavailable,
    MalformedResponse,
    DimensionMismatch,
    UnparsableLabel,
    // environment
    IoError,
};

std::string_view to_string(ErrorKind kind);

/// Errors caused by bad inputs map to CLI exit code 2, endpoint failures to 3.
bool is_endpoint_failure(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

class MalformedRecordError : public Error {
public:
    MalformedRecordError(std::string file, std::size_t line, std::string field,
                         const std::string& detail);

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string file_;
    std::size_t line_;
    std::string field_;
};

class UnparsableLabelError : public Error {
public:
    UnparsableLabelError(std::string raw_output, const std::string& context = {});

    const std::string& raw_output() const noexcept { return raw_output_; }

private:
    std::string raw_output_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace bioace
