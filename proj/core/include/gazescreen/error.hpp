#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gazescreen {

enum class ErrorCode {
    // gaze_io
    MalformedHeader,
    MalformedRow,
    NonMonotonicTimestamp,
    EmptyRecording,
    InvalidMetadata,
    // geometry
    InvalidGeometry,
    EmptyPointSet,
    // events
    InvalidParams,
    // render / augment
    InvalidConfig,
    InvalidParameter,
    ImageIo,
    // dataset
    UnlabeledImage,
    DuplicateImageId,
    ClassTooSmall,
    EmptyResult,
    // model
    UnsupportedDepth,
    ShapeMismatch,
    MissingTensor,
    EmptyTrainSet,
    DivergedLoss,
    CorruptFile,
    VersionMismatch,
    // eval
    EmptyTestSet,
    EmptyMatrix,
    // simulate
    InvalidProfile,
    // cli
    UnknownSubcommand,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace gazescreen
