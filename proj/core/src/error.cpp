#include "gazescreen/error.hpp"

namespace gazescreen {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
        case ErrorCode::EmptyRecording: return "EmptyRecording";
        case ErrorCode::InvalidMetadata: return "InvalidMetadata";
        case ErrorCode::InvalidGeometry: return "InvalidGeometry";
        case ErrorCode::EmptyPointSet: return "EmptyPointSet";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::ImageIo: return "ImageIo";
        case ErrorCode::UnlabeledImage: return "UnlabeledImage";
        case ErrorCode::DuplicateImageId: return "DuplicateImageId";
        case ErrorCode::ClassTooSmall: return "ClassTooSmall";
        case ErrorCode::EmptyResult: return "EmptyResult";
        case ErrorCode::UnsupportedDepth: return "UnsupportedDepth";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::MissingTensor: return "MissingTensor";
        case ErrorCode::EmptyTrainSet: return "EmptyTrainSet";
        case ErrorCode::DivergedLoss: return "DivergedLoss";
        case ErrorCode::CorruptFile: return "CorruptFile";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::EmptyTestSet: return "EmptyTestSet";
        case ErrorCode::EmptyMatrix: return "EmptyMatrix";
        case ErrorCode::InvalidProfile: return "InvalidProfile";
        case ErrorCode::UnknownSubcommand: return "UnknownSubcommand";
    }
    return "Unknown";
}

}  // namespace gazescreen
