#include "focus/errors.hpp"

namespace focus {

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::Input: return "input";
        case Stage::Segment: return "segment";
        case Stage::Isolate: return "isolate";
        case Stage::Propose: return "propose";
        case Stage::Detect: return "detect";
    }
    return "unknown";
}

StageError::StageError(Stage stage, std::exception_ptr cause, const std::string& what)
    : Error(std::string(to_string(stage)) + ": " + what),
      stage_(stage),
      cause_(std::move(cause)),
      kind_(error_kind(cause_)) {}

void StageError::rethrow_cause() const {
    std::rethrow_exception(cause_);
}

std::string error_kind(const std::exception_ptr& error) {
    if (!error) {
        return "none";
    }
    try {
        std::rethrow_exception(error);
    } catch (const StageError& e) {
        return e.kind();
    } catch (const MaskShapeError&) {
        return "MaskShapeError";
    } catch (const InvalidBoxError&) {
        return "InvalidBoxError";
    } catch (const BoxOutOfBoundsError&) {
        return "BoxOutOfBoundsError";
    } catch (const MissingMaskError&) {
        return "MissingMaskError";
    } catch (const SpuriousMaskError&) {
        return "SpuriousMaskError";
    } catch (const ImageCodecError&) {
        return "ImageCodecError";
    } catch (const EmptyPromptError&) {
        return "EmptyPromptError";
    } catch (const EmptyLabelError&) {
        return "EmptyLabelError";
    } catch (const EmptyProposalError&) {
        return "EmptyProposalError";
    } catch (const BackendUnavailableError&) {
        return "BackendUnavailableError";
    } catch (const ProtocolError&) {
        return "ProtocolError";
    } catch (const FixtureMissError&) {
        return "FixtureMissError";
    } catch (const ConfigError&) {
        return "ConfigError";
    } catch (const CaseSetMismatchError&) {
        return "CaseSetMismatchError";
    } catch (const AnnotationParseError&) {
        return "AnnotationParseError";
    } catch (const AnnotationSchemaError&) {
        return "AnnotationSchemaError";
    } catch (const WorkspaceError&) {
        return "WorkspaceError";
    } catch (const Error&) {
        return "Error";
    } catch (const std::exception&) {
        return "std::exception";
    } catch (...) {
        return "unknown";
    }
}

}  // namespace focus
