#pragma once

#include <exception>
#include <stdexcept>
#include <string>
#include <string_view>

namespace focus {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// imaging / geometry
class MaskShapeError : public Error {
public:
    using Error::Error;
};

class BoxOutOfBoundsError : public Error {
public:
    using Error::Error;
};

/// A box that violates the min < max invariant. Degenerate boxes are never
/// in bounds, so this is reported as an out-of-bounds condition too.
class InvalidBoxError : public BoxOutOfBoundsError {
public:
    using BoxOutOfBoundsError::BoxOutOfBoundsError;
};

class MissingMaskError : public Error {
public:
    using Error::Error;
};

class SpuriousMaskError : public Error {
public:
    using Error::Error;
};

class ImageCodecError : public Error {
public:
    using Error::Error;
};

// proposals
class EmptyPromptError : public Error {
public:
    using Error::Error;
};

class EmptyLabelError : public Error {
public:
    using Error::Error;
};

class EmptyProposalError : public Error {
public:
    using Error::Error;
};

// backends
class BackendUnavailableError : public Error {
public:
    using Error::Error;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

class FixtureMissError : public Error {
public:
    using Error::Error;
};

// configuration
class ConfigError : public Error {
public:
    using Error::Error;
};

// evaluation
class CaseSetMismatchError : public Error {
public:
    using Error::Error;
};

class AnnotationParseError : public Error {
public:
    using Error::Error;
};

class AnnotationSchemaError : public Error {
public:
    using Error::Error;
};

class WorkspaceError : public Error {
public:
    using Error::Error;
};

/// Pipeline stage a failure is attributed to.
enum class Stage { Input, Segment, Isolate, Propose, Detect };

std::string_view to_string(Stage stage);

/// Wraps the error raised inside one pipeline stage. The original exception
/// stays reachable through cause() so callers can dispatch on its type.
class StageError : public Error {
public:
    StageError(Stage stage, std::exception_ptr cause, const std::string& what);

    [[nodiscard]] Stage stage() const noexcept { return stage_; }
    [[nodiscard]] std::exception_ptr cause() const noexcept { return cause_; }
    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

    [[noreturn]] void rethrow_cause() const;

private:
    Stage stage_;
    std::exception_ptr cause_;
    std::string kind_;
};

/// Short type name for an in-flight exception ("EmptyProposalError", ...).
std::string error_kind(const std::exception_ptr& error);

}  // namespace focus
