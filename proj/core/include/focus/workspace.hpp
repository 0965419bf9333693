#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace focus {

/// Directory tree that confines everything the tools write.
///
///   <root>/fixtures  <root>/results  <root>/attended
///   <root>/reports   <root>/runs     <root>/images
class Workspace {
public:
    /// Creates the tree if needed; safe to call repeatedly.
    explicit Workspace(std::filesystem::path root);

    /// $FOCUS_WORKSPACE, else ./focus-workspace.
    [[nodiscard]] static std::filesystem::path default_root();

    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
    [[nodiscard]] std::filesystem::path fixtures() const { return root_ / "fixtures"; }
    [[nodiscard]] std::filesystem::path results() const { return root_ / "results"; }
    [[nodiscard]] std::filesystem::path attended() const { return root_ / "attended"; }
    [[nodiscard]] std::filesystem::path reports() const { return root_ / "reports"; }
    [[nodiscard]] std::filesystem::path runs() const { return root_ / "runs"; }
    [[nodiscard]] std::filesystem::path images() const { return root_ / "images"; }

    /// Resolves `path` (relative paths against `base`) and throws
    /// WorkspaceError if the result escapes the root.
    [[nodiscard]] std::filesystem::path confine(const std::filesystem::path& path,
                                                const std::filesystem::path& base) const;
    [[nodiscard]] bool contains(const std::filesystem::path& path) const;

    void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) const;
    void write_text(const std::filesystem::path& path, const std::string& text) const;
    void create_directories(const std::filesystem::path& path) const;

private:
    std::filesystem::path root_;
};

}  // namespace focus
