#include "focus/workspace.hpp"

#include "focus/errors.hpp"
#include "focus/image_io.hpp"

#include <algorithm>
#include <cstdlib>

namespace focus {

namespace fs = std::filesystem;

Workspace::Workspace(fs::path root) {
    try {
        fs::create_directories(root);
        root_ = fs::weakly_canonical(fs::absolute(root));
        for (const char* sub : {"fixtures", "results", "attended", "reports", "runs", "images"}) {
            fs::create_directories(root_ / sub);
        }
    } catch (const fs::filesystem_error& e) {
        throw WorkspaceError(std::string("cannot prepare workspace: ") + e.what());
    }
}

fs::path Workspace::default_root() {
    if (const char* env = std::getenv("FOCUS_WORKSPACE"); env != nullptr && *env != '\0') {
        return env;
    }
    return fs::current_path() / "focus-workspace";
}

bool Workspace::contains(const fs::path& path) const {
    const auto canon = fs::weakly_canonical(fs::absolute(path));
    auto [root_end, _] = std::mismatch(root_.begin(), root_.end(), canon.begin(), canon.end());
    return root_end == root_.end();
}

fs::path Workspace::confine(const fs::path& path, const fs::path& base) const {
    const auto candidate = path.is_absolute() ? path : base / path;
    const auto canon = fs::weakly_canonical(fs::absolute(candidate));
    if (!contains(canon)) {
        throw WorkspaceError(path.string() + " lies outside workspace " + root_.string());
    }
    return canon;
}

void Workspace::write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) const {
    const auto target = confine(path, root_);
    try {
        write_file_bytes(target, bytes);
    } catch (const std::exception& e) {
        throw WorkspaceError(e.what());
    }
}

void Workspace::write_text(const fs::path& path, const std::string& text) const {
    write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void Workspace::create_directories(const fs::path& path) const {
    const auto target = confine(path, root_);
    try {
        fs::create_directories(target);
    } catch (const fs::filesystem_error& e) {
        throw WorkspaceError(e.what());
    }
}

}  // namespace focus
