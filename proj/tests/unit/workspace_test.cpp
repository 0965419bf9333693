#include "focus/errors.hpp"
#include "focus/image_io.hpp"
#include "focus/workspace.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

namespace focus {
namespace {

namespace fs = std::filesystem;

TEST(Workspace, CreatesTree) {
    testing::TempDir dir;
    const Workspace ws(dir / "ws");
    for (const auto& sub : {ws.fixtures(), ws.results(), ws.attended(), ws.reports(), ws.runs(), ws.images()}) {
        EXPECT_TRUE(fs::is_directory(sub)) << sub;
    }
    const Workspace again(dir / "ws");
    EXPECT_EQ(again.root(), ws.root());
}

TEST(Workspace, ConfinesWrites) {
    testing::TempDir dir;
    const Workspace ws(dir / "ws");
    ws.write_text("results/a.txt", "hi");
    EXPECT_EQ(read_file_text(ws.results() / "a.txt"), "hi");
    ws.write_text(ws.reports() / "x" / "b.txt", "deep");
    EXPECT_TRUE(fs::exists(ws.reports() / "x" / "b.txt"));
    EXPECT_THROW(ws.write_text("../escape.txt", "no"), WorkspaceError);
    EXPECT_THROW(ws.write_text(dir / "outside.txt", "no"), WorkspaceError);
    EXPECT_THROW(ws.create_directories("results/../../x"), WorkspaceError);
    EXPECT_FALSE(fs::exists(dir / "escape.txt"));
    EXPECT_TRUE(ws.contains(ws.root() / "a" / ".." / "b"));
    EXPECT_FALSE(ws.contains(dir / "ws2"));  // sibling sharing a name prefix
}

TEST(Workspace, DefaultRootFromEnvironment) {
    ::setenv("FOCUS_WORKSPACE", "/tmp/somewhere", 1);
    EXPECT_EQ(Workspace::default_root(), fs::path("/tmp/somewhere"));
    ::unsetenv("FOCUS_WORKSPACE");
    EXPECT_EQ(Workspace::default_root(), fs::current_path() / "focus-workspace");
}

}  // namespace
}  // namespace focus
