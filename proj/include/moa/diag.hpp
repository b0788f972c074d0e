#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace moa {

// Source position, 1-based. `file` is the unit path exactly as the caller
// supplied it (manifests use paths relative to the manifest dir), so report
// output stays stable no matter where the tool runs from.
struct SourceLoc {
    std::string file;
    int line = 0;
    int col = 0;

    bool valid() const { return line > 0; }
    std::string str() const {
        return file + ":" + std::to_string(line) + ":" + std::to_string(col);
    }
    friend bool operator==(const SourceLoc& a, const SourceLoc& b) {
        return a.file == b.file && a.line == b.line && a.col == b.col;
    }
    friend bool operator!=(const SourceLoc& a, const SourceLoc& b) { return !(a == b); }
    friend bool operator<(const SourceLoc& a, const SourceLoc& b) {
        if (a.file != b.file) return a.file < b.file;
        if (a.line != b.line) return a.line < b.line;
        return a.col < b.col;
    }
};

struct Diagnostic {
    SourceLoc loc;
    std::string message;

    // Rendered as "file:line:col: error: message".
    std::string str() const { return loc.str() + ": error: " + message; }
};

using DiagList = std::vector<Diagnostic>;

inline std::string render_diags(const DiagList& diags) {
    std::string out;
    for (const auto& d : diags) {
        out += d.str();
        out += '\n';
    }
    return out;
}

}  // namespace moa
