#pragma once

#include "larx/blockops.hpp"

#include <vector>

namespace larx {

struct GroupShape {
    Index m = 1;          // proxies
    Index versions = 1;   // V_j
};

// Column layout shared by moments, solver and diagnostics.
struct Layout {
    Index n = 1;
    Index va = 0;
    std::vector<GroupShape> groups;

    Index k() const noexcept { return static_cast<Index>(groups.size()); }
    Index a_cols() const noexcept { return n * va; }
    Index x_cols() const noexcept;
    Index omega_size() const noexcept;
    Index beta_size() const noexcept;

    BlockStructure omega_structure() const;   // blocks m_j
    BlockStructure beta_structure() const;    // blocks V_j
    BlockStructure group_structure() const;   // blocks m_j V_j
    BlockStructure x_structure() const;       // one block of m_j per (j, version)
    // Offset of block (j, v) within the X columns.
    Index x_offset(Index j, Index v) const;

    bool operator==(const Layout&) const = default;
};

inline bool operator==(const GroupShape& a, const GroupShape& b)
{
    return a.m == b.m && a.versions == b.versions;
}

} // namespace larx
