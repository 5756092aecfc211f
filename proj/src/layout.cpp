#include "larx/layout.hpp"

namespace larx {

Index Layout::x_cols() const noexcept
{
    Index t = 0;
    for (const auto& g : groups)
        t += g.m * g.versions;
    return t;
}

Index Layout::omega_size() const noexcept
{
    Index t = 0;
    for (const auto& g : groups)
        t += g.m;
    return t;
}

Index Layout::beta_size() const noexcept
{
    Index t = 0;
    for (const auto& g : groups)
        t += g.versions;
    return t;
}

BlockStructure Layout::omega_structure() const
{
    std::vector<Index> s;
    for (const auto& g : groups)
        s.push_back(g.m);
    return BlockStructure(std::move(s));
}

BlockStructure Layout::beta_structure() const
{
    std::vector<Index> s;
    for (const auto& g : groups)
        s.push_back(g.versions);
    return BlockStructure(std::move(s));
}

BlockStructure Layout::group_structure() const
{
    std::vector<Index> s;
    for (const auto& g : groups)
        s.push_back(g.m * g.versions);
    return BlockStructure(std::move(s));
}

BlockStructure Layout::x_structure() const
{
    std::vector<Index> s;
    for (const auto& g : groups)
        for (Index v = 0; v < g.versions; ++v)
            s.push_back(g.m);
    return BlockStructure(std::move(s));
}

Index Layout::x_offset(Index j, Index v) const
{
    Index off = 0;
    for (Index i = 0; i < j; ++i)
        off += groups[static_cast<std::size_t>(i)].m * groups[static_cast<std::size_t>(i)].versions;
    return off + v * groups[static_cast<std::size_t>(j)].m;
}

} // namespace larx
