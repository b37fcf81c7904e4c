#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "family.hpp"

namespace fdelab {

/// One member of a Vitali family: core U(x, r), its dilation U(x, 2 c1 r), and the size key r.
struct VitaliItem {
    Cylinder core;
    Cylinder dilated;
    double key = 0.0;
};

/// Greedy selection by key descending, input index ascending; a core is kept if it misses every kept core.
inline std::vector<std::size_t> vitali_select(const std::vector<VitaliItem>& items, int n) {
    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return items[a].key > items[b].key; });
    std::vector<std::size_t> kept;
    for (std::size_t i : order) {
        bool free = true;
        for (std::size_t k : kept)
            if (items[k].core.intersects(items[i].core, n)) {
                free = false;
                break;
            }
        if (free) kept.push_back(i);
    }
    return kept;
}

struct VitaliCheck {
    bool disjoint = true;
    std::size_t uncovered_nodes = 0;   ///< nodes of some input core outside every kept dilation
    double union_measure = 0.0;        ///< node-wise measure of the union of input cores
    double kept_core_measure = 0.0;    ///< sum of |U_i| over kept cores
    double constant = 0.0;             ///< union_measure / kept_core_measure
    double max_dilation_ratio = 0.0;   ///< max |U~_i| / |U_i|
};

/// Node-wise verification: each node carries the measure of its space-time control volume.
inline VitaliCheck vitali_verify(const SpaceTimeGrid& g, const std::vector<VitaliItem>& items,
                                 const std::vector<std::size_t>& kept) {
    const int n = g.dim();
    VitaliCheck c;
    for (std::size_t a = 0; a < kept.size(); ++a)
        for (std::size_t b = a + 1; b < kept.size(); ++b)
            if (items[kept[a]].core.intersects(items[kept[b]].core, n)) c.disjoint = false;
    std::vector<char> covered(g.size(), 0), in_union(g.size(), 0);
    for (std::size_t k : kept) {
        for_each_node_inside(g, items[k].dilated, [&](std::size_t i) { covered[i] = 1; });
        c.kept_core_measure += items[k].core.measure(n);
        c.max_dilation_ratio = std::max(c.max_dilation_ratio, items[k].dilated.measure(n) / items[k].core.measure(n));
    }
    for (const auto& it : items) for_each_node_inside(g, it.core, [&](std::size_t i) { in_union[i] = 1; });
    const std::size_t S = g.space_size();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!in_union[i]) continue;
        c.union_measure += g.cell_volume(i % S) * g.time_cell_length(i / S);
        if (!covered[i]) ++c.uncovered_nodes;
    }
    c.constant = c.kept_core_measure > 0.0 ? c.union_measure / c.kept_core_measure : 0.0;
    return c;
}

}  // namespace fdelab
