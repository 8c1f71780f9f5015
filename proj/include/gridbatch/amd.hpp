#pragma once

// =============================================================================
// gridbatch - fill-reducing pre-ordering
//
// Approximate minimum degree on the pattern of A + A^T, in the quotient-graph
// formulation: eliminating a pivot turns it into an element whose boundary
// list stands in for the clique the elimination would create. External
// degrees are maintained with the standard approximate update
//
//   d(i) <- min( n - k - 1,
//                d_old(i) + |Lp \ {i}|,
//                |A_i| + |Lp \ {i}| + sum_e |Le \ Lp| )
//
// where Lp is the boundary of the new element and e runs over the other
// elements adjacent to i. No supervariable coalescing; ties always break to
// the lowest original index, so the ordering is deterministic (a diagonal
// pattern orders as the identity).
// =============================================================================

#include <set>
#include <vector>

#include "gridbatch/core.hpp"
#include "gridbatch/sparse.hpp"

namespace gridbatch {

inline Permutation amd_order(const SparseCcs& pattern) {
    if (pattern.n_rows != pattern.n_cols) throw StructuralError("amd_order: pattern not square");
    const index_t n = pattern.n_cols;
    if (n == 0) return Permutation::identity(0);

    // Symmetrized off-diagonal adjacency of A + A^T.
    std::vector<std::set<index_t>> sym(n);
    for (index_t c = 0; c < n; ++c) {
        for (index_t r : pattern.col(c)) {
            if (r == c) continue;
            sym[c].insert(r);
            sym[r].insert(c);
        }
    }

    std::vector<std::vector<index_t>> node_adj(n);   // A_i: plain graph edges left
    std::vector<std::vector<index_t>> elem_adj(n);   // E_i: adjacent elements
    std::vector<std::vector<index_t>> boundary(n);   // Le for element e (pivot id)
    std::vector<index_t> degree(n);
    std::vector<bool> eliminated(n, false);
    std::vector<bool> is_element(n, false);

    for (index_t i = 0; i < n; ++i) {
        node_adj[i].assign(sym[i].begin(), sym[i].end());
        degree[i] = static_cast<index_t>(node_adj[i].size());
    }
    sym.clear();

    std::set<std::pair<index_t, index_t>> heap;  // (degree, node), lowest index wins ties
    for (index_t i = 0; i < n; ++i) heap.emplace(degree[i], i);

    std::vector<index_t> stamp(n, 0), wlen(n, 0);
    index_t stamp_gen = 0;
    std::vector<index_t> fwd(n);
    std::vector<index_t> lp;  // boundary of the pivot being eliminated

    auto compact_boundary = [&](index_t e) {
        auto& le = boundary[e];
        size_t keep = 0;
        for (index_t v : le)
            if (!eliminated[v]) le[keep++] = v;
        le.resize(keep);
    };

    for (index_t k = 0; k < n; ++k) {
        const auto [dmin, p] = *heap.begin();
        heap.erase(heap.begin());
        (void)dmin;
        eliminated[p] = true;
        fwd[p] = k;

        // Lp = (A_p  U  union of adjacent element boundaries) \ {p}, alive only.
        ++stamp_gen;
        lp.clear();
        stamp[p] = stamp_gen;
        for (index_t v : node_adj[p]) {
            if (eliminated[v] || stamp[v] == stamp_gen) continue;
            stamp[v] = stamp_gen;
            lp.push_back(v);
        }
        for (index_t e : elem_adj[p]) {
            if (!is_element[e]) continue;  // absorbed earlier
            for (index_t v : boundary[e]) {
                if (eliminated[v] || stamp[v] == stamp_gen) continue;
                stamp[v] = stamp_gen;
                lp.push_back(v);
            }
            is_element[e] = false;  // absorbed into the new element p
            boundary[e].clear();
        }
        std::sort(lp.begin(), lp.end());

        // First sweep: w(e) = |Le \ Lp| for every element adjacent to Lp.
        // stamp marks Lp membership; wlen[e] counts via decrements.
        for (index_t i : lp) {
            for (index_t e : elem_adj[i]) {
                if (!is_element[e]) continue;
                if (stamp[e] != stamp_gen) {
                    stamp[e] = stamp_gen;
                    compact_boundary(e);
                    wlen[e] = static_cast<index_t>(boundary[e].size());
                }
                --wlen[e];
            }
        }

        // Second sweep: prune covered edges/absorbed elements, update degrees.
        const index_t alive_after = n - k - 1;
        const index_t lp_minus_one = static_cast<index_t>(lp.size()) - 1;
        for (index_t i : lp) {
            auto& ai = node_adj[i];
            size_t keep = 0;
            for (index_t v : ai) {
                // drop p, eliminated nodes, and anything now covered by Lp
                if (v == p || eliminated[v]) continue;
                if (stamp[v] == stamp_gen) continue;
                ai[keep++] = v;
            }
            ai.resize(keep);

            auto& ei = elem_adj[i];
            index_t elem_sum = 0;
            size_t ekeep = 0;
            for (index_t e : ei) {
                if (!is_element[e]) continue;
                ei[ekeep++] = e;
                elem_sum += wlen[e] > 0 ? wlen[e] : 0;
            }
            ei.resize(ekeep);
            ei.push_back(p);

            const index_t bound_external =
                static_cast<index_t>(ai.size()) + lp_minus_one + elem_sum;
            const index_t bound_growth = degree[i] + lp_minus_one;
            index_t d = std::min({alive_after, bound_growth, bound_external});
            if (d < 0) d = 0;
            heap.erase({degree[i], i});
            degree[i] = d;
            heap.emplace(d, i);
        }

        node_adj[p].clear();
        elem_adj[p].clear();
        is_element[p] = true;
        boundary[p] = lp;
    }

    return Permutation::from_forward(std::move(fwd));
}

}  // namespace gridbatch
