#pragma once

// =============================================================================
// gridbatch - compressed sparse patterns, permutations and static scatter
// lookups. Patterns are built once, shared read-only by every task, and never
// carry per-task values; those live in BatchTape.
// =============================================================================

#include <algorithm>
#include <span>
#include <utility>
#include <vector>

#include "gridbatch/core.hpp"

namespace gridbatch {

// -----------------------------------------------------------------------------
// SparseCrs / SparseCcs
//
// Row-compressed and column-compressed patterns with an extra diag_ptr array:
// diag_ptr[r] is the slot of the structural diagonal inside row r (resp.
// column c). The diagonal is always structurally present, even when its value
// is zero; construction inserts it if missing.
// -----------------------------------------------------------------------------

struct SparseCrs {
    index_t n_rows = 0;
    index_t n_cols = 0;
    std::vector<index_t> row_ptr;   // length n_rows+1
    std::vector<index_t> col_ix;    // length nnz, strictly increasing per row
    std::vector<index_t> diag_ptr;  // length n_rows (square patterns)
    std::vector<real_t> values;     // empty for pattern-only matrices

    index_t nnz() const { return row_ptr.empty() ? 0 : row_ptr.back(); }

    std::span<const index_t> row(index_t r) const {
        return {col_ix.data() + row_ptr[r], static_cast<size_t>(row_ptr[r + 1] - row_ptr[r])};
    }

    /// Slot of (r, c), or kDropped if structurally absent.
    index_t find(index_t r, index_t c) const {
        const auto* first = col_ix.data() + row_ptr[r];
        const auto* last = col_ix.data() + row_ptr[r + 1];
        const auto* it = std::lower_bound(first, last, c);
        if (it == last || *it != c) return kDropped;
        return static_cast<index_t>(it - col_ix.data());
    }
};

struct SparseCcs {
    index_t n_rows = 0;
    index_t n_cols = 0;
    std::vector<index_t> col_ptr;   // length n_cols+1
    std::vector<index_t> row_ix;    // length nnz, strictly increasing per column
    std::vector<index_t> diag_ptr;  // length n_cols (square patterns)

    index_t nnz() const { return col_ptr.empty() ? 0 : col_ptr.back(); }

    std::span<const index_t> col(index_t c) const {
        return {row_ix.data() + col_ptr[c], static_cast<size_t>(col_ptr[c + 1] - col_ptr[c])};
    }

    index_t find(index_t c, index_t r) const {
        const auto* first = row_ix.data() + col_ptr[c];
        const auto* last = row_ix.data() + col_ptr[c + 1];
        const auto* it = std::lower_bound(first, last, r);
        if (it == last || *it != r) return kDropped;
        return static_cast<index_t>(it - row_ix.data());
    }
};

// -----------------------------------------------------------------------------
// Permutation: forward[old] = new, inverse[new] = old. Both bijections.
// -----------------------------------------------------------------------------

struct Permutation {
    std::vector<index_t> forward;
    std::vector<index_t> inverse;

    static Permutation identity(index_t n) {
        Permutation p;
        p.forward.resize(n);
        p.inverse.resize(n);
        for (index_t i = 0; i < n; ++i) p.forward[i] = p.inverse[i] = i;
        return p;
    }

    static Permutation from_forward(std::vector<index_t> fwd) {
        Permutation p;
        const auto n = static_cast<index_t>(fwd.size());
        p.inverse.assign(n, kDropped);
        for (index_t old = 0; old < n; ++old) {
            const index_t nu = fwd[old];
            if (nu < 0 || nu >= n || p.inverse[nu] != kDropped)
                throw StructuralError("permutation is not a bijection");
            p.inverse[nu] = old;
        }
        p.forward = std::move(fwd);
        return p;
    }

    index_t size() const { return static_cast<index_t>(forward.size()); }
};

// -----------------------------------------------------------------------------
// ScatterLookup: one static index map from the slots of a source CRS pattern
// into the slots of a (permuted, filtered) CCS target. Entries removed by the
// row/column filters map to kDropped. Built once, reused for every task and
// every iteration.
// -----------------------------------------------------------------------------

struct ScatterLookup {
    index_t source_len = 0;
    std::vector<index_t> target_positions;  // length source_len, kDropped allowed
};

namespace detail {

inline void validate_crs(const SparseCrs& m) {
    if (m.n_rows < 0 || m.n_cols < 0) throw StructuralError("negative dimension");
    if (static_cast<count_t>(m.row_ptr.size()) != static_cast<count_t>(m.n_rows) + 1)
        throw StructuralError("row_ptr length mismatch");
    if (m.row_ptr.front() != 0) throw StructuralError("row_ptr[0] != 0");
    for (index_t r = 0; r < m.n_rows; ++r) {
        if (m.row_ptr[r] > m.row_ptr[r + 1]) throw StructuralError("row_ptr not monotone");
        for (index_t s = m.row_ptr[r]; s < m.row_ptr[r + 1]; ++s) {
            if (m.col_ix[s] < 0 || m.col_ix[s] >= m.n_cols)
                throw StructuralError("column index out of range");
            if (s > m.row_ptr[r] && m.col_ix[s] <= m.col_ix[s - 1])
                throw StructuralError("column indices not strictly increasing");
        }
    }
    if (m.row_ptr.back() != static_cast<index_t>(m.col_ix.size()))
        throw StructuralError("nnz mismatch");
}

}  // namespace detail

// -----------------------------------------------------------------------------
// crs_from_coordinates: canonical sorted CRS pattern from (row, col) pairs.
// Duplicates collapse; missing diagonal entries are inserted (the structural
// diagonal is required downstream by diag_ptr and by the refactorization).
// -----------------------------------------------------------------------------

inline SparseCrs crs_from_coordinates(index_t n_rows, index_t n_cols,
                                      std::vector<std::pair<index_t, index_t>> entries) {
    if (static_cast<count_t>(n_rows) > kMaxIndex || static_cast<count_t>(n_cols) > kMaxIndex)
        throw StructuralError("dimension exceeds 32-bit index range");
    for (const auto& [r, c] : entries) {
        if (r < 0 || r >= n_rows || c < 0 || c >= n_cols)
            throw StructuralError("coordinate (" + std::to_string(r) + "," + std::to_string(c) +
                                  ") out of range");
    }
    if (n_rows == n_cols) {
        for (index_t i = 0; i < n_rows; ++i) entries.emplace_back(i, i);
    }
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

    SparseCrs m;
    m.n_rows = n_rows;
    m.n_cols = n_cols;
    m.row_ptr.assign(n_rows + 1, 0);
    m.col_ix.reserve(entries.size());
    for (const auto& [r, c] : entries) {
        ++m.row_ptr[r + 1];
        m.col_ix.push_back(c);
    }
    for (index_t r = 0; r < n_rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];

    if (n_rows == n_cols) {
        m.diag_ptr.resize(n_rows);
        for (index_t r = 0; r < n_rows; ++r) {
            const index_t s = m.find(r, r);
            m.diag_ptr[r] = s;  // always present, inserted above
        }
    }
    detail::validate_crs(m);
    return m;
}

// -----------------------------------------------------------------------------
// crs_to_ccs_pattern: same nonzero set in column-compressed layout, plus the
// slot map crs_slot -> ccs_slot. The round trip through the inverted map is
// the identity.
// -----------------------------------------------------------------------------

struct CcsConversion {
    SparseCcs ccs;
    std::vector<index_t> crs_to_ccs;  // length nnz
};

inline CcsConversion crs_to_ccs_pattern(const SparseCrs& m) {
    detail::validate_crs(m);
    CcsConversion out;
    SparseCcs& t = out.ccs;
    t.n_rows = m.n_rows;
    t.n_cols = m.n_cols;
    t.col_ptr.assign(m.n_cols + 1, 0);
    for (index_t c : m.col_ix) ++t.col_ptr[c + 1];
    for (index_t c = 0; c < m.n_cols; ++c) t.col_ptr[c + 1] += t.col_ptr[c];

    t.row_ix.resize(m.col_ix.size());
    out.crs_to_ccs.resize(m.col_ix.size());
    std::vector<index_t> next(t.col_ptr.begin(), t.col_ptr.end() - 1);
    for (index_t r = 0; r < m.n_rows; ++r) {
        for (index_t s = m.row_ptr[r]; s < m.row_ptr[r + 1]; ++s) {
            const index_t c = m.col_ix[s];
            const index_t slot = next[c]++;
            t.row_ix[slot] = r;  // row-major sweep keeps rows sorted per column
            out.crs_to_ccs[s] = slot;
        }
    }
    if (!m.diag_ptr.empty()) {
        t.diag_ptr.resize(t.n_cols);
        for (index_t c = 0; c < t.n_cols; ++c) t.diag_ptr[c] = t.find(c, c);
    }
    return out;
}

// -----------------------------------------------------------------------------
// build_scatter_lookup
//
// Maps every slot of `source` (CRS) to its slot in `target` (CCS), after
//   1. dropping rows/cols filtered out (`row_map`/`col_map` send a source
//      index to its filtered index, or kDropped), and
//   2. permuting the filtered indices: target row  = perm_row.forward[row],
//                                      target col  = perm_col.forward[col].
//
// Materialized densely, scatter + zero-fill yields R * filtered(source) * C
// with R[i][o] = 1 iff perm_row.forward[o] == i and C[o][j] = 1 iff
// perm_col.forward[o] == j. The target may contain extra (fill) slots; a
// surviving source entry without a target slot is a pattern mismatch.
// -----------------------------------------------------------------------------

inline ScatterLookup build_scatter_lookup(const SparseCrs& source, const Permutation& perm_row,
                                          const Permutation& perm_col, const SparseCcs& target,
                                          std::span<const index_t> row_map,
                                          std::span<const index_t> col_map) {
    detail::validate_crs(source);
    if (static_cast<index_t>(row_map.size()) != source.n_rows ||
        static_cast<index_t>(col_map.size()) != source.n_cols)
        throw StructuralError("filter length mismatch");

    ScatterLookup lk;
    lk.source_len = source.nnz();
    lk.target_positions.assign(lk.source_len, kDropped);

    for (index_t r = 0; r < source.n_rows; ++r) {
        const index_t fr = row_map[r];
        if (fr == kDropped) continue;
        const index_t tr = perm_row.forward[fr];
        for (index_t s = source.row_ptr[r]; s < source.row_ptr[r + 1]; ++s) {
            const index_t fc = col_map[source.col_ix[s]];
            if (fc == kDropped) continue;
            const index_t tc = perm_col.forward[fc];
            const index_t slot = target.find(tc, tr);
            if (slot == kDropped)
                throw StructuralError("source entry (" + std::to_string(r) + "," +
                                      std::to_string(source.col_ix[s]) +
                                      ") has no slot in target pattern");
            lk.target_positions[s] = slot;
        }
    }
    return lk;
}

/// Scatter one value set through a lookup; untouched target slots read zero.
inline void apply_scatter(const ScatterLookup& lk, std::span<const real_t> src,
                          std::span<real_t> dst) {
    std::fill(dst.begin(), dst.end(), 0.0);
    for (index_t s = 0; s < lk.source_len; ++s) {
        const index_t t = lk.target_positions[s];
        if (t != kDropped) dst[t] = src[s];
    }
}

}  // namespace gridbatch
