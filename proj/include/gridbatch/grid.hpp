#pragma once

// =============================================================================
// gridbatch - grid case model, admittance matrix, profiles
//
// GridCase mirrors the case-file contents (MW/MVAr/degrees at the boundary)
// and carries the derived internal numbering plus the slack/PV/PQ index sets.
// The admittance matrix follows the MATPOWER branch convention; out-of-service
// branches keep their structural slots with zero value so that every N-1
// variant shares one sparsity pattern.
// =============================================================================

#include <complex>
#include <cstdlib>
#include <queue>
#include <unordered_map>
#include <vector>

#include "gridbatch/batch_tape.hpp"
#include "gridbatch/core.hpp"
#include "gridbatch/sparse.hpp"

namespace gridbatch {

using cplx = std::complex<real_t>;

enum class BusKind { slack, pv, pq };

struct Bus {
    int id = 0;  // external id
    BusKind kind = BusKind::pq;
    real_t p_load = 0.0;   // MW
    real_t q_load = 0.0;   // MVAr
    real_t gs = 0.0;       // MW shunt conductance at 1 p.u.
    real_t bs = 0.0;       // MVAr shunt susceptance at 1 p.u.
    real_t base_kv = 0.0;  // kV
    real_t vm_init = 1.0;  // p.u.
    real_t va_init = 0.0;  // degrees (file boundary; everything internal is radians)
};

struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    real_t r = 0.0;         // p.u.
    real_t x = 0.0;         // p.u.
    real_t b_charge = 0.0;  // p.u., total line charging
    real_t tap = 1.0;       // ratio, 1.0 if none
    real_t shift = 0.0;     // degrees
    bool in_service = true;
    real_t rate_mva = 0.0;  // 0 = no rating
};

struct Generator {
    int bus = 0;
    real_t p_set = 0.0;  // MW
    real_t vm_set = 1.0;
    bool in_service = true;
};

struct GridCase {
    real_t base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> generators;

    // ---- derived (filled by finalize_case) ----
    std::unordered_map<int, index_t> bus_index;   // external id -> internal
    index_t slack_bus = kDropped;                 // internal
    std::vector<index_t> pv_buses;                // internal, ascending
    std::vector<index_t> pq_buses;                // internal, ascending
    std::vector<index_t> branch_from, branch_to;  // internal endpoints

    index_t n_bus() const { return static_cast<index_t>(buses.size()); }
    index_t n_branch() const { return static_cast<index_t>(branches.size()); }

    index_t internal_bus(int external_id) const {
        auto it = bus_index.find(external_id);
        if (it == bus_index.end())
            throw StructuralError("unknown bus id " + std::to_string(external_id));
        return it->second;
    }
};

// -----------------------------------------------------------------------------
// Case validation and derived-index construction.
// -----------------------------------------------------------------------------

namespace detail {

/// BFS over in-service branches (optionally skipping one) starting at `root`.
/// Returns true iff every bus is reached.
inline bool connected_without(const GridCase& gc, index_t root, index_t skip_branch) {
    const index_t n = gc.n_bus();
    std::vector<std::vector<index_t>> adj(n);
    for (index_t b = 0; b < gc.n_branch(); ++b) {
        if (b == skip_branch || !gc.branches[b].in_service) continue;
        adj[gc.branch_from[b]].push_back(gc.branch_to[b]);
        adj[gc.branch_to[b]].push_back(gc.branch_from[b]);
    }
    std::vector<bool> seen(n, false);
    std::queue<index_t> q;
    seen[root] = true;
    q.push(root);
    index_t reached = 1;
    while (!q.empty()) {
        const index_t u = q.front();
        q.pop();
        for (index_t v : adj[u]) {
            if (seen[v]) continue;
            seen[v] = true;
            ++reached;
            q.push(v);
        }
    }
    return reached == n;
}

}  // namespace detail

/// Build internal numbering and index sets, then validate the invariants:
/// unique bus ids, exactly one slack, valid branch/generator endpoints,
/// single island over in-service branches.
inline void finalize_case(GridCase& gc) {
    gc.bus_index.clear();
    gc.bus_index.reserve(gc.buses.size());
    for (size_t i = 0; i < gc.buses.size(); ++i) {
        if (!gc.bus_index.emplace(gc.buses[i].id, static_cast<index_t>(i)).second)
            throw StructuralError("duplicate bus id " + std::to_string(gc.buses[i].id));
    }
    if (static_cast<count_t>(gc.buses.size()) * 2 > kMaxIndex)
        throw StructuralError("bus count exceeds 32-bit index budget");

    gc.slack_bus = kDropped;
    gc.pv_buses.clear();
    gc.pq_buses.clear();
    for (index_t i = 0; i < gc.n_bus(); ++i) {
        switch (gc.buses[i].kind) {
            case BusKind::slack:
                if (gc.slack_bus != kDropped) throw StructuralError("duplicate slack bus");
                gc.slack_bus = i;
                break;
            case BusKind::pv: gc.pv_buses.push_back(i); break;
            case BusKind::pq: gc.pq_buses.push_back(i); break;
        }
        if (gc.buses[i].vm_init <= 0.0)
            throw StructuralError("vm_init must be positive at bus " +
                                  std::to_string(gc.buses[i].id));
    }
    if (gc.slack_bus == kDropped) throw StructuralError("no slack bus");

    gc.branch_from.resize(gc.branches.size());
    gc.branch_to.resize(gc.branches.size());
    for (size_t b = 0; b < gc.branches.size(); ++b) {
        const Branch& br = gc.branches[b];
        gc.branch_from[b] = gc.internal_bus(br.from_bus);
        gc.branch_to[b] = gc.internal_bus(br.to_bus);
        if (gc.branch_from[b] == gc.branch_to[b])
            throw StructuralError("branch " + std::to_string(b) + " is a self loop");
        if (br.r == 0.0 && br.x == 0.0)
            throw StructuralError("branch " + std::to_string(b) + " has zero impedance");
        if (br.tap <= 0.0) throw StructuralError("branch " + std::to_string(b) + " has tap <= 0");
    }

    for (const Generator& g : gc.generators) {
        const index_t bi = gc.internal_bus(g.bus);
        if (g.in_service && gc.buses[bi].kind == BusKind::pq)
            throw StructuralError("bus " + std::to_string(g.bus) +
                                  " has an in-service generator but kind pq");
    }

    if (!detail::connected_without(gc, gc.slack_bus, kDropped))
        throw StructuralError("disconnected island in base case");
}

// -----------------------------------------------------------------------------
// Admittance matrix. One structural pattern for all tasks; per-variant complex
// values. Branch terms, with ys = 1/(r+jx), total charging b, complex tap
// t = tap * e^{j shift}:
//   Yff += (ys + j b/2) / tap^2      Yft += -ys / conj(t)
//   Ytf += -ys / t                   Ytt +=  ys + j b/2
// Bus shunts add (gs + j bs)/base_mva on the diagonal.
// -----------------------------------------------------------------------------

struct BranchAdmittance {
    cplx ff{0.0, 0.0}, ft{0.0, 0.0}, tf{0.0, 0.0}, tt{0.0, 0.0};
};

struct YbusModel {
    SparseCrs pattern;             // structurally stable across N-1 variants
    std::vector<cplx> base_values;  // base-case values per slot
    std::vector<BranchAdmittance> branch_adm;  // zero for out-of-service branches
    std::vector<index_t> slot_ff, slot_ft, slot_tf, slot_tt;  // per-branch slots
};

inline BranchAdmittance branch_admittance(const Branch& br) {
    BranchAdmittance a;
    if (!br.in_service) return a;
    const cplx ys = 1.0 / cplx(br.r, br.x);
    const cplx ysh(0.0, br.b_charge / 2.0);
    const cplx t = std::polar(br.tap, deg_to_rad(br.shift));
    a.tt = ys + ysh;
    a.ff = (ys + ysh) / (br.tap * br.tap);
    a.ft = -ys / std::conj(t);
    a.tf = -ys / t;
    return a;
}

inline YbusModel build_ybus(const GridCase& gc) {
    const index_t n = gc.n_bus();
    std::vector<std::pair<index_t, index_t>> coords;
    coords.reserve(gc.branches.size() * 4);
    for (index_t b = 0; b < gc.n_branch(); ++b) {
        const index_t f = gc.branch_from[b], t = gc.branch_to[b];
        coords.emplace_back(f, t);
        coords.emplace_back(t, f);
    }
    YbusModel m;
    m.pattern = crs_from_coordinates(n, n, std::move(coords));

    m.base_values.assign(m.pattern.nnz(), cplx{0.0, 0.0});
    m.branch_adm.resize(gc.n_branch());
    m.slot_ff.resize(gc.n_branch());
    m.slot_ft.resize(gc.n_branch());
    m.slot_tf.resize(gc.n_branch());
    m.slot_tt.resize(gc.n_branch());

    for (index_t b = 0; b < gc.n_branch(); ++b) {
        const index_t f = gc.branch_from[b], t = gc.branch_to[b];
        m.slot_ff[b] = m.pattern.diag_ptr[f];
        m.slot_tt[b] = m.pattern.diag_ptr[t];
        m.slot_ft[b] = m.pattern.find(f, t);
        m.slot_tf[b] = m.pattern.find(t, f);
        const BranchAdmittance a = branch_admittance(gc.branches[b]);
        m.branch_adm[b] = a;
        m.base_values[m.slot_ff[b]] += a.ff;
        m.base_values[m.slot_ft[b]] += a.ft;
        m.base_values[m.slot_tf[b]] += a.tf;
        m.base_values[m.slot_tt[b]] += a.tt;
    }
    for (index_t i = 0; i < n; ++i)
        m.base_values[m.pattern.diag_ptr[i]] += cplx(gc.buses[i].gs, gc.buses[i].bs) / gc.base_mva;
    return m;
}

/// Value set for a single-branch outage: the branch's contributions are
/// removed, the pattern stays. Outage of an out-of-service branch is a no-op.
inline std::vector<cplx> ybus_values_with_outage(const YbusModel& m, index_t branch) {
    std::vector<cplx> v = m.base_values;
    const BranchAdmittance& a = m.branch_adm[branch];
    v[m.slot_ff[branch]] -= a.ff;
    v[m.slot_ft[branch]] -= a.ft;
    v[m.slot_tf[branch]] -= a.tf;
    v[m.slot_tt[branch]] -= a.tt;
    return v;
}

/// Contingency pre-check: does removing `branch` split the grid?
inline bool outage_islands_grid(const GridCase& gc, index_t branch) {
    if (!gc.branches[branch].in_service) return false;
    return !detail::connected_without(gc, gc.slack_bus, branch);
}

// -----------------------------------------------------------------------------
// Per-task profiles. P0/Q0 are specified net injections in p.u. (generation
// minus load); tapes may hold one shared set or one per task.
// -----------------------------------------------------------------------------

struct ScenarioTable {
    index_t n_tasks = 1;
    // Per-set bus loads in MW/MVAr; one column per set, n_sets in {1, n_tasks}.
    index_t n_sets = 1;
    std::vector<real_t> p_mw;    // [bus * n_sets + set]
    std::vector<real_t> q_mvar;  // same layout
};

/// Scenario with every task at the case loads.
inline ScenarioTable case_scenario(const GridCase& gc, index_t n_tasks) {
    ScenarioTable s;
    s.n_tasks = n_tasks;
    s.n_sets = 1;
    s.p_mw.resize(gc.n_bus());
    s.q_mvar.resize(gc.n_bus());
    for (index_t i = 0; i < gc.n_bus(); ++i) {
        s.p_mw[i] = gc.buses[i].p_load;
        s.q_mvar[i] = gc.buses[i].q_load;
    }
    return s;
}

struct ProfileBatch {
    index_t n_tasks = 0;
    index_t n_sets = 0;             // 1 when all tasks share the injection set
    BatchTape p0, q0;               // [n_bus x n_sets], p.u.
    std::vector<real_t> vm_start;   // per bus (PV/slack pinned to setpoint)
    std::vector<real_t> va_start;   // per bus, radians
    std::vector<real_t> vm_setpoint;  // per bus: PV/slack regulation target
};

inline ProfileBatch assemble_profiles(const GridCase& gc, const ScenarioTable& sc) {
    const index_t n = gc.n_bus();
    if (sc.n_sets != 1 && sc.n_sets != sc.n_tasks)
        throw ConfigError("scenario set count must be 1 or n_tasks");
    if (static_cast<count_t>(sc.p_mw.size()) != static_cast<count_t>(n) * sc.n_sets ||
        static_cast<count_t>(sc.q_mvar.size()) != static_cast<count_t>(n) * sc.n_sets)
        throw ConfigError("scenario width mismatch");

    ProfileBatch pb;
    pb.n_tasks = sc.n_tasks;
    pb.n_sets = sc.n_sets;
    pb.p0 = BatchTape(n, sc.n_sets);
    pb.q0 = BatchTape(n, sc.n_sets);

    std::vector<real_t> gen_p(n, 0.0);
    std::vector<real_t> gen_vm(n, 0.0);
    for (const Generator& g : gc.generators) {
        if (!g.in_service) continue;
        const index_t bi = gc.internal_bus(g.bus);
        gen_p[bi] += g.p_set;
        if (gen_vm[bi] == 0.0) gen_vm[bi] = g.vm_set;  // first in-service gen regulates
    }

    for (index_t set = 0; set < sc.n_sets; ++set) {
        for (index_t i = 0; i < n; ++i) {
            const real_t pl = sc.p_mw[static_cast<size_t>(i) * sc.n_sets + set];
            const real_t ql = sc.q_mvar[static_cast<size_t>(i) * sc.n_sets + set];
            pb.p0.at(i, set) = (gen_p[i] - pl) / gc.base_mva;
            pb.q0.at(i, set) = -ql / gc.base_mva;
        }
    }

    pb.vm_start.resize(n);
    pb.va_start.resize(n);
    pb.vm_setpoint.resize(n);
    const real_t slack_va = deg_to_rad(gc.buses[gc.slack_bus].va_init);
    for (index_t i = 0; i < n; ++i) {
        const Bus& bus = gc.buses[i];
        const bool regulated = bus.kind != BusKind::pq;
        pb.vm_setpoint[i] = regulated && gen_vm[i] > 0.0 ? gen_vm[i] : bus.vm_init;
        pb.vm_start[i] = regulated ? pb.vm_setpoint[i] : bus.vm_init;
        pb.va_start[i] = deg_to_rad(bus.va_init);
    }
    pb.va_start[gc.slack_bus] = slack_va;
    return pb;
}

}  // namespace gridbatch
