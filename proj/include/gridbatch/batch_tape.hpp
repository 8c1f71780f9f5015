#pragma once

// =============================================================================
// gridbatch - batch-contiguous value storage
//
// A BatchTape stores one scalar per (slot, task) with the task index fastest:
// value(slot, task) sits at slot * n_tasks + task. All tasks of a mini-batch
// are therefore adjacent in memory for every slot, so per-element arithmetic
// broadcasts across the mini-batch as a contiguous inner loop.
// =============================================================================

#include <cassert>
#include <span>
#include <vector>

#include "gridbatch/core.hpp"

namespace gridbatch {

class BatchTape {
public:
    BatchTape() = default;
    BatchTape(index_t n_slots, index_t n_tasks, real_t init = 0.0)
        : n_slots_(n_slots), n_tasks_(n_tasks),
          data_(static_cast<size_t>(n_slots) * static_cast<size_t>(n_tasks), init) {}

    index_t n_slots() const { return n_slots_; }
    index_t n_tasks() const { return n_tasks_; }

    real_t& at(index_t slot, index_t task) {
        return data_[static_cast<size_t>(slot) * n_tasks_ + task];
    }
    real_t at(index_t slot, index_t task) const {
        return data_[static_cast<size_t>(slot) * n_tasks_ + task];
    }

    /// Contiguous lanes [task0, task0+width) of one slot.
    std::span<real_t> lanes(index_t slot, index_t task0, index_t width) {
        return {data_.data() + static_cast<size_t>(slot) * n_tasks_ + task0,
                static_cast<size_t>(width)};
    }
    std::span<const real_t> lanes(index_t slot, index_t task0, index_t width) const {
        return {data_.data() + static_cast<size_t>(slot) * n_tasks_ + task0,
                static_cast<size_t>(width)};
    }

    real_t* data() { return data_.data(); }
    const real_t* data() const { return data_.data(); }

    void fill(real_t v) { std::fill(data_.begin(), data_.end(), v); }

private:
    index_t n_slots_ = 0;
    index_t n_tasks_ = 0;
    std::vector<real_t> data_;
};

// Task-major <-> element-major transposes. Scenario tables arrive one row per
// task; kernels want the element-major tape. The pair is a lossless bijection.

inline BatchTape to_element_major(std::span<const real_t> task_major, index_t n_slots,
                                  index_t n_tasks) {
    assert(static_cast<count_t>(task_major.size()) ==
           static_cast<count_t>(n_slots) * n_tasks);
    BatchTape tape(n_slots, n_tasks);
    for (index_t t = 0; t < n_tasks; ++t)
        for (index_t s = 0; s < n_slots; ++s)
            tape.at(s, t) = task_major[static_cast<size_t>(t) * n_slots + s];
    return tape;
}

inline std::vector<real_t> to_task_major(const BatchTape& tape) {
    std::vector<real_t> out(static_cast<size_t>(tape.n_slots()) * tape.n_tasks());
    for (index_t t = 0; t < tape.n_tasks(); ++t)
        for (index_t s = 0; s < tape.n_slots(); ++s)
            out[static_cast<size_t>(t) * tape.n_slots() + s] = tape.at(s, t);
    return out;
}

/// Split [0, n_tasks) into contiguous mini-batches of at most `width` tasks.
struct MiniBatch {
    index_t task0;
    index_t width;
};

inline std::vector<MiniBatch> make_minibatches(index_t n_tasks, index_t width) {
    if (width < 1) throw ConfigError("minibatch width must be >= 1");
    std::vector<MiniBatch> out;
    for (index_t t = 0; t < n_tasks; t += width)
        out.push_back({t, std::min(width, static_cast<index_t>(n_tasks - t))});
    return out;
}

}  // namespace gridbatch
