#pragma once

#include <cstddef>
#include <deque>
#include <unordered_map>
#include <vector>

#include "edgeoffload/types.hpp"

namespace edgeoffload {

/// Sliding window over the most recent demand recordings of one node.
///
/// Each recorded epoch is a full demand vector covering all of the node's
/// tasks, with values in [0, 1]. Once `capacity` epochs are stored, recording
/// another one evicts exactly the oldest. Epochs are logical ticks supplied
/// by the caller; the window carries no clock.
///
/// Single writer per window; concurrent reads are safe while no writer runs.
class DemandWindow {
public:
    /// `capacity` is the number of epochs retained (W); `task_ids` fixes the
    /// task set every epoch must cover.
    DemandWindow(std::size_t capacity, std::vector<TaskId> task_ids);

    /// Appends one epoch. The demand vector must cover exactly the window's
    /// task set with values in [0, 1]; anything else is a ValidationError.
    void record_epoch(const std::unordered_map<TaskId, double>& tdv);

    /// The `count` most recent demand values for a task, oldest first.
    /// Throws InsufficientHistoryError when fewer epochs are stored.
    std::vector<double> recent_values(TaskId task, std::size_t count) const;

    /// The full W-length series for a task, oldest first. Only defined once
    /// the window is full.
    std::vector<double> full_history(TaskId task) const;

    std::size_t size() const noexcept { return epochs_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t task_count() const noexcept { return task_ids_.size(); }
    bool full() const noexcept { return epochs_.size() == capacity_; }
    const std::vector<TaskId>& tasks() const noexcept { return task_ids_; }

private:
    std::size_t task_index(TaskId task) const;

    std::size_t capacity_;
    std::vector<TaskId> task_ids_;
    std::unordered_map<TaskId, std::size_t> index_of_;
    // Dense epoch-major storage: one row per epoch, one column per task.
    std::deque<std::vector<double>> epochs_;
};

}  // namespace edgeoffload
