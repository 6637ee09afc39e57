#pragma once

#include <cstdint>

#include "edgeoffload/errors.hpp"

namespace edgeoffload {

using TaskId = std::uint32_t;

/// A task hosted by a node: its identity, the load it adds to the hosting
/// node, and the most recently observed demand for it.
struct TaskDescriptor {
    TaskId id{0};
    double load{0.0};            // lambda, abstract load units, >= 0
    double demand_current{0.0};  // in [0, 1]

    TaskDescriptor() = default;
    TaskDescriptor(TaskId task_id, double task_load, double demand)
        : id(task_id), load(task_load), demand_current(demand) {
        if (load < 0.0) {
            throw ValidationError("task load must be non-negative");
        }
        if (demand_current < 0.0 || demand_current > 1.0) {
            throw ValidationError("task demand must lie in [0, 1]");
        }
    }
};

}  // namespace edgeoffload
