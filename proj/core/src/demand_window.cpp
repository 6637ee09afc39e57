#include "edgeoffload/demand_window.hpp"

#include <algorithm>
#include <cmath>

namespace edgeoffload {

DemandWindow::DemandWindow(std::size_t capacity, std::vector<TaskId> task_ids)
    : capacity_(capacity), task_ids_(std::move(task_ids)) {
    if (capacity_ == 0) {
        throw ValidationError("window capacity must be positive");
    }
    if (task_ids_.empty()) {
        throw ValidationError("window needs at least one task");
    }
    index_of_.reserve(task_ids_.size());
    for (std::size_t i = 0; i < task_ids_.size(); ++i) {
        if (!index_of_.emplace(task_ids_[i], i).second) {
            throw ValidationError("duplicate task id " + std::to_string(task_ids_[i]));
        }
    }
}

void DemandWindow::record_epoch(const std::unordered_map<TaskId, double>& tdv) {
    if (tdv.size() != task_ids_.size()) {
        throw ValidationError("demand vector covers " + std::to_string(tdv.size()) +
                              " tasks, expected " + std::to_string(task_ids_.size()));
    }
    std::vector<double> row(task_ids_.size());
    for (const auto& [task, demand] : tdv) {
        auto it = index_of_.find(task);
        if (it == index_of_.end()) {
            throw ValidationError("unknown task id " + std::to_string(task));
        }
        if (!(demand >= 0.0 && demand <= 1.0)) {
            throw ValidationError("demand " + std::to_string(demand) + " for task " +
                                  std::to_string(task) + " outside [0, 1]");
        }
        row[it->second] = demand;
    }
    epochs_.push_back(std::move(row));
    if (epochs_.size() > capacity_) {
        epochs_.pop_front();
    }
}

std::size_t DemandWindow::task_index(TaskId task) const {
    auto it = index_of_.find(task);
    if (it == index_of_.end()) {
        throw ValidationError("unknown task id " + std::to_string(task));
    }
    return it->second;
}

std::vector<double> DemandWindow::recent_values(TaskId task, std::size_t count) const {
    const std::size_t col = task_index(task);
    if (count > epochs_.size()) {
        throw InsufficientHistoryError("requested " + std::to_string(count) +
                                       " values, window holds " +
                                       std::to_string(epochs_.size()));
    }
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = epochs_.size() - count; i < epochs_.size(); ++i) {
        out.push_back(epochs_[i][col]);
    }
    return out;
}

std::vector<double> DemandWindow::full_history(TaskId task) const {
    if (!full()) {
        throw InsufficientHistoryError("window holds " + std::to_string(epochs_.size()) +
                                       " of " + std::to_string(capacity_) + " epochs");
    }
    return recent_values(task, capacity_);
}

}  // namespace edgeoffload
