#pragma once

#include <cstdint>
#include <vector>

#include "refed/dataset.hpp"
#include "refed/tensor.hpp"

namespace refed {

/// Contiguous chunk of a user's stream; sessions tile the stream without
/// overlap and bound how many windows are materialized at once.
struct Session {
    std::size_t start = 0;  // offset into the stream
    std::vector<std::int64_t> items;
};

/// One training example: stacked features of the w items preceding a target.
struct WindowSample {
    Tensor x;                       // (w, d)
    std::vector<std::int64_t> window_items;
    std::int64_t target_item = 0;
    std::size_t position = 0;       // target's ordinal in the stream
};

std::vector<Session> make_sessions(const std::vector<std::int64_t>& stream,
                                   std::size_t session_size, std::size_t w);

/// Windows for targets inside `session`, sliding by one item. Predecessors may
/// reach back across session boundaries into `stream`; targets with fewer than
/// w predecessors produce no window.
std::vector<WindowSample> make_windows(const std::vector<std::int64_t>& stream,
                                       const Session& session, std::size_t w,
                                       const ItemFeatureProvider& features);

/// All windows of a stream (equivalent to concatenating per-session windows).
std::vector<WindowSample> make_windows(const std::vector<std::int64_t>& stream,
                                       std::size_t w, const ItemFeatureProvider& features);

}  // namespace refed
