#include "refed/sampler.hpp"

#include <stdexcept>

namespace refed {

std::vector<Session> make_sessions(const std::vector<std::int64_t>& stream,
                                   std::size_t session_size, std::size_t w) {
    if (session_size < w + 1)
        throw std::invalid_argument("make_sessions: session_size " + std::to_string(session_size) +
                                    " < w+1 = " + std::to_string(w + 1));
    std::vector<Session> out;
    for (std::size_t start = 0; start < stream.size(); start += session_size) {
        Session s;
        s.start = start;
        std::size_t end = std::min(stream.size(), start + session_size);
        s.items.assign(stream.begin() + start, stream.begin() + end);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<WindowSample> make_windows(const std::vector<std::int64_t>& stream,
                                       const Session& session, std::size_t w,
                                       const ItemFeatureProvider& features) {
    if (w < 1) throw std::invalid_argument("make_windows: w must be >= 1");
    std::vector<WindowSample> out;
    for (std::size_t off = 0; off < session.items.size(); ++off) {
        std::size_t pos = session.start + off;  // target position in the stream
        if (pos < w) continue;                  // no padding: first w items are never targets
        WindowSample ws;
        ws.position = pos;
        ws.target_item = stream[pos];
        ws.window_items.assign(stream.begin() + (pos - w), stream.begin() + pos);
        ws.x = features.stack(ws.window_items);
        out.push_back(std::move(ws));
    }
    return out;
}

std::vector<WindowSample> make_windows(const std::vector<std::int64_t>& stream,
                                       std::size_t w, const ItemFeatureProvider& features) {
    Session whole;
    whole.start = 0;
    whole.items = stream;
    return make_windows(stream, whole, w, features);
}

}  // namespace refed
