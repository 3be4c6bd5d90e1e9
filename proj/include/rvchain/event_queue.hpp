// Copyright 2026 The RVChain Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace rvchain {

using Tick = std::uint64_t;

/// Discrete-event queue with a total, deterministic order: events run by
/// (time, insertion sequence). Scheduling into the past is an error.
template <class Payload>
class EventQueue {
public:
    struct Event {
        Tick time = 0;
        std::uint64_t seq = 0;
        Payload payload;
    };

    void push(Tick time, Payload payload) {
        if (time < now_) throw std::logic_error("event scheduled before current time");
        heap_.push(Event{time, next_seq_++, std::move(payload)});
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    Tick now() const { return now_; }
    Tick next_time() const { return heap_.top().time; }

    Event pop() {
        Event ev = std::move(const_cast<Event&>(heap_.top()));
        heap_.pop();
        now_ = ev.time;
        return ev;
    }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
    Tick now_ = 0;
};

}  // namespace rvchain
