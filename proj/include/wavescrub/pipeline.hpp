#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "wavescrub/frame.hpp"
#include "wavescrub/video_io.hpp"

namespace wavescrub {

/// Reads frames from `source` on the calling thread, runs `work` on a pool of
/// `threads` workers and hands results to `emit` strictly in input order, also
/// on the calling thread. At most 2 * threads frames are in flight. If any
/// frame fails, the exception of the earliest failing frame is rethrown once
/// all earlier frames have been emitted.
///
/// Returns the number of frames emitted.
template <class Result>
std::size_t run_ordered(FrameSource& source, int threads, const std::function<Result(std::size_t, Frame)>& work,
                        const std::function<void(std::size_t, Result&)>& emit) {
    if (threads < 1) threads = 1;
    const std::size_t window = 2 * static_cast<std::size_t>(threads);

    struct Slot {
        std::optional<Result> value;
        std::exception_ptr error;
    };

    std::mutex mu;
    std::condition_variable work_ready;
    std::condition_variable done_ready;
    std::deque<std::pair<std::size_t, Frame>> queue;
    std::map<std::size_t, Slot> done;
    bool closing = false;
    bool abort = false;

    auto worker = [&] {
        for (;;) {
            std::pair<std::size_t, Frame> job;
            {
                std::unique_lock lock(mu);
                work_ready.wait(lock, [&] { return closing || abort || !queue.empty(); });
                if (abort || queue.empty()) return;
                job = std::move(queue.front());
                queue.pop_front();
            }
            Slot slot;
            try {
                slot.value.emplace(work(job.first, std::move(job.second)));
            } catch (...) {
                slot.error = std::current_exception();
            }
            {
                std::lock_guard lock(mu);
                done.emplace(job.first, std::move(slot));
            }
            done_ready.notify_all();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);

    auto shutdown = [&](bool hard) {
        {
            std::lock_guard lock(mu);
            closing = true;
            abort = abort || hard;
        }
        work_ready.notify_all();
        for (auto& t : pool) t.join();
        pool.clear();
    };

    std::size_t submitted = 0;
    std::size_t emitted = 0;

    // Emits every finished frame that is next in order; blocks until at
    // least one is available when `wait` is set.
    auto drain = [&](bool wait) {
        for (;;) {
            Slot slot;
            {
                std::unique_lock lock(mu);
                if (wait) done_ready.wait(lock, [&] { return done.count(emitted) > 0; });
                auto it = done.find(emitted);
                if (it == done.end()) return;
                slot = std::move(it->second);
                done.erase(it);
            }
            if (slot.error) std::rethrow_exception(slot.error);
            emit(emitted, *slot.value);
            ++emitted;
            wait = false;
        }
    };

    try {
        for (;;) {
            if (submitted - emitted >= window) {
                drain(true);
                continue;
            }
            std::optional<Frame> frame = source.next();
            if (!frame) break;
            {
                std::lock_guard lock(mu);
                queue.emplace_back(submitted, std::move(*frame));
            }
            ++submitted;
            work_ready.notify_one();
            drain(false);
        }
        while (emitted < submitted) drain(true);
    } catch (...) {
        shutdown(true);
        throw;
    }
    shutdown(false);
    return emitted;
}

}  // namespace wavescrub
