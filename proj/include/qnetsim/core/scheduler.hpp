#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace qnetsim {

class Scheduler;

/// Completion handle of a task started with Scheduler::spawn.
class TaskHandle {
public:
    TaskHandle() = default;

    bool valid() const { return state_ != nullptr; }
    bool done() const { return state_ && state_->done.load(); }
    const std::string& name() const { return state_->name; }
    /// Exception that escaped the task body, if any.
    std::exception_ptr error() const;
    /// Drives the simulation until the task finishes. Returns false if the
    /// simulation stalled with the task still blocked.
    bool wait() const;

private:
    friend class Scheduler;
    struct State {
        std::string name;
        std::atomic<bool> done{false};
        mutable std::mutex mutex;
        std::exception_ptr error;
    };

    TaskHandle(std::shared_ptr<State> state, Scheduler* owner) : state_(std::move(state)), owner_(owner) {}

    std::shared_ptr<State> state_;
    Scheduler* owner_ = nullptr;
};

/// Deterministic cooperative runtime over virtual time.
///
/// Tasks are real threads, but exactly one participant holds the baton at
/// any moment: either a task running its body, or the thread currently
/// draining timed events. A participant gives the baton away only inside
/// wait_until/sleep, so every interleaving is a pure function of the
/// program and its seeds. Virtual time advances only when nothing is ready
/// to run, jumping to the next event.
///
/// Threads outside the scheduler (e.g. main) may call wait_until as well;
/// they drive the simulation while blocked and freeze it again on return.
class Scheduler {
public:
    Scheduler();
    ~Scheduler();
    Scheduler(const Scheduler&) = delete;
    Scheduler& operator=(const Scheduler&) = delete;

    /// Current virtual time in seconds.
    double now() const noexcept { return now_.load(); }

    /// Runs `fn` at now() + delay. Events must not block.
    void post(double delay, std::function<void()> fn);

    TaskHandle spawn(std::string name, std::function<void()> body);

    /// Blocks until `ready()` holds or `timeout` virtual seconds pass
    /// (timeout < 0: no limit, 0: probe only). Returns ready() at wake-up.
    /// Throws SimulationStopped once shutdown has begun.
    bool wait_until(const std::function<bool()>& ready, double timeout = -1.0);

    void sleep(double seconds);

    /// Drives the simulation for `seconds` of virtual time, or until nothing
    /// can make progress.
    void run_for(double seconds);

    /// Resolves every pending wait as a timeout, drops queued events, and
    /// drives remaining tasks to completion. Idempotent.
    void shutdown();

    bool stopping() const noexcept { return stopping_.load(); }
    bool in_task() const noexcept;
    std::size_t live_tasks() const;

    /// Called by the driving thread after every event and task switch.
    void set_observer(std::function<void()> observer);

    /// Number of event callbacks that threw; their messages go to stderr.
    std::size_t event_errors() const noexcept { return event_errors_.load(); }

private:
    struct Participant {
        std::condition_variable cv;
        bool go = false;
        bool waiting = false;
        bool timed_out = false;
        bool external = false;
        std::uint64_t wait_id = 0;
        const std::function<bool()>* ready = nullptr;
    };

    struct Event {
        double time;
        std::uint64_t seq;
        std::function<void()> fn;
        Participant* waiter = nullptr;
        std::uint64_t wait_id = 0;
    };

    void push_event(Event ev);
    Event pop_event();
    void dispatch(std::unique_lock<std::mutex>& lock, Participant* self);
    void promote_waiters();
    void release_waiter(Participant* p, bool timed_out);
    bool block(std::unique_lock<std::mutex>& lock, Participant* self, const std::function<bool()>& ready,
               double timeout);

    mutable std::mutex mutex_;
    std::atomic<double> now_{0.0};
    std::atomic<bool> stopping_{false};
    std::atomic<std::size_t> event_errors_{0};
    std::vector<Event> events_;
    std::uint64_t event_seq_ = 0;
    std::uint64_t wait_seq_ = 0;
    std::deque<Participant*> ready_;
    std::vector<Participant*> waiters_;
    bool baton_busy_ = false;
    std::size_t live_tasks_ = 0;
    std::list<std::unique_ptr<Participant>> tasks_;
    std::vector<std::thread> threads_;
    std::function<void()> observer_;
};

}  // namespace qnetsim
