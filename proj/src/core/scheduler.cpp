#include "qnetsim/core/scheduler.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "qnetsim/core/errors.hpp"

namespace qnetsim {

namespace {

thread_local void* tls_participant = nullptr;
thread_local const Scheduler* tls_scheduler = nullptr;
thread_local bool tls_in_event = false;

struct EventLater {
    template <class E>
    bool operator()(const E& a, const E& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

}  // namespace

std::exception_ptr TaskHandle::error() const {
    if (!state_) return nullptr;
    std::lock_guard lock(state_->mutex);
    return state_->error;
}

bool TaskHandle::wait() const {
    if (!state_) return false;
    auto state = state_;
    if (state->done.load()) return true;
    owner_->wait_until([state] { return state->done.load(); });
    return state->done.load();
}

Scheduler::Scheduler() = default;

Scheduler::~Scheduler() {
    shutdown();
    for (auto& t : threads_)
        if (t.joinable()) t.join();
}

bool Scheduler::in_task() const noexcept { return tls_scheduler == this && tls_participant != nullptr; }

std::size_t Scheduler::live_tasks() const {
    std::lock_guard lock(mutex_);
    return live_tasks_;
}

void Scheduler::set_observer(std::function<void()> observer) {
    std::lock_guard lock(mutex_);
    observer_ = std::move(observer);
}

void Scheduler::push_event(Event ev) {
    events_.push_back(std::move(ev));
    std::push_heap(events_.begin(), events_.end(), EventLater{});
}

Scheduler::Event Scheduler::pop_event() {
    std::pop_heap(events_.begin(), events_.end(), EventLater{});
    Event ev = std::move(events_.back());
    events_.pop_back();
    return ev;
}

void Scheduler::post(double delay, std::function<void()> fn) {
    std::lock_guard lock(mutex_);
    if (stopping_) return;
    push_event(Event{now_.load() + std::max(0.0, delay), event_seq_++, std::move(fn)});
}

TaskHandle Scheduler::spawn(std::string name, std::function<void()> body) {
    auto state = std::make_shared<TaskHandle::State>();
    state->name = std::move(name);

    std::lock_guard lock(mutex_);
    if (stopping_) throw SimulationStopped("cannot spawn '" + state->name + "': simulation stopped");
    auto owned = std::make_unique<Participant>();
    Participant* self = owned.get();
    tasks_.push_back(std::move(owned));
    ++live_tasks_;
    ready_.push_back(self);

    threads_.emplace_back([this, self, state, body = std::move(body)] {
        tls_participant = self;
        tls_scheduler = this;
        {
            std::unique_lock lock(mutex_);
            self->cv.wait(lock, [self] { return self->go; });
        }
        try {
            body();
        } catch (...) {
            std::lock_guard guard(state->mutex);
            state->error = std::current_exception();
        }
        std::unique_lock lock(mutex_);
        state->done = true;
        --live_tasks_;
        dispatch(lock, nullptr);
    });
    return TaskHandle(state, this);
}

void Scheduler::release_waiter(Participant* p, bool timed_out) {
    p->waiting = false;
    p->timed_out = timed_out;
    p->ready = nullptr;
    waiters_.erase(std::remove(waiters_.begin(), waiters_.end(), p), waiters_.end());
    ready_.push_back(p);
}

void Scheduler::promote_waiters() {
    // Registration order keeps wake-ups deterministic.
    std::vector<Participant*> woken;
    for (Participant* p : waiters_)
        if (p->ready && (*p->ready)()) woken.push_back(p);
    for (Participant* p : woken) release_waiter(p, false);
}

void Scheduler::dispatch(std::unique_lock<std::mutex>& lock, Participant* self) {
    baton_busy_ = true;
    for (;;) {
        promote_waiters();
        if (observer_) {
            auto observer = observer_;
            lock.unlock();
            observer();
            lock.lock();
        }
        if (!ready_.empty()) {
            Participant* next = ready_.front();
            ready_.pop_front();
            next->go = true;
            if (next != self) next->cv.notify_one();
            return;
        }
        if (events_.empty()) {
            // Stalled: nothing scheduled can ever wake the remaining waiters.
            // External drivers get their call back as a timeout.
            std::vector<Participant*> drivers;
            for (Participant* p : waiters_)
                if (p->external) drivers.push_back(p);
            if (!drivers.empty()) {
                for (Participant* p : drivers) release_waiter(p, true);
                continue;
            }
            baton_busy_ = false;
            return;
        }
        Event ev = pop_event();
        now_ = std::max(now_.load(), ev.time);
        if (ev.waiter) {
            if (ev.waiter->waiting && ev.waiter->wait_id == ev.wait_id) release_waiter(ev.waiter, true);
            continue;
        }
        lock.unlock();
        tls_in_event = true;
        try {
            ev.fn();
        } catch (const std::exception& e) {
            ++event_errors_;
            std::fprintf(stderr, "qnetsim: event failed at t=%.6f: %s\n", now_.load(), e.what());
        } catch (...) {
            ++event_errors_;
        }
        tls_in_event = false;
        lock.lock();
    }
}

bool Scheduler::block(std::unique_lock<std::mutex>& lock, Participant* self, const std::function<bool()>& ready,
                      double timeout) {
    self->waiting = true;
    self->timed_out = false;
    self->ready = &ready;
    self->wait_id = ++wait_seq_;
    self->go = false;
    waiters_.push_back(self);
    if (timeout > 0) {
        push_event(Event{now_.load() + timeout, event_seq_++, {}, self, self->wait_id});
    }
    dispatch(lock, self);
    self->cv.wait(lock, [self] { return self->go; });
    return !self->timed_out;
}

bool Scheduler::wait_until(const std::function<bool()>& ready, double timeout) {
    if (tls_in_event) throw std::logic_error("blocking wait inside a scheduler event");
    std::unique_lock lock(mutex_);
    const bool internal = in_task();
    if (internal) {
        auto* self = static_cast<Participant*>(tls_participant);
        if (stopping_) throw SimulationStopped("simulation stopped");
        if (ready()) return true;
        if (timeout == 0) return false;
        block(lock, self, ready, timeout);
        return ready();
    }

    // External driver: join the cooperative world for the duration of the call.
    Participant self;
    self.external = true;
    if (baton_busy_) {
        self.waiting = true;
        self.ready = &ready;
        self.wait_id = ++wait_seq_;
        waiters_.push_back(&self);
        if (timeout > 0) push_event(Event{now_.load() + timeout, event_seq_++, {}, &self, self.wait_id});
        self.cv.wait(lock, [&self] { return self.go; });
    } else {
        baton_busy_ = true;
        if (!ready() && timeout != 0) block(lock, &self, ready, timeout);
    }
    const bool result = ready();
    baton_busy_ = false;
    return result;
}

void Scheduler::sleep(double seconds) {
    static const std::function<bool()> never = [] { return false; };
    if (stopping_ && in_task()) throw SimulationStopped("simulation stopped");
    wait_until(never, seconds);
    if (stopping_ && in_task()) throw SimulationStopped("simulation stopped");
}

void Scheduler::run_for(double seconds) {
    static const std::function<bool()> never = [] { return false; };
    wait_until(never, seconds);
}

void Scheduler::shutdown() {
    {
        std::lock_guard lock(mutex_);
        if (stopping_ && live_tasks_ == 0) return;
        stopping_ = true;
        events_.clear();
        auto waiting = waiters_;
        for (Participant* p : waiting) release_waiter(p, true);
    }
    // Tasks wake with timeouts and unwind on their next blocking call.
    wait_until([this] { return live_tasks_ == 0; });
}

}  // namespace qnetsim
