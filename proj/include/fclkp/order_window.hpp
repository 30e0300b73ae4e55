#pragma once

#include <atomic>

namespace fclkp {

/// Global default for how many orders a freshly truncated series keeps below
/// its leading order. Used whenever an operation (composition with integral
/// operators, Neumann series, exponentials) has an infinite lower tail and
/// both operands are exactly known, so no watermark dictates the cut.
class OrderWindow {
public:
    static long depth() { return depth_.load(std::memory_order_relaxed); }
    static void set_depth(long d) { depth_.store(d < 1 ? 1 : d, std::memory_order_relaxed); }

    /// RAII override, restores the previous depth on scope exit.
    class Scope {
    public:
        explicit Scope(long d) : prev_(depth()) { set_depth(d); }
        ~Scope() { set_depth(prev_); }
        Scope(const Scope&) = delete;
        Scope& operator=(const Scope&) = delete;

    private:
        long prev_;
    };

private:
    inline static std::atomic<long> depth_{8};
};

} // namespace fclkp
