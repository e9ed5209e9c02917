#include <chrono>
#include <cstdio>

#include "henon/gamma.hpp"
#include "henon/henon_core.hpp"

namespace {

double time_ms(void (*fn)()) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void gamma_sweep() {
    double sink = 0.0;
    for (int i = 0; i < 50; ++i)
        sink += henon::gamma_value({2.0 + 0.001 * i, 0.01}, 1);
    std::printf("  gamma sweep checksum %.6f\n", sink);
}

}  // namespace

int main() {
    std::printf("gamma sweep: %.1f ms\n", time_ms(gamma_sweep));
    return 0;
}
