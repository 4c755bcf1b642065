// One line per acceptance criterion; exit status 1 if any is red.
#include <cstdio>

#include "jweyl/verification.hpp"

int main() {
    using namespace jweyl::acceptance;
    auto results = run_all();
    apply_runtime_limits(results);
    int failed = 0;
    for (const auto& r : results) {
        std::printf("[%s] criterion %2d: %s -- %s (%.2f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(),
                    r.detail.c_str(), r.seconds);
        failed += r.passed ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
    return failed == 0 ? 0 : 1;
}
