#include "cel/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace cel {

int thread_count() {
    static const int cached = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw <= 0) hw = 1;
        if (const char* env = std::getenv("CEL_THREADS")) {
            char* end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (end != env && v > 0) return static_cast<int>(std::min<long>(v, 256));
        }
        return hw;
    }();
    return cached;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk) {
    if (count == 0) return;
    std::size_t workers = static_cast<std::size_t>(thread_count());
    workers = std::min(workers, std::max<std::size_t>(1, count / std::max<std::size_t>(1, min_chunk)));
    if (workers <= 1) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 1; w < workers; ++w) {
        std::size_t b = w * chunk;
        std::size_t e = std::min(count, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, b, e] { body(b, e); });
    }
    body(0, std::min(count, chunk));
    for (auto& t : pool) t.join();
}

}  // namespace cel
