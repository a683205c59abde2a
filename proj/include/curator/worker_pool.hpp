#pragma once

#include <cstddef>
#include <functional>

namespace curator {

// Runs task(i) for i in [0, count) on `workers` threads pulling indices from
// a shared counter. Output placement is the caller's job (write by index),
// so results never depend on scheduling. The first exception thrown by any
// task is rethrown after all threads join.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& task);

// std::thread::hardware_concurrency(), at least 1.
std::size_t host_parallelism();

}  // namespace curator
