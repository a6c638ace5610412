/*
 Copyright 2026 The sofpg Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef SOFPG_PARALLEL_HPP
#define SOFPG_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace sofpg {

/// Thread count from SOFPG_THREADS, or 1 when unset or invalid.
int default_thread_count();

/// Runs fn(i) for i in [0, count) on up to `threads` workers with static
/// contiguous chunking. If any call throws, the exception from the lowest
/// failing chunk is rethrown after all workers finish, so the reported
/// error does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (count + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                const std::size_t begin = w * chunk;
                const std::size_t end = std::min(count, begin + chunk);
                try {
                    for (std::size_t i = begin; i < end; ++i) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Pairwise (tree) summation in index order. The result depends only on the
/// values, not on how they were produced.
double pairwise_sum(std::span<const double> values);

/// Column-wise pairwise sum of a row-major rows x cols block.
std::vector<double> pairwise_sum_rows(std::span<const double> block, std::size_t rows,
                                      std::size_t cols);

}  // namespace sofpg

#endif  // SOFPG_PARALLEL_HPP
