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

#include "sofpg/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace sofpg {

int default_thread_count() {
    const char* env = std::getenv("SOFPG_THREADS");
    if (env == nullptr) return 1;
    int value = 0;
    const char* end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec != std::errc() || ptr != end || value < 1) return 1;
    return value;
}

double pairwise_sum(std::span<const double> values) {
    if (values.empty()) return 0.0;
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

void pairwise_rows_into(std::span<const double> block, std::size_t rows, std::size_t cols,
                        double* out) {
    if (rows <= 8) {
        for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) out[c] += block[r * cols + c];
        }
        return;
    }
    const std::size_t half = rows / 2;
    std::vector<double> right(cols);
    pairwise_rows_into(block.first(half * cols), half, cols, out);
    pairwise_rows_into(block.subspan(half * cols), rows - half, cols, right.data());
    for (std::size_t c = 0; c < cols; ++c) out[c] += right[c];
}

}  // namespace

std::vector<double> pairwise_sum_rows(std::span<const double> block, std::size_t rows,
                                      std::size_t cols) {
    std::vector<double> out(cols, 0.0);
    if (rows > 0) pairwise_rows_into(block, rows, cols, out.data());
    return out;
}

}  // namespace sofpg
