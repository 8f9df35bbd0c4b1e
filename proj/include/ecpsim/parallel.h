// Copyright 2026 The ecpsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>

namespace ecpsim {

/// Worker count: ECP_SIM_THREADS when set to a positive integer (at most
/// 256), otherwise the hardware concurrency.
std::size_t worker_count();

/// Splits [0, n) into contiguous chunks, one per worker, and calls
/// fn(begin, end, chunk_index). Chunk boundaries depend only on n and the
/// worker count; callers must not let results depend on them.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace ecpsim
