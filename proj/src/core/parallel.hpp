// Copyright 2026 The guided-es Authors
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

namespace ges {

/// Worker count for parallel sections: hardware concurrency, capped by the
/// GUIDED_ES_THREADS environment variable when set. Re-read on every call so
/// callers can change the cap between runs.
int thread_budget();

/// Runs fn(i) for i in [0, count) on up to thread_budget() workers. Tasks are
/// assigned by index, so any writes fn makes to slot i of a pre-sized output
/// are placed identically no matter how many workers ran — parallelism never
/// changes results, only wall time. Exceptions are captured and the first one
/// (by index) is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace ges
