#pragma once

#include <cstddef>
#include <utility>

namespace nvmg {

// Every data-parallel kernel takes an execution policy. Serial is the
// reference path kept for testing; Parallel uses OpenMP. Both paths run the
// same per-element arithmetic and reduce in index order, so their results are
// bit-identical.
enum class Exec { Serial, Parallel };

template <class Body>
void for_each_index(std::ptrdiff_t n, Exec exec, Body&& body) {
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
  }
}

}  // namespace nvmg
