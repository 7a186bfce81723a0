#pragma once

namespace pixelrl {

/// Which implementation of a data-parallel kernel to run. Serial is the
/// straightforward reference the OpenMP kernels are tested against.
enum class Backend { Serial, OpenMP };

/// Number of OpenMP threads that a parallel region would use (1 without OpenMP).
int max_threads();

}  // namespace pixelrl
