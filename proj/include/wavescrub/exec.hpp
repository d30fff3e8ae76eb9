#pragma once

namespace wavescrub {

/// Selects the serial reference loops or the OpenMP kernels. Both produce
/// bit-identical results; Serial exists as the test reference and for use
/// inside already-parallel frame workers.
enum class Exec { Serial, Parallel };

/// Worker count for Exec::Parallel kernels; 0 leaves the OpenMP default.
void set_kernel_threads(int threads) noexcept;
int kernel_threads() noexcept;

}  // namespace wavescrub
