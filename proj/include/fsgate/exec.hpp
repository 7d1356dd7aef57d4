#pragma once

namespace fsgate {

// Selects the serial reference kernels or their OpenMP counterparts. Both
// produce bit-identical results: parallel loops only split work whose
// per-element arithmetic order is fixed, and reductions are finished serially.
enum class Exec { serial, parallel };

} // namespace fsgate
