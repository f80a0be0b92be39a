#pragma once

namespace evac {

/// Applies the EVACSIM_THREADS cap (if set) to the OpenMP runtime and
/// returns the worker count in effect.
int configure_threads();

/// Worker count OpenMP will use for the next parallel region.
int worker_count();

}  // namespace evac
