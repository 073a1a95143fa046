#pragma once

namespace chartlab::par {

// Thread budget for the OpenMP kernels. 1 selects the serial reference path.
// Every kernel is block-deterministic, so the result is bit-identical for any
// setting; this only controls speed.
int max_threads();
void set_max_threads(int n);

}  // namespace chartlab::par
