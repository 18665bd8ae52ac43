#pragma once

namespace sybilshare {

// Search drivers come in two flavors: a serial reference used by the tests
// and an OpenMP version that must reproduce it bit for bit.
enum class Exec { serial, parallel };

// Worker count for the parallel drivers; SYBILSHARE_THREADS caps it.
int worker_count();

}  // namespace sybilshare
