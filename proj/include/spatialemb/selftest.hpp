// include/spatialemb/selftest.hpp

// Copyright 2026 The SpatialEmb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SPATIALEMB_SELFTEST_HPP_
#define SPATIALEMB_SELFTEST_HPP_

#include <iosfwd>

namespace spatialemb {

struct SelftestOptions {
  // Batch length for the latency-ordering section; small enough for a
  // laptop, large enough that run-to-run noise stays well under the
  // measured gaps.
  double bench_batch_seconds = 4.0;
  int bench_repeats = 10;
  bool skip_latency = false;  // property-only run (fast CI mode)
};

// Runs the full property/acceptance suite, printing one pass/fail line per
// criterion. Returns true when every criterion passed.
bool RunSelftest(std::ostream& os, const SelftestOptions& opts);

}  // namespace spatialemb

#endif  // SPATIALEMB_SELFTEST_HPP_
