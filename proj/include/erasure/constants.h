// Copyright 2026 The erasure-qec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ERASURE_CONSTANTS_H
#define ERASURE_CONSTANTS_H

namespace erasure::constants {

// CODATA 2018 recommended values (exact where the SI now fixes them).
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHbar = 1.054571817e-34;               // J s
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;   // kg
inline constexpr double kElementaryCharge = 1.602176634e-19;   // C, exact
inline constexpr double kSpeedOfLight = 299792458.0;           // m/s, exact

}  // namespace erasure::constants

#endif
