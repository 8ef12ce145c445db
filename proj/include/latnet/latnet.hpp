// Copyright 2026 The latnet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LATNET_LATNET_HPP
#define LATNET_LATNET_HPP

#include "connectivity.hpp"
#include "dynamics.hpp"
#include "harness.hpp"
#include "lattice.hpp"
#include "measure.hpp"
#include "numeric.hpp"
#include "rng.hpp"
#include "solver.hpp"
#include "weights.hpp"

#endif // LATNET_LATNET_HPP
