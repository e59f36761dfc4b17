// Copyright 2026 The varq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VARQ_VARQ_HPP_
#define VARQ_VARQ_HPP_

#include "varq/ansatz.hpp"
#include "varq/circuit.hpp"
#include "varq/exact.hpp"
#include "varq/gibbs.hpp"
#include "varq/grouping.hpp"
#include "varq/models.hpp"
#include "varq/optimize.hpp"
#include "varq/pauli.hpp"
#include "varq/rng.hpp"
#include "varq/statevector.hpp"
#include "varq/vqe.hpp"
#include "varq/vsv.hpp"

#endif  // VARQ_VARQ_HPP_
