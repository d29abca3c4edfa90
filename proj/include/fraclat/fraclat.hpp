// Copyright 2026 The fraclat Authors
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


// Umbrella header: the whole library.

#pragma once

#include "fraclat/continuum.hpp"
#include "fraclat/error.hpp"
#include "fraclat/format.hpp"
#include "fraclat/ids.hpp"
#include "fraclat/kernel.hpp"
#include "fraclat/lattice.hpp"
#include "fraclat/lifshitz.hpp"
#include "fraclat/linalg.hpp"
#include "fraclat/parallel.hpp"
#include "fraclat/spectral.hpp"
#include "fraclat/specialfn.hpp"
#include "fraclat/verify.hpp"
