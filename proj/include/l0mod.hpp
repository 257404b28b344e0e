// Copyright 2026 The l0mod Authors
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

#pragma once

#include "l0mod/error.hpp"
#include "l0mod/linalg.hpp"
#include "l0mod/measure_space.hpp"
#include "l0mod/norm.hpp"
#include "l0mod/module.hpp"
#include "l0mod/hom_dual.hpp"
#include "l0mod/index_set.hpp"
#include "l0mod/system.hpp"
#include "l0mod/iso.hpp"
#include "l0mod/limit.hpp"
#include "l0mod/direct_limit.hpp"
#include "l0mod/inverse_limit.hpp"
#include "l0mod/limit_duality.hpp"
#include "l0mod/pullback.hpp"
