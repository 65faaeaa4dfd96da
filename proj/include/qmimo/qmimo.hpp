// SPDX-License-Identifier: Apache-2.0
//
// qmimo: capacity bounds and achievable rates for one-bit MIMO receivers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

#include "bounds.hpp"
#include "channel.hpp"
#include "channel_io.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "mcsim.hpp"
#include "optimizer.hpp"
#include "phasefun.hpp"
#include "power.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "sweep.hpp"
