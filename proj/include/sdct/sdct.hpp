// Copyright 2026 The sdct Authors. All Rights Reserved.
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

#pragma once

#include "sdct/accounting.hpp"
#include "sdct/adapters.hpp"
#include "sdct/bench.hpp"
#include "sdct/config.hpp"
#include "sdct/dataset.hpp"
#include "sdct/io.hpp"
#include "sdct/matrix.hpp"
#include "sdct/network.hpp"
#include "sdct/partition.hpp"
#include "sdct/random.hpp"
#include "sdct/spectral.hpp"
#include "sdct/train.hpp"
