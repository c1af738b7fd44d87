// Copyright 2026 The fuzzgir Authors.
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

#include "fuzzgir/config.hpp"
#include "fuzzgir/corpus.hpp"
#include "fuzzgir/error.hpp"
#include "fuzzgir/extractor.hpp"
#include "fuzzgir/fuzzy.hpp"
#include "fuzzgir/gazetteer.hpp"
#include "fuzzgir/geo.hpp"
#include "fuzzgir/geojson.hpp"
#include "fuzzgir/index.hpp"
#include "fuzzgir/relation.hpp"
#include "fuzzgir/retrieval.hpp"
#include "fuzzgir/rules.hpp"
#include "fuzzgir/surface.hpp"
#include "fuzzgir/text.hpp"
