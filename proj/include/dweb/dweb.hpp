/*
 * Copyright (c) 2026 The dweb Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "dweb/backend.hpp"
#include "dweb/connection.hpp"
#include "dweb/csv_export.hpp"
#include "dweb/data_gen.hpp"
#include "dweb/dialect.hpp"
#include "dweb/error.hpp"
#include "dweb/estimate.hpp"
#include "dweb/etl.hpp"
#include "dweb/harness.hpp"
#include "dweb/model.hpp"
#include "dweb/params.hpp"
#include "dweb/pipeline.hpp"
#include "dweb/query.hpp"
#include "dweb/random.hpp"
#include "dweb/schema_gen.hpp"
#include "dweb/sql_render.hpp"
#include "dweb/sqlite_backend.hpp"
#include "dweb/value.hpp"
#include "dweb/workload_gen.hpp"
#include "dweb/workload_io.hpp"
