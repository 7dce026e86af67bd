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

#include <cstdint>
#include <optional>

#include "dweb/model.hpp"
#include "dweb/params.hpp"
#include "dweb/random.hpp"
#include "dweb/schema_gen.hpp"
#include "dweb/workload_gen.hpp"

namespace dweb {

/// Everything fixed by (parameters, seed): low-level parameters, schema and
/// string referential, plus the streams the later steps draw from.
struct Pipeline {
  ParameterSet params;
  LowLevelParams low;
  WarehouseSchema schema;
  StringReferential referential;

  SeededRng master() const { return SeededRng(params.seed); }
  SeededRng data_rng() const { return master().substream(stream::kData); }
  SeededRng refresh_rng() const { return master().substream(stream::kRefresh); }

  Workload workload() const {
    const WorkloadContext ctx{params.workload, schema, referential, params.warehouse.sigma_ratio};
    return generate_workload(ctx, params.seed);
  }
};

/// Derives low-level parameters (unless given) and builds the schema.
inline Pipeline prepare_pipeline(const ParameterSet& params, const std::optional<LowLevelParams>& low_override = {}) {
  const SeededRng master(params.seed);
  LowLevelParams low;
  if (low_override) {
    low = *low_override;
  } else {
    auto rng = master.substream(stream::kLowLevel);
    low = derive_low_level(params.warehouse, rng);
  }
  auto schema_rng = master.substream(stream::kSchema);
  auto schema = build_schema(low, schema_rng);
  auto referential = StringReferential::build(master.substream(stream::kReferential));
  return Pipeline{params, std::move(low), std::move(schema), std::move(referential)};
}

}  // namespace dweb
