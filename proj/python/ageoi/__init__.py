# Copyright 2026 The ageoi Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the ageoi core library."""

from ageoi._core import (
    AgeoiError,
    ObfuscationChannel,
    RoadNetwork,
    ValidationError,
    build_channel,
    compute_delta,
    compute_set_delta,
    cop_sweep,
    cost_of_privacy,
    emd,
    generate_scenario,
    grid_edges,
    run_ibu,
    solve_transport,
    verify_ageoi,
    voronoi,
    zero_cop_probability,
)

__all__ = [
    "AgeoiError",
    "ObfuscationChannel",
    "RoadNetwork",
    "ValidationError",
    "build_channel",
    "compute_delta",
    "compute_set_delta",
    "cop_sweep",
    "cost_of_privacy",
    "emd",
    "generate_scenario",
    "grid_edges",
    "run_ibu",
    "solve_transport",
    "verify_ageoi",
    "voronoi",
    "zero_cop_probability",
]
