// Copyright 2026 The ageoi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ageoi/edge_sim.h"

#include <algorithm>
#include <ostream>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

namespace ageoi {

SegmentId EvState::LocationAt(Tick tick) const {
  auto it = std::lower_bound(trajectory.begin(), trajectory.end(), tick,
                             [](const TrajectoryPoint& p, Tick t) { return p.tick < t; });
  if (it == trajectory.end() || it->tick != tick) {
    throw ValidationError(fmt::format("EV {} has no trajectory point at tick {}", ev_id, tick));
  }
  return it->segment;
}

QueryVector SubmitQuery(EvState& ev, Tick tick, const QueryContext& ctx, Rng& rng) {
  const SegmentId true_x = ev.LocationAt(tick);
  if (!ctx.coverage->Contains(true_x)) {
    throw ValidationError(
        fmt::format("EV {} at tick {} is outside the Edge coverage ({})", ev.ev_id, tick, true_x));
  }
  QueryVector q;
  q.ev_id = ev.ev_id;
  q.tick = tick;
  q.timestamp_s = static_cast<double>(tick) * ctx.tick_seconds;
  q.locations.reserve(ctx.dummies.m);
  q.locations.push_back(SamplePrivateLocation(*ctx.channel, true_x, rng));

  const QueryVector* prev = ev.last_query ? &*ev.last_query : nullptr;
  const double elapsed = prev ? q.timestamp_s - prev->timestamp_s : 0.0;
  std::vector<SegmentId> dummies =
      GenerateDummies(*ctx.net, *ctx.coverage, prev, elapsed, ctx.dummies, rng);
  q.locations.insert(q.locations.end(), dummies.begin(), dummies.end());

  ev.budget = ComposeBudget(std::move(ev.budget), {ctx.channel->params().epsilon, ctx.delta});
  ev.last_query = q;
  return q;
}

ShuffleBatch ShuffleAndForward(const std::vector<QueryVector>& queries, Rng& rng) {
  if (queries.empty()) throw ValidationError("cannot shuffle an empty batch");
  ShuffleBatch batch;
  batch.tick = queries.front().tick;
  for (const QueryVector& q : queries) {
    if (q.tick != batch.tick) {
      throw ValidationError(
          fmt::format("batch mixes ticks {} and {}", batch.tick, q.tick));
    }
    for (std::size_t i = 0; i < q.locations.size(); ++i) {
      batch.scrambled.push_back(q.locations[i]);
      batch.ledger.push_back({q.ev_id, i});
    }
  }
  std::vector<std::size_t> perm(batch.scrambled.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  rng.Shuffle(std::span<std::size_t>(perm));

  ShuffleBatch out;
  out.tick = batch.tick;
  out.scrambled.reserve(perm.size());
  out.ledger.reserve(perm.size());
  for (std::size_t idx : perm) {
    out.scrambled.push_back(batch.scrambled[idx]);
    out.ledger.push_back(std::move(batch.ledger[idx]));
  }
  return out;
}

ThirdPartyRequest ToThirdPartyRequest(const ShuffleBatch& batch) {
  return ThirdPartyRequest{batch.tick, batch.scrambled};
}

std::string SerializeRequest(const ThirdPartyRequest& request) {
  nlohmann::ordered_json j;
  j["tick"] = request.tick;
  j["locations"] = request.locations;
  return j.dump();
}

ThirdPartyResponse AnswerNearest(const ThirdPartyRequest& request, const RoadNetwork& net,
                                 const StationSet& stations) {
  ThirdPartyResponse response;
  response.answers.reserve(request.locations.size());
  for (SegmentId x : request.locations) {
    try {
      response.answers.emplace_back(NearestAvailableStation(net, stations, x));
    } catch (const NoReachableStation&) {
      response.answers.emplace_back(std::nullopt);
    }
  }
  return response;
}

ResponseBatch Reassemble(const ShuffleBatch& batch, ThirdPartyResponse response) {
  if (response.answers.size() != batch.ledger.size()) {
    throw ValidationError(fmt::format("response has {} answers for {} locations",
                                      response.answers.size(), batch.ledger.size()));
  }
  ResponseBatch out;
  std::map<EvId, std::size_t> lengths;
  for (const LedgerEntry& e : batch.ledger) {
    lengths[e.ev_id] = std::max(lengths[e.ev_id], e.position + 1);
  }
  for (const auto& [ev, len] : lengths) out.per_ev[ev].resize(len);
  for (std::size_t i = 0; i < batch.ledger.size(); ++i) {
    const LedgerEntry& e = batch.ledger[i];
    out.per_ev[e.ev_id][e.position] = response.answers[i];
  }
  out.raw = std::move(response);
  return out;
}

ResponseBatch RespondNearest(const ShuffleBatch& batch, const RoadNetwork& net,
                             const StationSet& stations) {
  return Reassemble(batch, AnswerNearest(ToThirdPartyRequest(batch), net, stations));
}

NearestStation ChooseDestination(SegmentId true_x,
                                 const std::vector<std::optional<NearestStation>>& response,
                                 const RoadNetwork& net) {
  net.CheckSegment(true_x);
  std::optional<NearestStation> best;
  for (const auto& entry : response) {
    if (!entry) continue;
    const Meters d = net.RawDistance(true_x, entry->location);
    if (!IsReachable(d)) continue;
    if (!best || d < best->distance || (d == best->distance && entry->station_id < best->station_id)) {
      best = NearestStation{entry->station_id, entry->location, d};
    }
  }
  if (!best) throw ValidationError("response contains no usable station");
  return *best;
}

std::vector<TraceRow> RunSimulation(SimulationInput input, std::uint64_t seed) {
  const RoadNetwork& net = *input.net;
  Rng rng(seed);
  QueryContext ctx{input.net, input.coverage, input.channel, ComputeDelta(*input.channel),
                   input.dummies, input.tick_seconds};

  std::stable_sort(input.schedule.begin(), input.schedule.end(),
                   [](const AvailabilityChange& a, const AvailabilityChange& b) {
                     return a.tick < b.tick;
                   });
  std::sort(input.evs.begin(), input.evs.end(),
            [](const EvState& a, const EvState& b) { return a.ev_id < b.ev_id; });

  std::vector<TraceRow> trace;
  std::size_t next_change = 0;
  for (Tick t = input.first_tick; t <= input.last_tick; ++t) {
    while (next_change < input.schedule.size() && input.schedule[next_change].tick <= t) {
      const AvailabilityChange& c = input.schedule[next_change++];
      input.stations.SetAvailable(c.station_id, c.available);
    }

    std::vector<QueryVector> queries;
    std::vector<EvState*> askers;
    for (EvState& ev : input.evs) {
      if (!ev.query_ticks.contains(t)) continue;
      queries.push_back(SubmitQuery(ev, t, ctx, rng));
      askers.push_back(&ev);
    }
    if (queries.empty()) continue;

    const ShuffleBatch batch = ShuffleAndForward(queries, rng);
    const ResponseBatch response = RespondNearest(batch, net, input.stations);

    for (std::size_t k = 0; k < queries.size(); ++k) {
      const EvState& ev = *askers[k];
      const SegmentId true_x = ev.LocationAt(t);
      const auto& answers = response.per_ev.at(ev.ev_id);

      TraceRow row;
      row.tick = t;
      row.ev_id = ev.ev_id;
      row.true_segment = true_x;
      row.privatized_segment = queries[k].locations.front();
      row.epsilon_total = ev.budget.epsilon_total;
      row.delta_total = ev.budget.delta_total;
      try {
        row.chosen_station = ChooseDestination(true_x, answers, net).station_id;
      } catch (const ValidationError&) {
      }
      std::optional<NearestStation> truth;
      try {
        truth = NearestAvailableStation(net, input.stations, true_x);
        row.true_nearest_station = truth->station_id;
      } catch (const NoReachableStation&) {
      }
      if (truth && answers.front()) {
        const Meters via_private = net.RawDistance(true_x, answers.front()->location);
        if (IsReachable(via_private)) row.cop_meters = via_private - truth->distance;
      }
      trace.push_back(std::move(row));
    }
  }
  return trace;
}

void WriteTraceCsv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << "tick,ev_id,true_segment,privatized_segment,chosen_station,true_nearest_station,"
         "cop_meters,epsilon_total,delta_total\n";
  auto opt = [](const auto& v) { return v ? fmt::format("{}", *v) : std::string(); };
  for (const TraceRow& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.tick, r.ev_id, r.true_segment,
                       r.privatized_segment, opt(r.chosen_station), opt(r.true_nearest_station),
                       opt(r.cop_meters), r.epsilon_total, r.delta_total);
  }
}

}  // namespace ageoi
