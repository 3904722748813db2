#include "pflow/case.hpp"

#include <string>
#include <unordered_set>

#include "pflow/errors.hpp"

namespace pflow {

int ValidatedCase::index_of(int external_id) const {
    auto it = bus_index.find(external_id);
    if (it == bus_index.end())
        throw ValidationError("unknown bus id " + std::to_string(external_id));
    return it->second;
}

void check_case_invariants(const Case& c) {
    if (!(c.base_mva > 0.0))
        throw ValidationError("base_mva must be positive, got " +
                              std::to_string(c.base_mva));

    std::unordered_set<int> ids;
    int slack_count = 0;
    for (const auto& bus : c.buses) {
        if (!ids.insert(bus.id).second)
            throw ValidationError("duplicate bus id " + std::to_string(bus.id));
        if (bus.btype == BusType::Slack) ++slack_count;
    }
    if (slack_count == 0) throw ValidationError("case has no slack bus");
    if (slack_count > 1)
        throw ValidationError("case has " + std::to_string(slack_count) +
                              " slack buses, expected exactly one");

    for (const auto& g : c.gens) {
        if (!ids.count(g.bus))
            throw ValidationError("generator references nonexistent bus " +
                                  std::to_string(g.bus));
        if (!(g.vg > 0.0))
            throw ValidationError("generator at bus " + std::to_string(g.bus) +
                                  " has non-positive voltage setpoint");
    }
    for (const auto& br : c.branches) {
        if (!ids.count(br.from_bus))
            throw ValidationError("branch endpoint references nonexistent bus " +
                                  std::to_string(br.from_bus));
        if (!ids.count(br.to_bus))
            throw ValidationError("branch endpoint references nonexistent bus " +
                                  std::to_string(br.to_bus));
        if (!(br.tap > 0.0))
            throw ValidationError("branch " + std::to_string(br.from_bus) + "-" +
                                  std::to_string(br.to_bus) + " has non-positive tap");
    }
}

ValidatedCase validate_case(const Case& c) {
    check_case_invariants(c);

    ValidatedCase vc;
    vc.grid = c;
    vc.bus_ids.reserve(c.buses.size());
    for (std::size_t i = 0; i < c.buses.size(); ++i) {
        vc.bus_ids.push_back(c.buses[i].id);
        vc.bus_index.emplace(c.buses[i].id, static_cast<int>(i));
    }
    return vc;
}

}  // namespace pflow
