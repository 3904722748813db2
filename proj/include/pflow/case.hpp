#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace pflow {

enum class BusType { PQ, PV, Slack };

struct Bus {
    int id = 0;
    BusType btype = BusType::PQ;
    double pd = 0.0;  // active load, MW
    double qd = 0.0;  // reactive load, MVAr
    double gs = 0.0;  // shunt conductance, MW at V = 1 p.u.
    double bs = 0.0;  // shunt susceptance, MVAr at V = 1 p.u.
    double vm = 1.0;  // voltage magnitude, p.u.
    double va = 0.0;  // voltage angle, degrees
};

struct Gen {
    int bus = 0;
    double pg = 0.0;  // MW
    double qg = 0.0;  // MVAr
    double vg = 1.0;  // voltage setpoint, p.u.
    bool in_service = true;
};

struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double r = 0.0;      // series resistance, p.u.
    double x = 0.0;      // series reactance, p.u.
    double b = 0.0;      // total line charging susceptance, p.u.
    double tap = 1.0;    // off-nominal turns ratio
    double shift = 0.0;  // phase shift, degrees
    bool in_service = true;
};

/// Parsed grid model. Invariants: exactly one slack bus, base_mva > 0, every
/// branch endpoint and generator bus references an existing bus id.
struct Case {
    std::string name;
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Gen> gens;
    std::vector<Branch> branches;
};

/// Case whose buses are mapped to contiguous internal indices 0..n-1 in
/// order of appearance. Gens and branches keep their external bus ids;
/// consumers translate through index_of().
struct ValidatedCase {
    Case grid;
    std::vector<int> bus_ids;                // internal index -> external id
    std::unordered_map<int, int> bus_index;  // external id -> internal index

    int n_bus() const { return static_cast<int>(grid.buses.size()); }
    const Bus& bus(int internal) const { return grid.buses[internal]; }

    /// Internal index for an external bus id; throws ValidationError if absent.
    int index_of(int external_id) const;
};

/// Checks the Case type invariants, throws ValidationError on breach.
void check_case_invariants(const Case& c);

/// Confirms the invariants and assigns contiguous internal bus indices.
ValidatedCase validate_case(const Case& c);

}  // namespace pflow
