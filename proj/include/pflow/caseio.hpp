#pragma once

#include <string>
#include <string_view>

#include "pflow/case.hpp"

namespace pflow {

/// Parses the MATPOWER-style text subset: `mpc.baseMVA`, `mpc.bus`,
/// `mpc.gen` and `mpc.branch` assignments with bracketed numeric matrices,
/// `%` comments and `;` row separators. Only the standard columns are
/// consumed; extra columns are accepted and ignored.
Case parse_matpower_case(std::string_view text);

/// Parses the JSON case format (top-level keys base_mva, buses, gens,
/// branches). Field names match the Case member names.
Case parse_json_case(std::string_view text);

/// Serializes a Case to JSON; parse_json_case(serialize_case_json(c)) == c.
std::string serialize_case_json(const Case& c);

/// Loads a case file, dispatching on extension (.m / .json) with a content
/// sniff as fallback.
Case load_case_file(const std::string& path);

}  // namespace pflow
