#pragma once

#include <string>
#include <string_view>

#include "icid/chain.hpp"
#include "icid/global.hpp"
#include "icid/markovian.hpp"

namespace icid {

// Result documents. Parameters the distribution does not determine are
// written as null and listed under "unidentifiable" or "unresolved".

[[nodiscard]] std::string result_json(const MarkovianParams& params);
[[nodiscard]] std::string result_json(const ChainResult& result);
[[nodiscard]] std::string result_json(const GlobalParams& params);
[[nodiscard]] std::string result_json(const MixedResult& result);
[[nodiscard]] std::string witness_json(const WitnessPair& pair, const WitnessCheck* check);

/// `{"p1": x, "q2": [...]}` or `{"p1": x, "r": [...]}`.
[[nodiscard]] PriorKnowledge parse_prior(std::string_view text);
[[nodiscard]] std::string serialize_prior(const PriorKnowledge& prior);

/// `{"error": kind, "message": text}` on one line.
[[nodiscard]] std::string error_json(std::string_view kind, std::string_view message);

}  // namespace icid
