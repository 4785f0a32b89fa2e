// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ace/orchestrator.hpp>

#include <iosfwd>
#include <string_view>
#include <vector>

namespace ace {

inline constexpr std::string_view kTraceSchema = "ace-trace/1";

/// One JSON line per round followed by one summary line.
void write_trace(const EpisodeResult& result, std::ostream& sink);

/// Reads back every episode in a trace stream. Counts and totals are
/// recomputed from the round records and checked against each summary;
/// any mismatch or unknown schema throws FormatError. final_memory is left
/// empty.
std::vector<EpisodeResult> read_trace(std::istream& in);

}  // namespace ace
