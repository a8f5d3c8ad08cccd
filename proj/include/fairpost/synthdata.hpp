#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace fairpost {

// Deterministic generators for benchmark-shaped datasets. Real survey data
// cannot ship with the repo, so these reproduce the coarse shape that the
// pipeline cares about: row counts, a boolean sensitive attribute, group
// gaps in the target, mixed numeric/categorical columns, missing-value
// sentinels, and task kind.
enum class SynthKind { adult, communities, lawschool };

SynthKind parse_synth_kind(const std::string& name);
std::string synth_kind_name(SynthKind kind);

// Row counts of the datasets being imitated.
std::size_t synth_default_rows(SynthKind kind);

// Column-role descriptor understood by the data loader, as config text.
std::string synth_schema_text(SynthKind kind);

void write_synth_csv(std::ostream& out, SynthKind kind, std::size_t rows,
                     std::uint64_t seed);
void write_synth_files(const std::string& csv_path, const std::string& schema_path,
                       SynthKind kind, std::size_t rows, std::uint64_t seed);

}  // namespace fairpost
