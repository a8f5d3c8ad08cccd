#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairpost/kvconfig.hpp"
#include "fairpost/matrix.hpp"
#include "fairpost/metrics.hpp"

namespace fairpost {

// Model-ready table: encoded features, boolean sensitive attribute, and a
// target min-max scaled into [0,1]. row_ids are 0-based data-row indices in
// the source CSV (header excluded), so prediction exports stay traceable to
// the file even after missing-value drops and splitting.
struct Dataset {
    Matrix features;
    std::vector<bool> sensitive;
    std::vector<double> target;
    std::vector<std::string> feature_names;
    TaskKind task_kind = TaskKind::square_loss;
    std::vector<std::size_t> row_ids;

    std::size_t size() const { return target.size(); }
};

// Checks the row-count alignment, target range, and presence of both
// sensitive groups. load_dataset enforces this; split does not re-check
// group presence on the halves.
void validate(const Dataset& ds);

enum class ColumnRole { numeric, categorical, drop };

// Explicit per-dataset column mapping, read from a key/value config:
//
//   task = square                # or logistic
//   sensitive = majority_white
//   target = crime_rate
//   sensitive_true = Male        # optional token; default accepts 0/1 forms
//   missing = ? NA               # optional extra sentinels; "" is always missing
//   default_role = drop          # optional role for columns not listed
//   column.<name> = numeric | categorical | drop
struct DatasetSchema {
    std::string sensitive_column;
    std::string target_column;
    std::string sensitive_true_token;  // empty: accept 0/1/true/false/yes/no
    std::vector<std::string> missing_tokens = {"", "?", "NA"};
    std::map<std::string, ColumnRole> columns;
    std::optional<ColumnRole> default_role;
    TaskKind task = TaskKind::square_loss;

    static DatasetSchema from_config(const KvConfig& cfg);
    static DatasetSchema load(const std::string& path);
};

// Reads an RFC-4180 CSV with a header row and encodes it: categoricals
// one-hot (levels sorted lexicographically, names "col=level"), numerics
// min-max scaled to [0,1] on the retained rows of the whole file, rows with
// missing values in retained columns dropped, target min-max scaled.
Dataset load_dataset(const std::string& path, const DatasetSchema& schema);

struct SplitSpec {
    double train_fraction = 0.5;
    std::size_t comparison_sample_size = 1000;
    std::uint64_t seed = 0;
};

struct SplitResult {
    Dataset train;
    Dataset test;
    // Row positions within `test`, sorted ascending.
    std::vector<std::size_t> comparison_indices;
};

// Seeded disjoint partition with |train| = round(train_fraction * n) and a
// uniform without-replacement comparison sample from the test half.
// Identical inputs give identical outputs on every platform.
SplitResult split(const Dataset& ds, const SplitSpec& spec);

// New Dataset holding the given rows (indices into ds), in the given order.
Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& indices);

// Debug dump: `row_id,<feature_names...>,sensitive,target`.
void dump_encoded(std::ostream& out, const Dataset& ds);

}  // namespace fairpost
