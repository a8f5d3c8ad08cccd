#include "fairpost/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

#include "fairpost/csv.hpp"
#include "fairpost/errors.hpp"
#include "fairpost/numeric.hpp"
#include "fairpost/rng.hpp"

namespace fairpost {

void validate(const Dataset& ds) {
    std::size_t n = ds.target.size();
    if (ds.features.rows != n || ds.sensitive.size() != n || ds.row_ids.size() != n) {
        throw ValidationError("dataset: row counts differ across fields");
    }
    if (ds.features.cols != ds.feature_names.size()) {
        throw ValidationError("dataset: feature_names length differs from column count");
    }
    for (double y : ds.target) {
        if (!(y >= 0.0 && y <= 1.0)) {
            throw ValidationError("dataset: target value outside [0,1]");
        }
    }
    bool has_true = false, has_false = false;
    for (bool s : ds.sensitive) (s ? has_true : has_false) = true;
    if (!has_true || !has_false) {
        throw ValidationError("dataset: a sensitive group is empty");
    }
}

namespace {

ColumnRole parse_role(const std::string& text, const std::string& context) {
    if (text == "numeric") return ColumnRole::numeric;
    if (text == "categorical") return ColumnRole::categorical;
    if (text == "drop") return ColumnRole::drop;
    throw ValidationError("schema: " + context + ": unknown role '" + text +
                          "' (expected numeric, categorical, or drop)");
}

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

}  // namespace

DatasetSchema DatasetSchema::from_config(const KvConfig& cfg) {
    DatasetSchema s;
    s.sensitive_column = cfg.get("sensitive");
    s.target_column = cfg.get("target");
    std::string task = cfg.get("task");
    if (task == "square") s.task = TaskKind::square_loss;
    else if (task == "logistic") s.task = TaskKind::logistic_loss;
    else throw ValidationError("schema: task must be 'square' or 'logistic'");

    s.sensitive_true_token = cfg.get_or("sensitive_true", "");
    if (cfg.has("missing")) {
        s.missing_tokens = split_tokens(cfg.get("missing"));
        s.missing_tokens.push_back("");  // empty cell is always missing
    }
    if (cfg.has("default_role")) {
        s.default_role = parse_role(cfg.get("default_role"), "default_role");
    }
    for (const auto& [key, value] : cfg.entries()) {
        if (key.rfind("column.", 0) != 0) continue;
        std::string name = key.substr(7);
        if (name.empty()) throw ValidationError("schema: empty column name");
        if (name == s.sensitive_column || name == s.target_column) {
            throw ValidationError("schema: column '" + name +
                                  "' is already the sensitive or target column");
        }
        s.columns[name] = parse_role(value, key);
    }
    return s;
}

DatasetSchema DatasetSchema::load(const std::string& path) {
    return from_config(KvConfig::load(path));
}

namespace {

bool is_missing(const DatasetSchema& schema, const std::string& cell) {
    return std::find(schema.missing_tokens.begin(), schema.missing_tokens.end(), cell) !=
           schema.missing_tokens.end();
}

bool parse_sensitive(const DatasetSchema& schema, const std::string& cell, bool& out) {
    if (!schema.sensitive_true_token.empty()) {
        out = (cell == schema.sensitive_true_token);
        return true;
    }
    static const std::set<std::string> truthy = {"1", "true", "True", "TRUE", "yes"};
    static const std::set<std::string> falsy = {"0", "false", "False", "FALSE", "no"};
    if (truthy.count(cell)) { out = true; return true; }
    if (falsy.count(cell)) { out = false; return true; }
    return false;
}

struct MinMax {
    double lo = 0.0;
    double hi = 0.0;
    // Constant columns scale to 0 rather than dividing by zero.
    double scale(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }
};

MinMax min_max(const std::vector<double>& values) {
    MinMax mm;
    mm.lo = *std::min_element(values.begin(), values.end());
    mm.hi = *std::max_element(values.begin(), values.end());
    return mm;
}

}  // namespace

Dataset load_dataset(const std::string& path, const DatasetSchema& schema) {
    CsvTable table = read_csv_file(path);

    int sensitive_col = table.column_index(schema.sensitive_column);
    if (sensitive_col < 0) {
        throw ValidationError("dataset: sensitive column '" + schema.sensitive_column +
                              "' not in file header");
    }
    int target_col = table.column_index(schema.target_column);
    if (target_col < 0) {
        throw ValidationError("dataset: target column '" + schema.target_column +
                              "' not in file header");
    }

    // Resolve a role for every header column, in file order.
    std::vector<ColumnRole> roles(table.header.size(), ColumnRole::drop);
    std::set<std::string> seen;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        const std::string& name = table.header[c];
        if (static_cast<int>(c) == sensitive_col || static_cast<int>(c) == target_col) continue;
        auto it = schema.columns.find(name);
        if (it != schema.columns.end()) {
            roles[c] = it->second;
            seen.insert(name);
        } else if (schema.default_role) {
            roles[c] = *schema.default_role;
        } else {
            throw ValidationError("dataset: column '" + name +
                                  "' has no schema role and no default_role is set");
        }
    }
    for (const auto& [name, role] : schema.columns) {
        (void)role;
        if (!seen.count(name)) {
            throw ValidationError("schema: column '" + name + "' not in file header");
        }
    }

    // Keep rows that are complete in every retained column.
    std::vector<std::size_t> kept;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        bool complete = !is_missing(schema, row[sensitive_col]) &&
                        !is_missing(schema, row[target_col]);
        for (std::size_t c = 0; complete && c < row.size(); ++c) {
            if (roles[c] != ColumnRole::drop && is_missing(schema, row[c])) complete = false;
        }
        if (complete) kept.push_back(r);
    }
    if (kept.size() < 2) {
        throw DataError("dataset: fewer than 2 complete rows after cleaning");
    }

    Dataset ds;
    ds.task_kind = schema.task;
    ds.row_ids = kept;

    // Column stats over the retained rows of the whole file; splits reuse
    // them so baseline and fair models see identical inputs.
    struct EncodedColumn {
        std::string name;
        std::vector<double> numeric;          // scaled values, numeric columns
        std::vector<std::string> levels;      // sorted, categorical columns
        std::vector<std::size_t> level_index; // per kept row
        bool categorical = false;
    };
    std::vector<EncodedColumn> encoded;

    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (roles[c] == ColumnRole::drop || static_cast<int>(c) == sensitive_col ||
            static_cast<int>(c) == target_col) {
            continue;
        }
        EncodedColumn col;
        col.name = table.header[c];
        if (roles[c] == ColumnRole::numeric) {
            col.numeric.resize(kept.size());
            for (std::size_t i = 0; i < kept.size(); ++i) {
                const std::string& cell = table.rows[kept[i]][c];
                if (!parse_double(cell, col.numeric[i])) {
                    throw DataError("dataset: column '" + col.name + "' row " +
                                    std::to_string(kept[i]) + ": not a number: '" + cell + "'");
                }
            }
            MinMax mm = min_max(col.numeric);
            for (double& v : col.numeric) v = mm.scale(v);
        } else {
            col.categorical = true;
            std::set<std::string> levels;
            for (std::size_t i : kept) levels.insert(table.rows[i][c]);
            col.levels.assign(levels.begin(), levels.end());
            col.level_index.resize(kept.size());
            for (std::size_t i = 0; i < kept.size(); ++i) {
                const std::string& cell = table.rows[kept[i]][c];
                col.level_index[i] = static_cast<std::size_t>(
                    std::lower_bound(col.levels.begin(), col.levels.end(), cell) -
                    col.levels.begin());
            }
        }
        encoded.push_back(std::move(col));
    }

    std::size_t n_features = 0;
    for (const auto& col : encoded) {
        n_features += col.categorical ? col.levels.size() : 1;
    }
    ds.features = Matrix(kept.size(), n_features);
    std::size_t out_col = 0;
    for (const auto& col : encoded) {
        if (col.categorical) {
            for (const auto& level : col.levels) {
                ds.feature_names.push_back(col.name + "=" + level);
            }
            for (std::size_t i = 0; i < kept.size(); ++i) {
                ds.features.at(i, out_col + col.level_index[i]) = 1.0;
            }
            out_col += col.levels.size();
        } else {
            ds.feature_names.push_back(col.name);
            for (std::size_t i = 0; i < kept.size(); ++i) {
                ds.features.at(i, out_col) = col.numeric[i];
            }
            ++out_col;
        }
    }

    ds.sensitive.resize(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const std::string& cell = table.rows[kept[i]][sensitive_col];
        bool value = false;
        if (!parse_sensitive(schema, cell, value)) {
            throw DataError("dataset: sensitive column row " + std::to_string(kept[i]) +
                            ": cannot interpret '" + cell + "' as a boolean");
        }
        ds.sensitive[i] = value;
    }

    ds.target.resize(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const std::string& cell = table.rows[kept[i]][target_col];
        if (!parse_double(cell, ds.target[i])) {
            throw DataError("dataset: target column row " + std::to_string(kept[i]) +
                            ": not a number: '" + cell + "'");
        }
    }
    MinMax mm = min_max(ds.target);
    if (mm.hi == mm.lo) throw DataError("dataset: target is constant, cannot normalize");
    for (double& y : ds.target) y = mm.scale(y);

    validate(ds);
    return ds;
}

Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.task_kind = ds.task_kind;
    out.feature_names = ds.feature_names;
    out.features = Matrix(indices.size(), ds.features.cols);
    out.sensitive.resize(indices.size());
    out.target.resize(indices.size());
    out.row_ids.resize(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        std::size_t r = indices[i];
        for (std::size_t c = 0; c < ds.features.cols; ++c) {
            out.features.at(i, c) = ds.features.at(r, c);
        }
        out.sensitive[i] = ds.sensitive[r];
        out.target[i] = ds.target[r];
        out.row_ids[i] = ds.row_ids[r];
    }
    return out;
}

SplitResult split(const Dataset& ds, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw ValidationError("split: train_fraction must lie in (0,1)");
    }
    if (spec.comparison_sample_size == 0) {
        throw ValidationError("split: comparison_sample_size must be positive");
    }
    std::size_t n = ds.size();
    auto n_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n) {
        throw ValidationError("split: a side of the partition would be empty");
    }
    std::size_t n_test = n - n_train;
    if (spec.comparison_sample_size > n_test) {
        throw ValidationError("split: comparison_sample_size exceeds test size (" +
                              std::to_string(spec.comparison_sample_size) + " > " +
                              std::to_string(n_test) + ")");
    }

    Rng rng(spec.seed);
    std::vector<std::size_t> perm = rng.permutation(n);
    std::vector<std::size_t> train_idx(perm.begin(), perm.begin() + n_train);
    std::vector<std::size_t> test_idx(perm.begin() + n_train, perm.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    SplitResult result;
    result.train = take_rows(ds, train_idx);
    result.test = take_rows(ds, test_idx);
    result.comparison_indices =
        rng.sample_without_replacement(n_test, spec.comparison_sample_size);
    std::sort(result.comparison_indices.begin(), result.comparison_indices.end());
    return result;
}

void dump_encoded(std::ostream& out, const Dataset& ds) {
    std::vector<std::string> header = {"row_id"};
    header.insert(header.end(), ds.feature_names.begin(), ds.feature_names.end());
    header.push_back("sensitive");
    header.push_back("target");
    write_csv_row(out, header);
    for (std::size_t r = 0; r < ds.size(); ++r) {
        std::vector<std::string> cells = {std::to_string(ds.row_ids[r])};
        for (std::size_t c = 0; c < ds.features.cols; ++c) {
            cells.push_back(format_double(ds.features.at(r, c)));
        }
        cells.push_back(ds.sensitive[r] ? "1" : "0");
        cells.push_back(format_double(ds.target[r]));
        write_csv_row(out, cells);
    }
}

}  // namespace fairpost
