#pragma once

#include <span>
#include <string>
#include <vector>

#include "dcrnn/common.hpp"

namespace dcrnn {

// Field layout of a dataset: wire keys and vocabulary extents, in column
// order. Id 0 of every field is reserved for "unknown" / missing.
struct Schema {
    std::vector<i64> field_keys;
    std::vector<i64> vocab_sizes;

    i64 field_count() const { return static_cast<i64>(field_keys.size()); }
    i64 index_of(i64 key) const;
    void validate() const;
};

struct Example {
    std::uint8_t click = 0;
    std::uint8_t second = 0;       // conversion / valid-play
    std::vector<i64> ids;          // one per schema field, in schema order
};

struct Dataset {
    Schema schema;
    std::vector<std::string> task_names{"click", "conversion"};
    std::vector<Example> examples;

    i64 size() const { return static_cast<i64>(examples.size()); }
};

// Wire format, one example per line:
//   click<TAB>second<TAB>key:id,key:id,...
// Missing fields map to id 0. Lines that fail to parse, violate the
// click->conversion funnel, name unknown fields, or carry out-of-vocabulary
// ids are rejected; more than `max_bad_lines` rejections fails the load.
Dataset load_tsv(const std::string& path, const Schema& schema, i64 max_bad_lines = 0);

void save_tsv(const Dataset& data, const std::string& path);

// Batch gather helpers: per-field id columns and per-task label rows for the
// selected examples.
std::vector<std::vector<i64>> ids_by_field(const Dataset& data, std::span<const i64> indices);
std::vector<std::vector<double>> labels_by_task(const Dataset& data, std::span<const i64> indices);

}  // namespace dcrnn
