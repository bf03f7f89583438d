#include "dcrnn/data.hpp"

#include <charconv>
#include <fstream>

namespace dcrnn {

i64 Schema::index_of(i64 key) const {
    for (std::size_t f = 0; f < field_keys.size(); ++f)
        if (field_keys[f] == key) return static_cast<i64>(f);
    return -1;
}

void Schema::validate() const {
    if (field_keys.empty()) raise(ErrorKind::Config, "schema: at least one field required");
    if (field_keys.size() != vocab_sizes.size())
        raise(ErrorKind::Config, "schema: ", field_keys.size(), " keys but ", vocab_sizes.size(), " vocab sizes");
    for (std::size_t f = 0; f < field_keys.size(); ++f) {
        if (vocab_sizes[f] < 1) raise(ErrorKind::Config, "schema: vocab of field key ", field_keys[f], " must be >= 1");
        for (std::size_t g = f + 1; g < field_keys.size(); ++g)
            if (field_keys[f] == field_keys[g]) raise(ErrorKind::Config, "schema: duplicate field key ", field_keys[f]);
    }
}

namespace {

bool parse_i64(std::string_view s, i64& out) {
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && p == end;
}

// Parses one line into `ex`; on failure fills `why` and returns false.
bool parse_line(std::string_view line, const Schema& schema, Example& ex, std::string& why) {
    const std::size_t t1 = line.find('\t');
    if (t1 == std::string_view::npos) {
        why = "expected two tab separators";
        return false;
    }
    const std::size_t t2 = line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) {
        why = "expected two tab separators";
        return false;
    }

    i64 click = 0, second = 0;
    if (!parse_i64(line.substr(0, t1), click) || (click != 0 && click != 1)) {
        why = "click label must be 0 or 1";
        return false;
    }
    if (!parse_i64(line.substr(t1 + 1, t2 - t1 - 1), second) || (second != 0 && second != 1)) {
        why = "second-task label must be 0 or 1";
        return false;
    }
    if (second == 1 && click == 0) {
        why = "funnel violation: conversion without click";
        return false;
    }

    ex.click = static_cast<std::uint8_t>(click);
    ex.second = static_cast<std::uint8_t>(second);
    ex.ids.assign(static_cast<std::size_t>(schema.field_count()), 0);
    std::vector<char> seen(static_cast<std::size_t>(schema.field_count()), 0);

    std::string_view feats = line.substr(t2 + 1);
    while (!feats.empty()) {
        const std::size_t comma = feats.find(',');
        std::string_view item = feats.substr(0, comma);
        feats = comma == std::string_view::npos ? std::string_view{} : feats.substr(comma + 1);
        if (item.empty()) continue;
        const std::size_t colon = item.find(':');
        i64 key = 0, id = 0;
        if (colon == std::string_view::npos || !parse_i64(item.substr(0, colon), key) ||
            !parse_i64(item.substr(colon + 1), id)) {
            why = cat("malformed feature token '", std::string(item), "'");
            return false;
        }
        const i64 f = schema.index_of(key);
        if (f < 0) {
            why = cat("unknown field key ", key);
            return false;
        }
        if (seen[static_cast<std::size_t>(f)]) {
            why = cat("duplicate field key ", key);
            return false;
        }
        if (id < 0 || id >= schema.vocab_sizes[static_cast<std::size_t>(f)]) {
            why = cat("field ", key, " id ", id, " outside vocabulary of size ",
                      schema.vocab_sizes[static_cast<std::size_t>(f)]);
            return false;
        }
        seen[static_cast<std::size_t>(f)] = 1;
        ex.ids[static_cast<std::size_t>(f)] = id;
    }
    return true;
}

}  // namespace

Dataset load_tsv(const std::string& path, const Schema& schema, i64 max_bad_lines) {
    schema.validate();
    std::ifstream is(path);
    if (!is) raise(ErrorKind::Io, "cannot open dataset: ", path);

    Dataset data;
    data.schema = schema;
    std::string line;
    i64 line_no = 0, bad = 0;
    std::string first_bad;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        Example ex;
        std::string why;
        if (parse_line(line, schema, ex, why)) {
            data.examples.push_back(std::move(ex));
        } else {
            ++bad;
            if (first_bad.empty()) first_bad = cat(path, ":", line_no, ": ", why);
            if (bad > max_bad_lines)
                raise(ErrorKind::Data, "rejected ", bad, " line(s), tolerance ", max_bad_lines, "; first: ",
                      first_bad);
        }
    }
    return data;
}

void save_tsv(const Dataset& data, const std::string& path) {
    std::ofstream os(path);
    if (!os) raise(ErrorKind::Io, "cannot open dataset for writing: ", path);
    for (const Example& ex : data.examples) {
        os << static_cast<int>(ex.click) << '\t' << static_cast<int>(ex.second) << '\t';
        for (std::size_t f = 0; f < ex.ids.size(); ++f) {
            if (f) os << ',';
            os << data.schema.field_keys[f] << ':' << ex.ids[f];
        }
        os << '\n';
    }
    if (!os) raise(ErrorKind::Io, "write failed: ", path);
}

std::vector<std::vector<i64>> ids_by_field(const Dataset& data, std::span<const i64> indices) {
    const i64 fields = data.schema.field_count();
    std::vector<std::vector<i64>> cols(static_cast<std::size_t>(fields));
    for (auto& c : cols) c.reserve(indices.size());
    for (i64 idx : indices) {
        const Example& ex = data.examples[static_cast<std::size_t>(idx)];
        for (i64 f = 0; f < fields; ++f) cols[static_cast<std::size_t>(f)].push_back(ex.ids[static_cast<std::size_t>(f)]);
    }
    return cols;
}

std::vector<std::vector<double>> labels_by_task(const Dataset& data, std::span<const i64> indices) {
    std::vector<std::vector<double>> rows(2);
    rows[0].reserve(indices.size());
    rows[1].reserve(indices.size());
    for (i64 idx : indices) {
        const Example& ex = data.examples[static_cast<std::size_t>(idx)];
        rows[0].push_back(static_cast<double>(ex.click));
        rows[1].push_back(static_cast<double>(ex.second));
    }
    return rows;
}

}  // namespace dcrnn
