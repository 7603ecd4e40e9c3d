#pragma once

#include <string>

#include "json.hpp"

#include "flatmaj/channels.hpp"
#include "flatmaj/dense.hpp"
#include "flatmaj/flatpair.hpp"

namespace flatmaj {

// Wire formats. Pair: {"label"?, "blocks": [{"p", "q", "F"}]} with "F" null on
// one-sided rows. Square matrix: {"dim", "data"} with data a row-major list of
// [re, im]. Kraus operator: {"rows", "cols", "data"}. Channel:
// {"dim_in", "dim_out", "kraus": [...]}.

nlohmann::json pair_to_json(const FlatPair& pair);
FlatPair pair_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json kraus_matrix_to_json(const Matrix& m);
Matrix kraus_matrix_from_json(const nlohmann::json& j);

nlohmann::json channel_to_json(const ChannelRep& ch);
ChannelRep channel_from_json(const nlohmann::json& j);

// JSON has no infinities: finite doubles map to numbers, everything else to
// null. Callers add context flags (e.g. "unbounded") alongside.
nlohmann::json json_number(double value);

// Report envelope shared by all commands: payload plus "schema", "config" and
// "paper_anchor" keys.
nlohmann::json make_report(const std::string& paper_anchor, const nlohmann::json& config,
                           nlohmann::json payload);

// Canonical serialization: sorted keys, two-space indent, trailing newline.
// Byte-identical for equal values.
std::string stable_dump(const nlohmann::json& j);

// Parses a JSON file; MalformedInput on missing file or parse error.
nlohmann::json load_json_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace flatmaj
