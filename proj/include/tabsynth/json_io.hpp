#pragma once

#include <json.hpp>

#include "tabsynth/table.hpp"

namespace tabsynth {

using json = nlohmann::ordered_json;

// {"columns": [[name, [cell, ...]], ...]}
json table_to_json(const Table& table);
Table table_from_json(const json& doc);

// Bare column list [[name, [cells]], ...] as used inside runner replies.
json columns_to_json(const Table& table);
Table table_from_columns_json(const json& columns);

}  // namespace tabsynth
