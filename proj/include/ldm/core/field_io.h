#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "ldm/core/field.h"

namespace ldm {

nlohmann::json GridToJson(const StateActionGrid& grid);
StateActionGrid GridFromJson(const nlohmann::json& j);

/// Writes `<stem>.csv` (idx,coords...,value) and `<stem>.json` (grid,
/// role, sentinel and any caller metadata under "meta").
void WriteField(const ScalarField& field, const std::string& stem,
                const nlohmann::json& meta = nlohmann::json::object());

/// Reads a field written by WriteField. `stem` may carry a .csv or .json
/// suffix.
ScalarField ReadField(const std::string& stem);

void WriteJson(const nlohmann::json& j, const std::string& path);
nlohmann::json ReadJson(const std::string& path);

}  // namespace ldm
