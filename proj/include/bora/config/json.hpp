#pragma once

#include <json.hpp>

#include "bora/config/dashboard.hpp"

namespace bora::config {

nlohmann::json dashboard_to_json(const DashboardSpec& spec);
nlohmann::json binding_to_json(const Binding& binding);

// Schema problems are collected into `violations`; the returned spec holds
// whatever could be read.
DashboardSpec dashboard_from_json(const nlohmann::json& doc, std::vector<Violation>& violations);
Binding binding_from_json(const nlohmann::json& j, const std::string& widget_id,
                          std::vector<Violation>& violations);

}  // namespace bora::config
