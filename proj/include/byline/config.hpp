#pragma once

#include <filesystem>
#include <stdexcept>
#include <string_view>

#include <json.hpp>

namespace byline {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parses a config file into a JSON object. Files ending in .json are read
// as JSON, everything else as TOML.
nlohmann::json read_config_document(const std::filesystem::path& path);
nlohmann::json parse_toml(std::string_view source, std::string_view source_name = "<string>");

}  // namespace byline
