#include "byline/config.hpp"

#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace byline {

namespace {

nlohmann::json to_json(const toml::node& node) {
    if (const auto* t = node.as_table()) {
        nlohmann::json obj = nlohmann::json::object();
        for (const auto& [k, v] : *t) obj[std::string(k.str())] = to_json(v);
        return obj;
    }
    if (const auto* a = node.as_array()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& v : *a) arr.push_back(to_json(v));
        return arr;
    }
    if (const auto* s = node.as_string()) return s->get();
    if (const auto* i = node.as_integer()) return i->get();
    if (const auto* f = node.as_floating_point()) return f->get();
    if (const auto* b = node.as_boolean()) return b->get();
    std::ostringstream os;
    if (const auto* d = node.as_date()) {
        os << d->get();
    } else if (const auto* t = node.as_time()) {
        os << t->get();
    } else if (const auto* dt = node.as_date_time()) {
        os << dt->get();
    }
    return os.str();
}

}  // namespace

nlohmann::json parse_toml(std::string_view source, std::string_view source_name) {
    try {
        const toml::table table = toml::parse(source, source_name);
        return to_json(table);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << source_name << ':' << e.source().begin.line << ':' << e.source().begin.column << ": "
           << e.description();
        throw ConfigError(os.str());
    }
}

nlohmann::json read_config_document(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const auto source = buf.str();
    if (path.extension() == ".json") {
        try {
            auto j = nlohmann::json::parse(source);
            if (!j.is_object()) throw ConfigError(path.string() + ": top level must be an object");
            return j;
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(path.string() + ": " + e.what());
        }
    }
    return parse_toml(source, path.string());
}

}  // namespace byline
