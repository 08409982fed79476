#include "chemoblow/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace chemoblow {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s)
{
    const auto pos = s.find_first_of("#;");
    return pos == std::string::npos ? s : s.substr(0, pos);
}

bool parse_number(const std::string& text, double& out)
{
    if (text.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return errno == 0 && end == text.c_str() + text.size();
}

std::string location(const std::string& origin, int line)
{
    return line > 0 ? origin + ":" + std::to_string(line) : origin;
}

}  // namespace

ConfigError::ConfigError(std::string origin, int line, std::string field, const std::string& what)
    : std::runtime_error(location(origin, line) + ": " + (field.empty() ? "" : field + ": ") + what),
      origin_(std::move(origin)),
      line_(line),
      field_(std::move(field))
{
}

ConfigDocument ConfigDocument::parse(const std::string& text, const std::string& origin)
{
    ConfigDocument doc;
    doc.origin_ = origin;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(origin, line, "", "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) throw ConfigError(origin, line, "", "empty section name");
            if (doc.section_lines_.count(section)) throw ConfigError(origin, line, section, "duplicate section");
            doc.section_lines_[section] = line;
            doc.sections_[section];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(origin, line, "", "expected key = value");
        if (section.empty()) throw ConfigError(origin, line, "", "key outside of any section");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError(origin, line, "", "empty key");
        auto& entries = doc.sections_[section];
        if (entries.count(key)) throw ConfigError(origin, line, section + "." + key, "duplicate key");
        entries[key] = {value, line};
        doc.order_[section].push_back(key);
    }
    return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "", "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

bool ConfigDocument::has_section(const std::string& section) const { return sections_.count(section) > 0; }

std::vector<std::string> ConfigDocument::keys(const std::string& section) const
{
    const auto it = order_.find(section);
    return it == order_.end() ? std::vector<std::string>{} : it->second;
}

const ConfigDocument::Entry* ConfigDocument::find(const std::string& section, const std::string& key) const
{
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto e = s->second.find(key);
    if (e == s->second.end()) return nullptr;
    consumed_.insert({section, key});
    return &e->second;
}

ConfigError ConfigDocument::error(const std::string& section, const std::string& key, const std::string& what) const
{
    const auto s = sections_.find(section);
    int line = 0;
    if (s != sections_.end()) {
        const auto e = s->second.find(key);
        if (e != s->second.end()) line = e->second.line;
    }
    return ConfigError(origin_, line, section + "." + key, what);
}

std::optional<std::string> ConfigDocument::get_string(const std::string& section, const std::string& key) const
{
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return e->value;
}

std::optional<double> ConfigDocument::get_double(const std::string& section, const std::string& key) const
{
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    double v = 0.0;
    if (!parse_number(e->value, v)) throw error(section, key, "expected a number, got '" + e->value + "'");
    return v;
}

std::optional<long> ConfigDocument::get_int(const std::string& section, const std::string& key) const
{
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(e->value.c_str(), &end, 10);
    if (e->value.empty() || errno != 0 || end != e->value.c_str() + e->value.size())
        throw error(section, key, "expected an integer, got '" + e->value + "'");
    return v;
}

std::optional<bool> ConfigDocument::get_bool(const std::string& section, const std::string& key) const
{
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    throw error(section, key, "expected true or false, got '" + e->value + "'");
}

std::vector<double> ConfigDocument::get_list(const std::string& section, const std::string& key) const
{
    const Entry* e = find(section, key);
    if (!e) return {};
    std::vector<double> out;
    std::istringstream in(e->value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        double v = 0.0;
        if (!parse_number(item, v)) throw error(section, key, "list item '" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

void ConfigDocument::finish(const std::set<std::string>& known_sections) const
{
    for (const auto& [section, entries] : sections_) {
        if (!known_sections.count(section))
            throw ConfigError(origin_, section_lines_.at(section), section, "unknown section");
        for (const auto& key : order_.count(section) ? order_.at(section) : std::vector<std::string>{})
            if (!consumed_.count({section, key}))
                throw ConfigError(origin_, entries.at(key).line, section + "." + key, "unknown key");
    }
}

}  // namespace chemoblow
