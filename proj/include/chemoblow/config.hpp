#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemoblow {

/// Configuration problem located in a file: line 0 means the whole file.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string origin, int line, std::string field, const std::string& what);

    [[nodiscard]] const std::string& origin() const { return origin_; }
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] const std::string& field() const { return field_; }

private:
    std::string origin_;
    int line_;
    std::string field_;
};

/// Flat INI-style document: `[section]` headers, `key = value` lines, `#` or
/// `;` comments. Keys are unique per section. Every lookup marks the entry
/// consumed; finish() rejects whatever was never read.
class ConfigDocument {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static ConfigDocument parse(const std::string& text, const std::string& origin = "<config>");
    static ConfigDocument load(const std::string& path);

    [[nodiscard]] const std::string& origin() const { return origin_; }
    [[nodiscard]] bool has_section(const std::string& section) const;
    [[nodiscard]] std::vector<std::string> keys(const std::string& section) const;
    [[nodiscard]] const Entry* find(const std::string& section, const std::string& key) const;

    [[nodiscard]] std::optional<std::string> get_string(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::optional<double> get_double(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::optional<long> get_int(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::optional<bool> get_bool(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::vector<double> get_list(const std::string& section, const std::string& key) const;

    [[nodiscard]] ConfigError error(const std::string& section, const std::string& key, const std::string& what) const;

    /// Throws on unknown sections or keys that were never consumed.
    void finish(const std::set<std::string>& known_sections) const;

private:
    std::string origin_;
    // section -> key -> entry; insertion order kept separately for lists
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::map<std::string, int> section_lines_;
    std::map<std::string, std::vector<std::string>> order_;
    mutable std::set<std::pair<std::string, std::string>> consumed_;
};

}  // namespace chemoblow
