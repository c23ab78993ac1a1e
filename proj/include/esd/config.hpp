#ifndef ESD_CONFIG_HPP
#define ESD_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace esd {

// Flat key=value config with [section] headers. '#' starts a comment.
// Keys are validated against the full schema at load time; unknown keys
// are rejected so typos fail loudly instead of silently using defaults.
class Config {
public:
    Config() = default;

    static Config load(const std::string& path);
    static Config from_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;

    std::string get_str(const std::string& section, const std::string& key,
                        const std::string& def) const;
    double get_double(const std::string& section, const std::string& key, double def) const;
    int get_int(const std::string& section, const std::string& key, int def) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t def) const;
    bool get_bool(const std::string& section, const std::string& key, bool def) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                    const std::vector<double>& def) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    // section.key = value lines, sorted; used for the manifest echo
    std::string echo() const;

private:
    std::map<std::string, std::string> values_;  // "section.key" -> raw string
};

}  // namespace esd

#endif
