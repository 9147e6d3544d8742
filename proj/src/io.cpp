#include "sdc/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sdc::io {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

std::vector<std::pair<std::string, std::string>> parse_flat_config(const std::string& text,
                                                                   const std::string& source) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(source + ":" + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument(source + ":" + std::to_string(lineno) + ": empty key");
        if (!seen.insert(key).second)
            throw std::invalid_argument(source + ":" + std::to_string(lineno) +
                                        ": duplicate key '" + key + "'");
        kv.emplace_back(key, value);
    }
    return kv;
}

std::vector<std::pair<std::string, std::string>> load_config_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config file not readable: " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_flat_config(buf.str(), path.filename().string());
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("rename failed for " + path.string() + ": " + ec.message());
    }
}

} // namespace sdc::io
