#include "support.hpp"

#include <smoothrisk/errors.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace smoothrisk::cli {

void write_file_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if (ec) {
            throw DataError("cannot create directory '" + target.parent_path().string() + "': " + ec.message());
        }
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot write '" + tmp.string() + "'");
        }
        out << content;
        out.flush();
        if (!out) {
            throw DataError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        throw DataError("cannot move '" + tmp.string() + "' to '" + path + "': " + ec.message());
    }
}

std::string file_digest(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
        h ^= static_cast<unsigned char>(*it);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string join_path(const std::string& dir, const std::string& name)
{
    return (std::filesystem::path(dir) / name).string();
}

CLI::Option* ConfigBinder::flag(CLI::App* app, const std::string& flags, bool& var, const std::string& help,
                                std::vector<std::string> keys)
{
    CLI::Option* opt = app->add_flag(flags, var, help);
    bindings_.push_back(Binding{app, opt, std::move(keys), [&var](const nlohmann::json& j) { var = j.get<bool>(); },
                                [&var] { return nlohmann::json(var); }});
    return opt;
}

void ConfigBinder::apply(const nlohmann::json& config, const CLI::App* root, const CLI::App* active) const
{
    if (!config.is_object()) {
        return;
    }
    const nlohmann::json* nested = nullptr;
    const std::string section = active->get_name();
    if (config.contains(section) && config.at(section).is_object()) {
        nested = &config.at(section);
    }
    for (const auto& b : bindings_) {
        if ((b.app != root && b.app != active) || b.opt->count() > 0) {
            continue;
        }
        for (const auto& key : b.keys) {
            const nlohmann::json* source = nullptr;
            if (nested != nullptr && nested->contains(key)) {
                source = &nested->at(key);
            } else if (config.contains(key)) {
                source = &config.at(key);
            }
            if (source != nullptr) {
                try {
                    b.assign(*source);
                } catch (const nlohmann::json::exception& e) {
                    throw ConfigError("config key '" + key + "': " + e.what());
                }
                break;
            }
        }
    }
}

nlohmann::json ConfigBinder::resolved(const CLI::App* root, const CLI::App* active) const
{
    nlohmann::json out = nlohmann::json::object();
    for (const auto& b : bindings_) {
        if (b.app != root && b.app != active) {
            continue;
        }
        out[b.keys.front()] = b.dump();
    }
    return out;
}

Manifest::Manifest(std::string command, std::vector<std::string> argv)
{
    doc_["command"] = std::move(command);
    doc_["argv"] = std::move(argv);
    doc_["started_at"] = utc_timestamp();
    doc_["seeds"] = nlohmann::json::object();
    doc_["inputs"] = nlohmann::json::array();
    doc_["outputs"] = nlohmann::json::array();
    doc_["results"] = nlohmann::json::object();
}

void Manifest::add_input(const std::string& path)
{
    doc_["inputs"].push_back({{"path", path}, {"fnv1a64", file_digest(path)}});
}

void Manifest::write(const std::string& path)
{
    doc_["finished_at"] = utc_timestamp();
    write_file_atomic(path, doc_.dump(2) + "\n");
}

} // namespace smoothrisk::cli
