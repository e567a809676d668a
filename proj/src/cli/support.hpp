#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace smoothrisk::cli {

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex digits.
std::string file_digest(const std::string& path);

/// ISO-8601 UTC wall-clock timestamp.
std::string utc_timestamp();

std::string join_path(const std::string& dir, const std::string& name);

/// Registers options whose values may also come from the --config JSON file.
/// A value given on the command line wins; otherwise the key is looked up in
/// the command's section of the config, then at the top level.
class ConfigBinder {
  public:
    template <class T>
    CLI::Option* option(CLI::App* app, const std::string& flags, T& var, const std::string& help,
                        std::vector<std::string> keys)
    {
        CLI::Option* opt = app->add_option(flags, var, help);
        bindings_.push_back(Binding{app, opt, std::move(keys), [&var](const nlohmann::json& j) { var = j.get<T>(); },
                                    [&var] { return nlohmann::json(var); }});
        return opt;
    }

    CLI::Option* flag(CLI::App* app, const std::string& flags, bool& var, const std::string& help,
                      std::vector<std::string> keys);

    /// Fills unset options of `root` and `active` from `config`.
    void apply(const nlohmann::json& config, const CLI::App* root, const CLI::App* active) const;

    /// Bound values of `root` and `active` after parsing and config resolution.
    nlohmann::json resolved(const CLI::App* root, const CLI::App* active) const;

  private:
    struct Binding {
        CLI::App* app;
        CLI::Option* opt;
        std::vector<std::string> keys;
        std::function<void(const nlohmann::json&)> assign;
        std::function<nlohmann::json()> dump;
    };
    std::vector<Binding> bindings_;
};

/// Records how a run was produced: command, resolved configuration, seeds,
/// input digests, outputs and timestamps.
class Manifest {
  public:
    Manifest(std::string command, std::vector<std::string> argv);

    void set_config(nlohmann::json config) { doc_["config"] = std::move(config); }
    void add_seed(const std::string& name, std::uint64_t seed) { doc_["seeds"][name] = seed; }
    void add_input(const std::string& path);
    void add_output(const std::string& path) { doc_["outputs"].push_back(path); }
    nlohmann::json& extra() { return doc_["results"]; }

    /// Stamps the finish time and writes the manifest atomically.
    void write(const std::string& path);

  private:
    nlohmann::json doc_;
};

} // namespace smoothrisk::cli
