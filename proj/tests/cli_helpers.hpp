#pragma once

#include "cli/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace clitest {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

inline Outcome run(std::vector<std::string> args)
{
    args.insert(args.begin(), "smoothrisk");
    std::ostringstream out;
    std::ostringstream err;
    const int code = smoothrisk::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        rows.push_back(cells);
    }
    return rows;
}

/// Fresh scratch directory under `root`.
inline std::filesystem::path scratch(const std::filesystem::path& root, const std::string& name)
{
    const std::filesystem::path dir = root / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path default_root()
{
    if (const char* env = std::getenv("SMOOTHRISK_TEST_TMP")) {
        return env;
    }
    return std::filesystem::temp_directory_path() / "smoothrisk_cli_tests";
}

} // namespace clitest
