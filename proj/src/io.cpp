#include "conflab/io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include <json.hpp>

#include "conflab/errors.hpp"

namespace conflab {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kFieldSchema = "conflab-field/1";

void store_le(double v, unsigned char* out) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    if constexpr (std::endian::native == std::endian::big) {
        for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(bits >> (8 * i));
    } else {
        std::memcpy(out, &bits, sizeof(bits));
    }
}

double load_le(const unsigned char* in) {
    std::uint64_t bits = 0;
    if constexpr (std::endian::native == std::endian::big) {
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    } else {
        std::memcpy(&bits, in, sizeof(bits));
    }
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

}  // namespace

nlohmann::ordered_json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_config("cannot open \"" + path + "\"");
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail_config("\"" + path + "\": " + e.what());
    }
}

DumpPaths write_field_dump(const ScalarField& f, const std::string& name,
                           const std::string& base) {
    const ChartGrid& grid = *f.grid;
    DumpPaths paths{base + ".json", base + ".f64"};

    ordered_json header;
    header["schema"] = kFieldSchema;
    header["field"] = name;
    header["n"] = grid.dim();
    header["shape"] = grid.shape();
    header["lengths"] = grid.lengths();
    std::vector<bool> periodic;
    for (int ax = 0; ax < grid.dim(); ++ax) periodic.push_back(grid.periodic(ax));
    header["periodic"] = periodic;
    header["count"] = f.size();
    header["sidecar"] = fs::path(paths.sidecar).filename().string();

    std::ofstream hout(paths.header);
    if (!hout) fail_config("cannot write \"" + paths.header + "\"");
    hout << header.dump(2) << "\n";

    std::ofstream sout(paths.sidecar, std::ios::binary);
    if (!sout) fail_config("cannot write \"" + paths.sidecar + "\"");
    std::vector<unsigned char> buf(static_cast<std::size_t>(f.size()) * 8);
    for (std::int64_t i = 0; i < f.size(); ++i)
        store_le(f[i], buf.data() + static_cast<std::size_t>(i) * 8);
    sout.write(reinterpret_cast<const char*>(buf.data()),
               static_cast<std::streamsize>(buf.size()));
    if (!sout) fail_config("short write to \"" + paths.sidecar + "\"");
    return paths;
}

ChartGrid grid_from_dump_header(const std::string& headerPath) {
    const ordered_json header = read_json_file(headerPath);
    try {
        if (header.at("schema").get<std::string>() != kFieldSchema)
            fail_config("\"" + headerPath + "\": not a field dump header");
        const int n = header.at("n").get<int>();
        const auto shape = header.at("shape").get<std::vector<int>>();
        const auto lengths = header.at("lengths").get<std::vector<double>>();
        const auto periodic = header.at("periodic").get<std::vector<bool>>();
        if (static_cast<int>(periodic.size()) != n)
            fail_config("\"" + headerPath + "\": periodic flags do not match n");
        for (int ax = 0; ax + 1 < n; ++ax)
            if (!periodic[static_cast<std::size_t>(ax)])
                fail_config("\"" + headerPath +
                            "\": only the last axis may be non-periodic");
        return periodic[static_cast<std::size_t>(n - 1)]
                   ? ChartGrid::torus(n, shape, lengths)
                   : ChartGrid::slab(n, shape, lengths);
    } catch (const nlohmann::json::exception& e) {
        fail_config("\"" + headerPath + "\": " + e.what());
    }
}

ScalarField read_field_dump(const ChartGrid& grid, const std::string& headerPath) {
    const ChartGrid described = grid_from_dump_header(headerPath);
    if (!grid.sameLayout(described))
        fail_config("\"" + headerPath + "\" describes a different grid");

    const ordered_json header = read_json_file(headerPath);
    std::string sidecarName;
    std::int64_t count = 0;
    try {
        sidecarName = header.at("sidecar").get<std::string>();
        count = header.at("count").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
        fail_config("\"" + headerPath + "\": " + e.what());
    }
    if (count != grid.nodeCount())
        fail_config("\"" + headerPath + "\": count does not match the grid");

    const fs::path sidecarPath = fs::path(headerPath).parent_path() / sidecarName;
    std::ifstream in(sidecarPath, std::ios::binary);
    if (!in) fail_config("cannot open \"" + sidecarPath.string() + "\"");
    std::vector<unsigned char> buf(static_cast<std::size_t>(count) * 8);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
        fail_config("\"" + sidecarPath.string() + "\" is shorter than the header count");

    ScalarField out(grid);
    for (std::int64_t i = 0; i < count; ++i)
        out[i] = load_le(buf.data() + static_cast<std::size_t>(i) * 8);
    return out;
}

void write_field_csv(const ScalarField& f, const std::string& path) {
    const ChartGrid& grid = *f.grid;
    std::ofstream out(path);
    if (!out) fail_config("cannot write \"" + path + "\"");
    out << std::setprecision(17);
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
        const auto c = grid.coord(i);
        for (int ax = 0; ax < grid.dim(); ++ax) out << c[static_cast<std::size_t>(ax)] << ",";
        out << f[i] << "\n";
    }
}

void write_midplane_csv(const ScalarField& f, const std::string& path) {
    const ChartGrid& grid = *f.grid;
    const int mid = grid.shape().back() / 2;
    std::ofstream out(path);
    if (!out) fail_config("cannot write \"" + path + "\"");
    out << std::setprecision(17);
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
        const auto c = grid.coord(i);
        if (c[static_cast<std::size_t>(grid.dim() - 1)] != mid) continue;
        const auto x = grid.position(i);
        for (int ax = 0; ax + 1 < grid.dim(); ++ax) out << x[static_cast<std::size_t>(ax)] << ",";
        out << f[i] << "\n";
    }
}

}  // namespace conflab
