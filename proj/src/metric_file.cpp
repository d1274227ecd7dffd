#include "mcube/metric_file.hpp"

#include "mcube/errors.hpp"

#include <zlib.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace mcube {

static_assert(std::endian::native == std::endian::little, "metric files are written in host byte order");

namespace {

constexpr char kMagic[8] = {'M', 'C', 'M', 'E', 'T', 'R', 'I', 'C'};
constexpr int kVersion = 1;
const char* const kComponents[6] = {"xx", "xy", "xz", "yy", "yz", "zz"};

std::uint32_t block_crc(const MetricField& f)
{
    uLong crc = crc32(0L, Z_NULL, 0);
    for (const auto& v : f.c)
        crc = crc32(crc, reinterpret_cast<const Bytef*>(v.data()), static_cast<uInt>(v.size() * sizeof(double)));
    return static_cast<std::uint32_t>(crc);
}

}  // namespace

void write_metric_file(const std::string& path, const MetricFile& m)
{
    const std::size_t nodes = static_cast<std::size_t>(m.N) * m.N * m.N;
    nlohmann::json man;
    man["format"] = "mcm";
    man["version"] = kVersion;
    man["manifold"] = m.structure.name;
    man["N"] = m.N;
    man["L"] = m.structure.L;
    man["partition"] = {{"k", m.partition.k}, {"l", m.partition.l}};
    man["components"] = nlohmann::json::array();
    for (const char* c : kComponents) man["components"].push_back(c);
    man["regions"] = nlohmann::json::array();
    for (const auto& r : m.structure.regions) man["regions"].push_back(r.id);
    man["stages"] = nlohmann::json::array();
    man["blocks"] = nlohmann::json::array();
    for (const auto& st : m.stages) {
        man["stages"].push_back(stage_name(st.stage));
        if (static_cast<int>(st.g.size()) != m.structure.region_count())
            throw std::invalid_argument("stage " + stage_name(st.stage) + " has the wrong number of regions");
        for (const auto& f : st.g) {
            if (f.N != m.N) throw std::invalid_argument("metric field resolution does not match N");
            man["blocks"].push_back({{"stage", stage_name(st.stage)},
                                     {"region", m.structure.regions[f.region].id},
                                     {"crc32", block_crc(f)}});
        }
    }
    man["structure"] = structure_to_json(m.structure);
    const std::string text = man.dump();

    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + path);
        os.write(kMagic, 8);
        const std::uint64_t len = text.size();
        os.write(reinterpret_cast<const char*>(&len), sizeof len);
        os.write(text.data(), static_cast<std::streamsize>(text.size()));
        for (const auto& st : m.stages)
            for (const auto& f : st.g)
                for (const auto& v : f.c) {
                    if (v.size() != nodes) throw std::invalid_argument("metric component has the wrong size");
                    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(nodes * sizeof(double)));
                }
        if (!os) throw std::runtime_error("write failed: " + path);
    }
    std::filesystem::rename(tmp, path);
}

void write_metric_file(const std::string& path, const C1Result& r, const MulticubeStructure& s,
                       const PartitionParams& p)
{
    MetricFile m;
    m.structure = s;
    m.N = r.N;
    m.partition = p;
    m.stages = r.stages;
    write_metric_file(path, m);
}

MetricFile read_metric_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open metric file " + path);
    char magic[8];
    std::uint64_t len = 0;
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw ValidationError(path + ": not a metric file");
    if (!is.read(reinterpret_cast<char*>(&len), sizeof len) || len > (1u << 30))
        throw ValidationError(path + ": truncated header");
    std::string text(len, '\0');
    if (!is.read(text.data(), static_cast<std::streamsize>(len))) throw ValidationError(path + ": truncated manifest");

    MetricFile m;
    nlohmann::json man;
    try {
        man = nlohmann::json::parse(text);
        if (man.at("format") != "mcm" || man.at("version").get<int>() != kVersion)
            throw ValidationError(path + ": unsupported format or version");
        m.structure = structure_from_json(man.at("structure"));
        m.N = man.at("N").get<int>();
        m.partition.k = man.at("partition").at("k").get<int>();
        m.partition.l = man.at("partition").at("l").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": bad manifest: " + e.what());
    }
    if (m.N < 2 || m.N > 4096) throw ValidationError(path + ": bad resolution");

    const auto& blocks = man.at("blocks");
    const std::size_t nodes = static_cast<std::size_t>(m.N) * m.N * m.N;
    std::size_t b = 0;
    for (const auto& sname : man.at("stages")) {
        StageFields st;
        st.stage = parse_stage(sname.get<std::string>());
        for (int r = 0; r < m.structure.region_count(); ++r, ++b) {
            if (b >= blocks.size()) throw ValidationError(path + ": missing block entries");
            MetricField f(r, m.N);
            for (auto& v : f.c)
                if (!is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(nodes * sizeof(double))))
                    throw ValidationError(path + ": truncated data");
            if (blocks[b].at("crc32").get<std::uint32_t>() != block_crc(f))
                throw ValidationError(path + ": checksum mismatch in stage " + sname.get<std::string>() + ", region " +
                                      m.structure.regions[r].id);
            st.g.push_back(std::move(f));
        }
        m.stages.push_back(std::move(st));
    }
    return m;
}

}  // namespace mcube
