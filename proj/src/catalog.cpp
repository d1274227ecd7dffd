#include "mcube/catalog.hpp"

#include "mcube/errors.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>

namespace mcube {

namespace {

const detail::EmbeddedFile* find_file(const std::string& name)
{
    for (const auto& f : detail::embedded_catalog())
        if (name == f.name) return &f;
    return nullptr;
}

std::string joined_names()
{
    std::string out;
    for (const auto& n : catalog_names()) {
        if (!out.empty()) out += ", ";
        out += n;
    }
    return out;
}

}  // namespace

std::vector<std::string> catalog_names()
{
    std::vector<std::string> names;
    for (const auto& f : detail::embedded_catalog()) names.emplace_back(f.name);
    std::sort(names.begin(), names.end());
    return names;
}

CatalogEntry catalog_get(const std::string& name)
{
    const auto* f = find_file(name);
    if (!f) throw UsageError("unknown catalog entry '" + name + "' (available: " + joined_names() + ")");
    auto j = nlohmann::json::parse(f->text);
    CatalogEntry e;
    e.name = name;
    e.title = j.value("title", name);
    e.geometry = j.value("geometry", "");
    e.structure = structure_from_json(j);
    if (e.structure.name.empty()) e.structure.name = name;
    return e;
}

nlohmann::json catalog_export(const std::string& name)
{
    auto e = catalog_get(name);
    auto j = structure_to_json(e.structure);
    j["title"] = e.title;
    j["geometry"] = e.geometry;
    return j;
}

std::uint32_t catalog_checksum()
{
    std::vector<const detail::EmbeddedFile*> files;
    for (const auto& f : detail::embedded_catalog()) files.push_back(&f);
    std::sort(files.begin(), files.end(),
              [](const auto* a, const auto* b) { return std::strcmp(a->name, b->name) < 0; });
    uLong crc = crc32(0L, Z_NULL, 0);
    for (const auto* f : files) {
        crc = crc32(crc, reinterpret_cast<const Bytef*>(f->name), static_cast<uInt>(std::strlen(f->name) + 1));
        crc = crc32(crc, reinterpret_cast<const Bytef*>(f->text), static_cast<uInt>(std::strlen(f->text)));
    }
    return static_cast<std::uint32_t>(crc);
}

}  // namespace mcube
