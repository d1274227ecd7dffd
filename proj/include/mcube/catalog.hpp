#pragma once

#include "mcube/structure.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mcube {

struct CatalogEntry {
    std::string name;      // lookup key, e.g. "poincare"
    std::string title;     // display name
    std::string geometry;  // geometrization class tag
    MulticubeStructure structure;
};

/// Names of all built-in structures, sorted.
std::vector<std::string> catalog_names();

/// Throws UsageError listing the known names when `name` is unknown.
CatalogEntry catalog_get(const std::string& name);

/// Structure JSON of an entry, including title and geometry.
nlohmann::json catalog_export(const std::string& name);

/// crc32 over every embedded file (name, NUL, text) in name order.
std::uint32_t catalog_checksum();

namespace detail {

struct EmbeddedFile {
    const char* name;
    const char* text;
};

const std::vector<EmbeddedFile>& embedded_catalog();

}  // namespace detail

}  // namespace mcube
