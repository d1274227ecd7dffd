#pragma once

#include "mcube/pipeline.hpp"

#include <string>
#include <vector>

namespace mcube {

/// Contents of a .mcm file.
struct MetricFile {
    MulticubeStructure structure;
    int N = 0;
    PartitionParams partition;
    std::vector<StageFields> stages;
};

/// Layout: 8-byte magic "MCMETRIC", u64 manifest length, JSON manifest, then
/// one block per (stage, region) in manifest order. A block holds the six
/// components xx,xy,xz,yy,yz,zz one after another, each N^3 little-endian
/// doubles with the x index fastest. The manifest records each block's crc32.
void write_metric_file(const std::string& path, const MetricFile& m);
void write_metric_file(const std::string& path, const C1Result& r, const MulticubeStructure& s,
                       const PartitionParams& p);

/// Throws ValidationError on a bad magic, manifest or checksum.
MetricFile read_metric_file(const std::string& path);

}  // namespace mcube
