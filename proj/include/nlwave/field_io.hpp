#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nlwave/grid.hpp"
#include "nlwave/timeline.hpp"

namespace nlwave {

// Binary field format: little-endian float64 pairs (re, im), mode-major,
// channel-minor — snapshot k, then flat mode index, then channel. A JSON
// sidecar carries {format_version, grid, channels, snapshots, K, T, space}.

void write_field_binary(const std::string& path, const Field& f);
Field read_field_binary(const std::string& path,
                        std::shared_ptr<const Grid> grid, int channels,
                        Space space);

// Writes <stem>_u.bin, <stem>_ut.bin and <stem>_meta.json under dir.
void write_timeline_binary(const std::string& dir, const std::string& stem,
                           const SolutionTimeline& sol);

// Reads the pair back; the grid is rebuilt from the sidecar.
SolutionTimeline read_timeline_binary(const std::string& dir,
                                      const std::string& stem);

}  // namespace nlwave
