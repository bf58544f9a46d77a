#pragma once

#include <filesystem>
#include <string>

#include "twave/pdesim.hpp"

namespace twave {

/// Write `content` to a temporary sibling and rename it over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Fixed-format number for CSV output (shortest round-trip form is not needed;
/// 12 significant digits keep files small and byte-stable).
std::string fmt(double v);

/// CSV with header `x,u,w,ur,ul`, one row per cell.
std::string snapshot_csv(const FieldPair& f, const Grid& grid);

void write_snapshot(const std::filesystem::path& path, const Snapshot& s, const Grid& grid);

}  // namespace twave
