#pragma once

#include <map>
#include <string>
#include <vector>

#include "volcast/series.hpp"

namespace volcast {

/// Load raw series from a CSV file.
///
/// Layout: one header row `date,<col1>,<col2>,...`, ISO-8601 dates in the
/// first column, '.' decimal separator, ',' field separator, empty cell =
/// missing. `schema` maps CSV column header -> series name; unmapped
/// columns are ignored. Empty cells are dropped per series. Unparseable
/// dates or numbers are rejected with the offending row and column named.
std::vector<RawSeries> load_csv(const std::string& path,
                                const std::map<std::string, std::string>& schema);

/// Write a panel as `date,<name1>,...` CSV (full precision round-trip).
void write_panel_csv(const AlignedPanel& panel, const std::string& path);

/// Sidecar JSON manifest listing the transform tag per column.
void write_panel_manifest(const AlignedPanel& panel, const std::string& path);

/// Load a panel previously written by write_panel_csv/write_panel_manifest.
/// The manifest is optional; without it all tags default to `level`.
AlignedPanel load_panel_csv(const std::string& csv_path,
                            const std::string& manifest_path = "");

}  // namespace volcast
