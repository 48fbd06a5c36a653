#include "volcast/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace volcast {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_cell_number(const std::string& cell, std::size_t row, const std::string& col) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v))
        throw std::invalid_argument("csv: unparseable number '" + cell + "' at row " +
                                    std::to_string(row) + ", column '" + col + "'");
    return v;
}

}  // namespace

std::vector<RawSeries> load_csv(const std::string& path,
                                const std::map<std::string, std::string>& schema) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("csv: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("csv: empty file '" + path + "'");
    const auto header = split_row(line);
    if (header.empty()) throw std::invalid_argument("csv: empty header in '" + path + "'");

    // column index -> output series slot
    std::vector<int> slot(header.size(), -1);
    std::vector<RawSeries> series;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const auto it = schema.find(strip(header[c]));
        if (it == schema.end()) continue;
        slot[c] = static_cast<int>(series.size());
        series.push_back(RawSeries{it->second, {}, {}, Frequency::daily});
    }
    for (const auto& [csv_col, name] : schema) {
        (void)name;
        bool found = false;
        for (std::size_t c = 1; c < header.size(); ++c)
            if (strip(header[c]) == csv_col) found = true;
        if (!found)
            throw std::invalid_argument("csv: schema column '" + csv_col + "' not in header of '" +
                                        path + "'");
    }

    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (strip(line).empty()) continue;
        const auto cells = split_row(line);
        Date date;
        try {
            date = parse_date(strip(cells[0]));
        } catch (const std::exception& e) {
            throw std::invalid_argument("csv: row " + std::to_string(row) + ", column 'date': " +
                                        e.what());
        }
        for (std::size_t c = 1; c < header.size() && c < cells.size(); ++c) {
            if (slot[c] < 0) continue;
            const std::string cell = strip(cells[c]);
            if (cell.empty()) continue;  // missing: dropped per series
            const double v = parse_cell_number(cell, row, strip(header[c]));
            auto& s = series[static_cast<std::size_t>(slot[c])];
            s.dates.push_back(date);
            s.values.push_back(v);
        }
    }
    if (row == 0) throw std::invalid_argument("csv: no data rows in '" + path + "'");

    for (auto& s : series) {
        s.validate();
        s.native_frequency = infer_frequency(s.dates);
    }
    return series;
}

void write_panel_csv(const AlignedPanel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");
    out << "date";
    for (const auto& n : panel.names) out << ',' << n;
    out << '\n';
    char buf[64];
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        out << panel.dates[t].to_string();
        for (std::size_t c = 0; c < panel.cols(); ++c) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), panel.columns[c][t]);
            (void)ec;
            out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
        }
        out << '\n';
    }
}

void write_panel_manifest(const AlignedPanel& panel, const std::string& path) {
    nlohmann::json j;
    j["columns"] = nlohmann::json::array();
    for (std::size_t c = 0; c < panel.cols(); ++c)
        j["columns"].push_back({{"name", panel.names[c]}, {"transform", to_string(panel.tags[c])}});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("manifest: cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

AlignedPanel load_panel_csv(const std::string& csv_path, const std::string& manifest_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::invalid_argument("csv: cannot open '" + csv_path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("csv: empty file '" + csv_path + "'");
    const auto header = split_row(line);

    AlignedPanel panel;
    for (std::size_t c = 1; c < header.size(); ++c) {
        panel.names.push_back(strip(header[c]));
        panel.columns.emplace_back();
        panel.tags.push_back(Transform::level);
    }
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (strip(line).empty()) continue;
        const auto cells = split_row(line);
        if (cells.size() != header.size())
            throw std::invalid_argument("csv: row " + std::to_string(row) +
                                        " has wrong cell count in '" + csv_path + "'");
        panel.dates.push_back(parse_date(strip(cells[0])));
        for (std::size_t c = 1; c < cells.size(); ++c)
            panel.columns[c - 1].push_back(
                parse_cell_number(strip(cells[c]), row, strip(header[c])));
    }

    if (!manifest_path.empty()) {
        std::ifstream min(manifest_path);
        if (!min) throw std::invalid_argument("manifest: cannot open '" + manifest_path + "'");
        nlohmann::json j = nlohmann::json::parse(min);
        for (const auto& col : j.at("columns")) {
            const std::string name = col.at("name").get<std::string>();
            if (panel.has_column(name))
                panel.tags[panel.column_index(name)] =
                    transform_from_string(col.at("transform").get<std::string>());
        }
    }
    return panel;
}

}  // namespace volcast
