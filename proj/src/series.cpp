#include "volcast/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace volcast {

std::string to_string(Transform t) {
    switch (t) {
        case Transform::log_return: return "log_return";
        case Transform::log_diff: return "log_diff";
        case Transform::simple_diff: return "simple_diff";
        case Transform::level: return "level";
        case Transform::arcsinh_diff: return "arcsinh_diff";
    }
    return "level";
}

Transform transform_from_string(const std::string& s) {
    if (s == "log_return") return Transform::log_return;
    if (s == "log_diff") return Transform::log_diff;
    if (s == "simple_diff") return Transform::simple_diff;
    if (s == "level") return Transform::level;
    if (s == "arcsinh_diff") return Transform::arcsinh_diff;
    throw std::invalid_argument("unknown transform tag '" + s + "'");
}

void RawSeries::validate() const {
    if (dates.size() != values.size())
        throw std::invalid_argument("series '" + name + "': dates/values length mismatch");
    if (dates.size() < 2)
        throw std::invalid_argument("series '" + name + "': needs at least 2 observations");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw std::invalid_argument("series '" + name + "': non-finite value at " +
                                        dates[i].to_string());
        if (i > 0 && !(dates[i - 1] < dates[i]))
            throw std::invalid_argument("series '" + name + "': dates not strictly increasing at " +
                                        dates[i].to_string());
    }
}

const std::vector<double>& AlignedPanel::column(const std::string& name) const {
    return columns[column_index(name)];
}

std::size_t AlignedPanel::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    throw std::invalid_argument("panel has no column '" + name + "'");
}

bool AlignedPanel::has_column(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

Frequency infer_frequency(const std::vector<Date>& dates) {
    if (dates.size() < 2) return Frequency::daily;
    std::vector<std::int64_t> gaps;
    gaps.reserve(dates.size() - 1);
    for (std::size_t i = 1; i < dates.size(); ++i)
        gaps.push_back(dates[i].serial() - dates[i - 1].serial());
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    const std::int64_t median = gaps[gaps.size() / 2];
    if (median <= 3) return Frequency::daily;
    if (median <= 10) return Frequency::weekly;
    return Frequency::monthly;
}

AlignedPanel align_daily(const std::vector<RawSeries>& series,
                         const std::vector<Date>& calendar) {
    if (calendar.empty()) throw std::invalid_argument("align_daily: empty calendar");
    if (series.empty()) throw std::invalid_argument("align_daily: no series");
    for (std::size_t i = 1; i < calendar.size(); ++i)
        if (!(calendar[i - 1] < calendar[i]))
            throw std::invalid_argument("align_daily: calendar not strictly increasing");

    // Panel start: latest first-observation date, so no column has a gap.
    Date start = calendar.front();
    for (const auto& s : series) {
        s.validate();
        if (s.dates.front() > calendar.back() || s.dates.back() < calendar.front())
            throw std::invalid_argument("align_daily: series '" + s.name +
                                        "' does not overlap the calendar");
        start = std::max(start, s.dates.front());
    }
    if (start > calendar.back())
        throw std::invalid_argument("align_daily: no calendar day on or after all series starts");

    AlignedPanel panel;
    for (const Date& d : calendar)
        if (!(d < start)) panel.dates.push_back(d);

    for (const auto& s : series) {
        std::vector<double> col;
        col.reserve(panel.dates.size());
        std::size_t j = 0;  // index of next observation
        double last = 0.0;
        bool seen = false;
        for (const Date& d : panel.dates) {
            while (j < s.size() && !(d < s.dates[j])) {
                last = s.values[j];
                seen = true;
                ++j;
            }
            if (!seen)
                throw std::invalid_argument("align_daily: series '" + s.name +
                                            "' has no observation at or before " + d.to_string());
            col.push_back(last);
        }
        panel.names.push_back(s.name);
        panel.columns.push_back(std::move(col));
        panel.tags.push_back(Transform::level);
    }
    return panel;
}

AlignedPanel transform(const AlignedPanel& panel,
                       const std::map<std::string, Transform>& tags,
                       const TransformOptions& options) {
    if (panel.rows() < 2)
        throw std::invalid_argument("transform: panel needs at least 2 rows");
    for (const auto& [name, tag] : tags) {
        (void)tag;
        if (!panel.has_column(name))
            throw std::invalid_argument("transform: unknown column '" + name + "'");
    }

    AlignedPanel out;
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    for (std::size_t c = 0; c < panel.cols(); ++c) {
        const std::string& name = panel.names[c];
        const auto it = tags.find(name);
        Transform tag = it == tags.end() ? Transform::level : it->second;
        const std::vector<double>& x = panel.columns[c];

        const bool is_log = tag == Transform::log_return || tag == Transform::log_diff;
        if (is_log) {
            for (std::size_t t = 0; t < x.size(); ++t) {
                if (x[t] <= 0.0) {
                    if (options.arcsinh_fallback.count(name)) {
                        tag = Transform::arcsinh_diff;
                        break;
                    }
                    throw std::invalid_argument(
                        "transform: column '" + name + "' has nonpositive level " +
                        std::to_string(x[t]) + " at " + panel.dates[t].to_string() +
                        " under a log transform; configure an arcsinh fallback or use "
                        "simple_diff");
                }
            }
        }

        std::vector<double> col(x.size() - 1);
        switch (tag) {
            case Transform::log_return:
            case Transform::log_diff:
                for (std::size_t t = 1; t < x.size(); ++t)
                    col[t - 1] = std::log(x[t]) - std::log(x[t - 1]);
                break;
            case Transform::arcsinh_diff:
                for (std::size_t t = 1; t < x.size(); ++t)
                    col[t - 1] = std::asinh(x[t]) - std::asinh(x[t - 1]);
                break;
            case Transform::simple_diff:
                for (std::size_t t = 1; t < x.size(); ++t) col[t - 1] = x[t] - x[t - 1];
                break;
            case Transform::level:
                for (std::size_t t = 1; t < x.size(); ++t) col[t - 1] = x[t];
                break;
        }
        out.names.push_back(name);
        out.columns.push_back(std::move(col));
        out.tags.push_back(tag);
    }
    return out;
}

}  // namespace volcast
