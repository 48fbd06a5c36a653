#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "volcast/dates.hpp"

namespace volcast {

enum class Frequency { daily, weekly, monthly };

enum class Transform { log_return, log_diff, simple_diff, level, arcsinh_diff };

std::string to_string(Transform t);
Transform transform_from_string(const std::string& s);

/// One raw input series: strictly increasing dates, finite values.
struct RawSeries {
    std::string name;
    std::vector<Date> dates;
    std::vector<double> values;
    Frequency native_frequency = Frequency::daily;

    std::size_t size() const { return dates.size(); }

    /// Throws unless dates are strictly increasing, values are finite and
    /// there are at least 2 observations.
    void validate() const;
};

/// Date-indexed matrix of series sharing one daily calendar. After
/// alignment there are no missing cells; after transformation every
/// column carries its transform tag.
struct AlignedPanel {
    std::vector<Date> dates;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;  // one vector per name, same length as dates
    std::vector<Transform> tags;               // per column; `level` until transformed

    std::size_t rows() const { return dates.size(); }
    std::size_t cols() const { return names.size(); }

    const std::vector<double>& column(const std::string& name) const;
    std::size_t column_index(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

/// Infer a frequency from the median day gap between observations.
Frequency infer_frequency(const std::vector<Date>& dates);

/// Align series onto a daily calendar by forward fill: each calendar day
/// takes the latest observation at or before it. Days before the latest
/// first-observation date across all series are trimmed so no column has
/// a leading gap. A series with no observation at or before the end of
/// the calendar, or whose range is disjoint from it, is rejected.
AlignedPanel align_daily(const std::vector<RawSeries>& series,
                         const std::vector<Date>& calendar);

struct TransformOptions {
    /// Columns allowed to fall back to arcsinh differences when a log
    /// transform meets a nonpositive level. Default: reject instead.
    std::set<std::string> arcsinh_fallback;
};

/// Apply per-column first-difference transforms. The output panel loses
/// its first row. log_return/log_diff columns hold ln(x_t) - ln(x_{t-1});
/// simple_diff holds x_t - x_{t-1}; level columns are passed through
/// (minus the first row) unchanged.
AlignedPanel transform(const AlignedPanel& panel,
                       const std::map<std::string, Transform>& tags,
                       const TransformOptions& options = {});

}  // namespace volcast
