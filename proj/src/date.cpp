#include "wikitools/date.hpp"

#include <cstdio>
#include <numeric>

#include "wikitools/core.hpp"

namespace wikitools {

namespace {

bool all_digits(std::string_view text) {
    for (char c : text) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    return !text.empty();
}

int to_int(std::string_view digits) {
    int value = 0;
    for (char c : digits) {
        value = value * 10 + (c - '0');
    }
    return value;
}

Date make_checked(int year, int month, int day, std::string_view source) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                          std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) {
        throw ToolkitError(ErrorKind::bad_input, "invalid date '" + std::string(source) + "'");
    }
    return Date(std::chrono::sys_days{ymd});
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok()) {
        throw ToolkitError(ErrorKind::bad_input, "invalid calendar date");
    }
    day_ = std::chrono::sys_days{ymd};
}

Date Date::parse_iso(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !all_digits(text.substr(0, 4)) ||
        !all_digits(text.substr(5, 2)) || !all_digits(text.substr(8, 2))) {
        throw ToolkitError(ErrorKind::bad_input, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
    }
    return make_checked(to_int(text.substr(0, 4)), to_int(text.substr(5, 2)), to_int(text.substr(8, 2)), text);
}

Date Date::parse_compact(std::string_view text) {
    if ((text.size() != 8 && text.size() != 10) || !all_digits(text)) {
        throw ToolkitError(ErrorKind::parse_failure, "expected YYYYMMDD[HH], got '" + std::string(text) + "'");
    }
    return make_checked(to_int(text.substr(0, 4)), to_int(text.substr(4, 2)), to_int(text.substr(6, 2)), text);
}

Date Date::today_utc() {
    return Date(std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now()));
}

std::string Date::iso() const {
    const std::chrono::year_month_day ymd{day_};
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buffer;
}

std::string Date::compact() const {
    const std::chrono::year_month_day ymd{day_};
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%04d%02u%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buffer;
}

int Date::days_since(Date other) const {
    return static_cast<int>((day_ - other.day_).count());
}

int inclusive_day_count(Date start, Date end) {
    return start > end ? 0 : end.days_since(start) + 1;
}

DailyCountSeries::DailyCountSeries(std::vector<DailyCount> points) : points_(std::move(points)) {
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i - 1].date < points_[i].date)) {
            throw ToolkitError(ErrorKind::parse_failure, "series dates not strictly increasing at " +
                                                             points_[i].date.iso());
        }
    }
}

DailyCountSeries DailyCountSeries::dense(Date start, Date end, const std::map<Date, std::uint64_t>& counts) {
    std::vector<DailyCount> points;
    points.reserve(static_cast<std::size_t>(inclusive_day_count(start, end)));
    for (Date day = start; day <= end; day = day + 1) {
        auto it = counts.find(day);
        points.push_back({day, it == counts.end() ? 0 : it->second});
    }
    return DailyCountSeries(std::move(points));
}

std::uint64_t DailyCountSeries::total() const noexcept {
    return std::accumulate(points_.begin(), points_.end(), std::uint64_t{0},
                           [](std::uint64_t sum, const DailyCount& p) { return sum + p.count; });
}

}  // namespace wikitools
