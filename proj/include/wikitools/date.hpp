#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace wikitools {

/// UTC calendar day.
class Date {
  public:
    Date() = default;
    explicit Date(std::chrono::sys_days day) : day_(day) {}
    Date(int year, unsigned month, unsigned day);

    /// `YYYY-MM-DD`
    static Date parse_iso(std::string_view text);
    /// `YYYYMMDD`, optionally followed by an hour (`YYYYMMDDHH`) as the
    /// pageviews API emits.
    static Date parse_compact(std::string_view text);
    static Date today_utc();

    [[nodiscard]] std::string iso() const;
    [[nodiscard]] std::string compact() const;
    [[nodiscard]] std::chrono::sys_days sys_days() const noexcept { return day_; }

    Date operator+(int days) const { return Date(day_ + std::chrono::days{days}); }
    Date operator-(int days) const { return Date(day_ - std::chrono::days{days}); }
    /// Signed number of days from `other` to this date.
    [[nodiscard]] int days_since(Date other) const;

    friend bool operator==(const Date&, const Date&) = default;
    friend auto operator<=>(const Date&, const Date&) = default;

  private:
    std::chrono::sys_days day_{};
};

/// Number of days in [start, end], 0 when start > end.
int inclusive_day_count(Date start, Date end);

struct DailyCount {
    Date date;
    std::uint64_t count = 0;

    friend bool operator==(const DailyCount&, const DailyCount&) = default;
};

/// Ordered (day, count) points with strictly increasing dates.
class DailyCountSeries {
  public:
    DailyCountSeries() = default;
    explicit DailyCountSeries(std::vector<DailyCount> points);

    /// One point per day in [start, end]; days absent from `counts` are 0 and
    /// days outside the interval are ignored.
    static DailyCountSeries dense(Date start, Date end, const std::map<Date, std::uint64_t>& counts);

    [[nodiscard]] const std::vector<DailyCount>& points() const noexcept { return points_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
    [[nodiscard]] std::uint64_t total() const noexcept;

    friend bool operator==(const DailyCountSeries&, const DailyCountSeries&) = default;

  private:
    std::vector<DailyCount> points_;
};

}  // namespace wikitools
