#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace vlogcues {

/// Calendar date with day resolution. Thin wrapper over sys_days so that
/// differences are plain day counts.
class Date {
public:
    Date() = default;
    explicit Date(std::chrono::sys_days days) : days_(days) {}
    Date(int year, unsigned month, unsigned day);

    /// Parses strict `YYYY-MM-DD`; returns nullopt on anything else,
    /// including impossible calendar dates like 2020-02-30.
    static std::optional<Date> parse(std::string_view text);

    /// Like parse() but throws InvalidInput.
    static Date from_iso(std::string_view text);

    std::string iso() const;

    std::chrono::sys_days days() const { return days_; }

    Date plus_days(long n) const { return Date(days_ + std::chrono::days(n)); }

    /// Signed number of days from `other` to *this.
    long days_since(const Date& other) const {
        return static_cast<long>((days_ - other.days_).count());
    }

    friend auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace vlogcues
