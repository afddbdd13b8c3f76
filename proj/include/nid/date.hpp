// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace nid {

// Calendar day. Stored as days since 1970-01-01 so that arithmetic and
// ordering are plain integer operations.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days d) : days_(d.time_since_epoch().count()) {}

  static Date from_days(long days) {
    Date d;
    d.days_ = days;
    return d;
  }

  // Strict "YYYY-MM-DD"; nullopt on anything else, including 2020-02-30.
  static std::optional<Date> parse(std::string_view iso);

  std::string iso() const;
  long days() const { return days_; }
  std::chrono::sys_days sys() const { return std::chrono::sys_days{std::chrono::days{days_}}; }

  Date operator+(long n) const { return from_days(days_ + n); }
  long operator-(const Date& o) const { return days_ - o.days_; }

  auto operator<=>(const Date&) const = default;

 private:
  long days_ = 0;
};

}  // namespace nid
