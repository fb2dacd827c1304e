#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace ebl {

enum class Country : int { home = 0, foreign = 1 };
enum class Age : int { young = 0, old = 1 };

inline constexpr std::array<Country, 2> kCountries{Country::home, Country::foreign};
inline constexpr std::array<Age, 2> kAges{Age::young, Age::old};

constexpr std::size_t idx(Country c) noexcept { return static_cast<std::size_t>(c); }
constexpr std::size_t idx(Age a) noexcept { return static_cast<std::size_t>(a); }

constexpr Country other(Country c) noexcept {
  return c == Country::home ? Country::foreign : Country::home;
}

constexpr std::string_view label(Country c) noexcept { return c == Country::home ? "H" : "F"; }

// A value per country, indexed by Country.
template <class T>
struct PerCountry {
  std::array<T, 2> v{};

  T& operator[](Country c) noexcept { return v[idx(c)]; }
  const T& operator[](Country c) const noexcept { return v[idx(c)]; }
};

// Realized outputs (y_H, y_F) at one date.
using OutputPair = PerCountry<double>;

inline OutputPair outputs(double home, double foreign) {
  OutputPair y;
  y[Country::home] = home;
  y[Country::foreign] = foreign;
  return y;
}

}  // namespace ebl
