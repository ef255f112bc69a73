#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "dhawkes/harmonic.hpp"

namespace dhawkes {

/// Candidate model family.
///   M1: one decay rate and reproduction number, flat activity, Poisson offspring.
///   M2: separate immigrant/offspring rates, flat activity, Poisson offspring.
///   M3: M2 plus circadian activity.
///   M4: M3 plus Gamma-distributed reproduction numbers for both classes.
///   M5: M3 plus Gamma-distributed reproduction numbers for immigrants only.
enum class Variant { M1, M2, M3, M4, M5, Custom };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);

/// Index 0 holds the immigrant class, index 1 the offspring class.
struct ModelParams {
  HarmonicSpec harmonic;
  std::array<double, 2> eta{1.0, 1.0};
  std::array<double, 2> mu{0.5, 0.5};
  std::array<std::optional<double>, 2> psi{};  // empty: Poisson offspring for that class
  Variant variant = Variant::Custom;

  bool operator==(const ModelParams&) const = default;
};

/// Positivity, finiteness, and the structural constraints of the variant.
void validate(const ModelParams& p);

bool variant_allows_harmonics(Variant v);
bool variant_has_psi(Variant v, int cls);

}  // namespace dhawkes
