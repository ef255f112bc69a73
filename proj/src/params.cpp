#include "dhawkes/params.hpp"

#include <cmath>
#include <stdexcept>

namespace dhawkes {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::M1: return "M1";
    case Variant::M2: return "M2";
    case Variant::M3: return "M3";
    case Variant::M4: return "M4";
    case Variant::M5: return "M5";
    case Variant::Custom: return "custom";
  }
  return "custom";
}

Variant parse_variant(std::string_view text) {
  if (text == "M1") return Variant::M1;
  if (text == "M2") return Variant::M2;
  if (text == "M3") return Variant::M3;
  if (text == "M4") return Variant::M4;
  if (text == "M5") return Variant::M5;
  if (text == "custom") return Variant::Custom;
  throw std::invalid_argument("unknown model variant '" + std::string(text) + "'");
}

bool variant_allows_harmonics(Variant v) { return v != Variant::M1 && v != Variant::M2; }

bool variant_has_psi(Variant v, int cls) {
  switch (v) {
    case Variant::M4: return true;
    case Variant::M5: return cls == 0;
    default: return false;
  }
}

void validate(const ModelParams& p) {
  validate(p.harmonic);
  for (int l = 0; l < 2; ++l) {
    if (!std::isfinite(p.eta[l]) || !(p.eta[l] > 0.0)) throw std::invalid_argument("decay rates must be positive");
    if (!std::isfinite(p.mu[l]) || !(p.mu[l] >= 0.0)) throw std::invalid_argument("reproduction numbers must be nonnegative");
    if (p.psi[l] && (!std::isfinite(*p.psi[l]) || !(*p.psi[l] > 0.0)))
      throw std::invalid_argument("dispersion parameters must be positive");
  }
  const Variant v = p.variant;
  if (v == Variant::Custom) return;
  const std::string name(to_string(v));
  if (!variant_allows_harmonics(v) && p.harmonic.harmonics() != 0)
    throw std::invalid_argument(name + " has no circadian terms (K must be 0)");
  if (v == Variant::M1 && (p.eta[0] != p.eta[1] || p.mu[0] != p.mu[1]))
    throw std::invalid_argument("M1 shares eta and mu between immigrants and offspring");
  for (int l = 0; l < 2; ++l) {
    if (variant_has_psi(v, l) != p.psi[l].has_value())
      throw std::invalid_argument(name + ": dispersion psi" + std::to_string(l + 1) +
                                  (variant_has_psi(v, l) ? " is required" : " must be absent"));
  }
}

}  // namespace dhawkes
