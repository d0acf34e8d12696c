#pragma once

/**
 * @file correlations.hpp
 * @brief Fully developed laminar closures for rectangular ducts.
 *
 * Nusselt numbers (constant wall temperature) follow the classical
 * rectangular-duct table (Shah & London; reproduced e.g. in Incropera,
 * Table 8.1): Nu = 2.98 for a square duct rising to 7.54 for parallel
 * plates. The Darcy friction factor uses the Shah & London fit of fRe
 * against the short/long side ratio.
 */

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>
#include <utility>

#include "recup/geometry.hpp"

namespace recup {

inline constexpr double laminar_reynolds_limit = 2300.0;

class OutOfModelError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

inline void require_laminar(double reynolds, const char* who) {
    if (!(reynolds > 0.0)) throw OutOfModelError(std::string(who) + ": Reynolds number must be positive");
    if (reynolds >= laminar_reynolds_limit) {
        throw OutOfModelError(std::string(who) + ": Re = " + std::to_string(reynolds) +
                              " is outside the laminar model (Re < 2300)");
    }
}

// Short/long side ratio in (0, 1].
inline double side_ratio(double aspect_ratio) {
    if (!(aspect_ratio > 0.0)) throw std::invalid_argument("aspect ratio must be positive");
    return aspect_ratio <= 1.0 ? aspect_ratio : 1.0 / aspect_ratio;
}

// (short/long, Nu_T); long/short = 1, 1.43, 2, 3, 4, 8, inf.
inline constexpr std::array<std::pair<double, double>, 7> nusselt_table{{
    {0.0, 7.54},
    {1.0 / 8.0, 5.60},
    {1.0 / 4.0, 4.44},
    {1.0 / 3.0, 3.96},
    {1.0 / 2.0, 3.39},
    {1.0 / 1.43, 3.08},
    {1.0, 2.98},
}};

}  // namespace detail

/// Table value for a side ratio, no regime check.
inline double laminar_nusselt(double aspect_ratio) {
    const double alpha = detail::side_ratio(aspect_ratio);
    const auto& table = detail::nusselt_table;
    for (std::size_t k = 1; k < table.size(); ++k) {
        if (alpha <= table[k].first) {
            const auto [x0, y0] = table[k - 1];
            const auto [x1, y1] = table[k];
            return y0 + (y1 - y0) * (alpha - x0) / (x1 - x0);
        }
    }
    return table.back().second;
}

inline double nusselt_for_aspect(double aspect_ratio, double reynolds) {
    detail::require_laminar(reynolds, "nusselt");
    return laminar_nusselt(aspect_ratio);
}

inline double nusselt(const Channel& channel, double reynolds) {
    return nusselt_for_aspect(channel.aspect_ratio, reynolds);
}

/// Laminar Poiseuille number fRe (Darcy) for a rectangular duct.
inline double poiseuille_number(double aspect_ratio) {
    const double a = detail::side_ratio(aspect_ratio);
    return 96.0 * (1.0 - a * (1.3553 - a * (1.9467 - a * (1.7012 - a * (0.9564 - a * 0.2537)))));
}

inline double friction_factor_for_aspect(double aspect_ratio, double reynolds) {
    detail::require_laminar(reynolds, "friction_factor");
    return poiseuille_number(aspect_ratio) / reynolds;
}

inline double friction_factor(const Channel& channel, double reynolds) {
    return friction_factor_for_aspect(channel.aspect_ratio, reynolds);
}

}  // namespace recup
