#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace zbus {

enum class Phase : std::uint8_t { a = 0, b = 1, c = 2 };

inline constexpr std::array<Phase, 3> kAllPhases{Phase::a, Phase::b, Phase::c};

/// Cyclic successor a -> b -> c -> a, used to pair delta phases.
constexpr Phase right_shift(Phase phase) noexcept {
    switch (phase) {
        case Phase::a: return Phase::b;
        case Phase::b: return Phase::c;
        case Phase::c: return Phase::a;
    }
    return Phase::a;
}

constexpr std::size_t phase_position(Phase phase) noexcept {
    return static_cast<std::size_t>(phase);
}

constexpr char to_char(Phase phase) noexcept {
    return static_cast<char>('a' + static_cast<int>(phase));
}

constexpr std::optional<Phase> parse_phase(std::string_view text) noexcept {
    if (text == "a" || text == "A") return Phase::a;
    if (text == "b" || text == "B") return Phase::b;
    if (text == "c" || text == "C") return Phase::c;
    return std::nullopt;
}

}  // namespace zbus
