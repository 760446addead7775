#pragma once

#include <cstdint>
#include <string_view>

namespace wordlearn {

// One splitmix64 step: advances `state` and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

// Independent seed for a named stage or stream of a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);
std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index);

}  // namespace wordlearn
