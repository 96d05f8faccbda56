#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sape {

// Axis-aligned box the coordinates of a task live in.
struct Domain {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const { return lo.size(); }

    static Domain cube(std::size_t d, double lo, double hi)
    {
        if (!(hi > lo))
            throw std::invalid_argument("Domain: hi must exceed lo");
        return {std::vector<double>(d, lo), std::vector<double>(d, hi)};
    }

    friend bool operator==(const Domain&, const Domain&) = default;
};

} // namespace sape
