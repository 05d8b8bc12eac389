#ifndef SPECSECT_FAMILY_HPP
#define SPECSECT_FAMILY_HPP

#include <string>
#include <vector>

#include "specsect/types.hpp"

namespace specsect {

/// A parameter grid with one operator per node. A one-point
/// compactification of the parameter line is modelled by a
/// distinguished last node (`infinity_marker`). Generators that exhibit
/// tail obstructions may store heterogeneous per-operator tails; the
/// shared `tail_rule` then records the rule of the interior samples.
struct SampledFamily {
    std::vector<double> grid;  // strictly increasing finite parameters
    bool infinity_marker = false;
    std::vector<TruncatedOperator> operators;
    TailDescriptor tail_rule;
    std::string label;

    int size() const { return static_cast<int>(operators.size()); }
    int dim() const { return operators.empty() ? 0 : operators.front().dim; }

    void validate() const {
        const int nodes = static_cast<int>(grid.size()) + (infinity_marker ? 1 : 0);
        if (nodes != size())
            throw Error("bad_family", "grid and operator counts differ");
        if (operators.empty())
            throw Error("bad_family", "family has no samples");
        for (const auto& op : operators)
            if (op.dim != dim())
                throw Error("bad_family", "family operators have mixed dimensions");
        for (size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i - 1] < grid[i]))
                throw Error("bad_family", "grid is not strictly increasing");
    }
};

}  // namespace specsect

#endif
