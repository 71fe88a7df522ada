#pragma once

// Finite-difference gradient oracle, independent of the tape's backward pass:
// every check re-runs the forward computation at perturbed inputs and compares
// central differences against the analytic gradients. Runs in double so the
// 1e-3 relative tolerance is limited by the analytics, not the oracle.

#include <functional>
#include <vector>

#include "doctest.h"
#include "ra3c/tape.hpp"

namespace gradtest {

using ra3c::TapeT;
using ra3c::TensorT;

using BuildFn = std::function<TapeT<double>::Id(TapeT<double>&, const std::vector<TapeT<double>::Id>&)>;

inline double rel_err(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-4});
    return std::abs(a - b) / scale;
}

// Checks d(loss)/d(input) for every coordinate of every input tensor.
// `coord_sample` > 0 checks only that many randomly chosen coordinates per
// input (for nets where full FD would be slow).
inline void check_gradients(std::vector<TensorT<double>> inputs, const BuildFn& build, double tol = 1e-3,
                            double h = 1e-5, int coord_sample = 0, uint64_t sample_seed = 17) {
    auto eval = [&](const std::vector<TensorT<double>>& vals) {
        TapeT<double> tape;
        std::vector<TapeT<double>::Id> ids;
        for (const auto& v : vals) ids.push_back(tape.leaf(v, true));
        const auto loss = build(tape, ids);
        return tape.val(loss).data[0];
    };

    TapeT<double> tape;
    std::vector<TapeT<double>::Id> ids;
    for (const auto& v : inputs) ids.push_back(tape.leaf(v, true));
    const auto loss = build(tape, ids);
    tape.backward(loss);

    ra3c::Rng pick(sample_seed);
    for (size_t t = 0; t < inputs.size(); ++t) {
        const TensorT<double> g = tape.grad(ids[t]);
        std::vector<size_t> coords;
        if (coord_sample > 0 && size_t(coord_sample) < inputs[t].count()) {
            for (int k = 0; k < coord_sample; ++k) coords.push_back(size_t(pick.uniform_int(int(inputs[t].count()))));
        } else {
            for (size_t i = 0; i < inputs[t].count(); ++i) coords.push_back(i);
        }
        for (size_t i : coords) {
            auto perturbed = inputs;
            perturbed[t].data[i] += h;
            const double up = eval(perturbed);
            perturbed[t].data[i] -= 2 * h;
            const double down = eval(perturbed);
            const double fd = (up - down) / (2 * h);
            INFO("input ", t, " coord ", i, " analytic ", g.data[i], " fd ", fd);
            CHECK(rel_err(g.data[i], fd) <= tol);
        }
    }
}

inline TensorT<double> random_tensor(std::vector<int> shape, ra3c::Rng& rng, double lo = -1, double hi = 1) {
    TensorT<double> t(std::move(shape));
    for (auto& v : t.data) v = rng.uniform(lo, hi);
    return t;
}

}  // namespace gradtest
