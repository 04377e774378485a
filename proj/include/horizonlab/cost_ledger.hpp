#pragma once

#include <cstdint>

#include "horizonlab/errors.hpp"

namespace horizonlab {

// Bit-operation ledger at a declared mantissa length n: an addition costs n,
// a multiplication or division costs n^2. A transcendental evaluation bumps
// `evals` and charges a configurable number of multiplications (default 20),
// so the weighted total stays recomputable from the counters alone.
struct CostLedger {
    int mantissa_bits = 53;
    std::uint64_t adds = 0;
    std::uint64_t muls = 0;
    std::uint64_t divs = 0;
    std::uint64_t evals = 0;

    std::uint64_t model_cost() const {
        const auto n = static_cast<std::uint64_t>(mantissa_bits);
        return adds * n + (muls + divs) * n * n;
    }

    void charge(std::uint64_t na, std::uint64_t nm, std::uint64_t nd = 0) {
        adds += na;
        muls += nm;
        divs += nd;
    }

    void merge(const CostLedger& o) {
        if (o.mantissa_bits != mantissa_bits)
            throw ContractViolation("CostLedger::merge: mantissa length mismatch");
        adds += o.adds;
        muls += o.muls;
        divs += o.divs;
        evals += o.evals;
    }

    bool operator==(const CostLedger&) const = default;
};

inline constexpr int kDefaultTransMulEquiv = 20;

} // namespace horizonlab
