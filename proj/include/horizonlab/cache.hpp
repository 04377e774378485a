#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "horizonlab/cost_ledger.hpp"
#include "horizonlab/ritz.hpp"

namespace horizonlab {

// Content-addressed spectrum store keyed by (model, lambda, D, mantissa bits,
// solver tolerance). Files are ordinary spectrum CSVs (equal coefficients)
// plus a sidecar with the op counters, so cost scans replay cached solves
// deterministically.
class SpectrumCache {
public:
    explicit SpectrumCache(std::filesystem::path dir);

    struct Entry {
        std::vector<double> energies;
        CostLedger ledger;
    };

    std::optional<Entry> lookup(const ModelHamiltonian& h, std::size_t D, int bits) const;
    void store(const ModelHamiltonian& h, std::size_t D, int bits,
               std::span<const double> energies, const CostLedger& ledger);

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }
    const std::filesystem::path& dir() const { return dir_; }

    // HORIZONLAB_CACHE when set, otherwise fallback
    static std::filesystem::path resolve_dir(const std::filesystem::path& fallback);

private:
    std::filesystem::path entry_path(const ModelHamiltonian& h, std::size_t D, int bits) const;

    std::filesystem::path dir_;
    mutable std::size_t hits_ = 0;
    mutable std::size_t misses_ = 0;
};

} // namespace horizonlab
