#include "horizonlab/cache.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "horizonlab/csv.hpp"
#include "horizonlab/errors.hpp"
#include "horizonlab/sha256.hpp"

namespace horizonlab {

SpectrumCache::SpectrumCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
}

std::filesystem::path SpectrumCache::resolve_dir(const std::filesystem::path& fallback) {
    if (const char* env = std::getenv("HORIZONLAB_CACHE"); env && *env)
        return std::filesystem::path(env);
    return fallback;
}

std::filesystem::path SpectrumCache::entry_path(const ModelHamiltonian& h, std::size_t D,
                                                int bits) const {
    const std::string key = "model=" + model_name(h.kind) +
                            ";lambda=" + csv::format_double(h.coupling) +
                            ";omega=" + csv::format_double(h.omega) +
                            ";hbar=" + csv::format_double(h.hbar) +
                            ";D=" + csv::format_u64(D) +
                            ";bits=" + csv::format_u64(std::uint64_t(bits)) +
                            ";tol=1e-15";
    const std::string hash = sha256_hex(key);
    return dir_ / hash.substr(0, 2) / (hash + ".csv");
}

std::optional<SpectrumCache::Entry> SpectrumCache::lookup(const ModelHamiltonian& h,
                                                          std::size_t D, int bits) const {
    const auto path = entry_path(h, D, bits);
    const auto side = std::filesystem::path(path).replace_extension(".ledger.csv");
    if (!std::filesystem::exists(path) || !std::filesystem::exists(side)) {
        ++misses_;
        return std::nullopt;
    }
    Entry e;
    const csv::Table table = csv::read(path);
    const std::size_t ce = table.col("energy");
    for (std::size_t r = 0; r < table.size(); ++r) e.energies.push_back(table.num(r, ce));

    const csv::Table led = csv::read(side);
    if (led.size() != 1) throw FormatError("cache ledger sidecar must have one row");
    e.ledger.mantissa_bits = static_cast<int>(led.num(0, led.col("mantissa_bits")));
    e.ledger.adds = static_cast<std::uint64_t>(led.num(0, led.col("adds")));
    e.ledger.muls = static_cast<std::uint64_t>(led.num(0, led.col("muls")));
    e.ledger.divs = static_cast<std::uint64_t>(led.num(0, led.col("divs")));
    e.ledger.evals = static_cast<std::uint64_t>(led.num(0, led.col("evals")));
    ++hits_;
    return e;
}

void SpectrumCache::store(const ModelHamiltonian& h, std::size_t D, int bits,
                          std::span<const double> energies, const CostLedger& ledger) {
    const auto path = entry_path(h, D, bits);
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);

    // valid spectral_core spectrum file: equal coefficients 1/sqrt(dim)
    const double c = 1.0 / std::sqrt(double(energies.size()));
    csv::Writer w(path, {"mu", "energy", "re_c", "im_c"});
    for (std::size_t mu = 0; mu < energies.size(); ++mu)
        w.row({csv::format_u64(mu), csv::format_double(energies[mu]),
               csv::format_double(c), csv::format_double(0.0)});
    w.close();

    const auto side = std::filesystem::path(path).replace_extension(".ledger.csv");
    csv::Writer s(side, {"mantissa_bits", "adds", "muls", "divs", "evals"});
    s.row({csv::format_u64(std::uint64_t(ledger.mantissa_bits)), csv::format_u64(ledger.adds),
           csv::format_u64(ledger.muls), csv::format_u64(ledger.divs),
           csv::format_u64(ledger.evals)});
    s.close();
}

} // namespace horizonlab
