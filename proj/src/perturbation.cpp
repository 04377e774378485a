#include "horizonlab/perturbation.hpp"

#include <cmath>

#include "horizonlab/csv.hpp"
#include "horizonlab/errors.hpp"
#include "horizonlab/rng.hpp"

namespace horizonlab {

void ErrorDistribution::validate() const {
    if (!(scale > 0.0)) throw ContractViolation("ErrorDistribution: scale must be positive");
}

namespace {

double draw_energy_error(Rng& rng, const ErrorDistribution& d) {
    switch (d.kind) {
        case ErrorKind::uniform: return rng.uniform(-d.scale, d.scale);
        case ErrorKind::gaussian: return d.scale * rng.gauss();
        case ErrorKind::fixed: return d.scale;
    }
    throw ValidationError("ErrorDistribution: unknown kind");
}

} // namespace

PerturbedSpectrum sample_perturbed(const SpectralModel& model, const ErrorDistribution& dist,
                                   double dE_coeff, SampleOptions opts) {
    model.validate();
    dist.validate();
    if (dE_coeff < 0.0)
        throw ContractViolation("sample_perturbed: dE_coeff must be nonnegative");

    const std::size_t dim = model.dim();
    Rng rng(dist.seed);

    PerturbedSpectrum p;
    p.epsilon = dE_coeff;
    p.energies_approx.resize(dim);
    for (std::size_t mu = 0; mu < dim; ++mu)
        p.energies_approx[mu] = model.energies[mu] + draw_energy_error(rng, dist);

    if (dE_coeff == 0.0) {
        p.coefficients_approx = model.coefficients;
    } else {
        // Draw dc in the disk of radius eps/3 per component, cap ||dc||_2 at
        // eps/3, then renormalize c+dc: this keeps |c~_mu - c_mu| < eps.
        std::vector<cplx> dc(dim);
        double nrm2 = 0.0;
        for (std::size_t mu = 0; mu < dim; ++mu) {
            dc[mu] = rng.in_disk(dE_coeff / 3.0);
            nrm2 += std::norm(dc[mu]);
        }
        const double nrm = std::sqrt(nrm2);
        const double shrink = (nrm > dE_coeff / 3.0) ? (dE_coeff / 3.0) / nrm : 1.0;
        p.coefficients_approx.resize(dim);
        double total = 0.0;
        for (std::size_t mu = 0; mu < dim; ++mu) {
            p.coefficients_approx[mu] = model.coefficients[mu] + shrink * dc[mu];
            total += std::norm(p.coefficients_approx[mu]);
        }
        const double inv = 1.0 / std::sqrt(total);
        for (cplx& z : p.coefficients_approx) z *= inv;
    }

    if (opts.with_residuals) {
        // R is sampled only on request; default propagation uses the diagonal
        // approximation. |R| stays strictly below eps.
        std::vector<cplx> R(dim * dim);
        const double r = 0.5 * dE_coeff;
        for (cplx& z : R) z = rng.in_disk(r);
        p.residuals = std::move(R);
    }

    validate_pairing(model, p);
    return p;
}

void validate_pairing(const SpectralModel& model, const PerturbedSpectrum& pert) {
    const std::size_t dim = model.dim();
    if (pert.dim() != dim || pert.coefficients_approx.size() != dim)
        throw DimensionError("PerturbedSpectrum: not paired with model");
    if (pert.epsilon > 0.0) {
        for (std::size_t mu = 0; mu < dim; ++mu)
            if (std::abs(pert.coefficients_approx[mu] - model.coefficients[mu]) >= pert.epsilon)
                throw ContractViolation("PerturbedSpectrum: |c~ - c| >= epsilon");
        if (pert.residuals) {
            if (pert.residuals->size() != dim * dim)
                throw DimensionError("PerturbedSpectrum: residual matrix shape");
            for (const cplx& r : *pert.residuals)
                if (std::abs(r) >= pert.epsilon)
                    throw ContractViolation("PerturbedSpectrum: |R| >= epsilon");
        }
    }
}

double energy_dispersion(const SpectralModel& model, const PerturbedSpectrum& pert) {
    const std::size_t dim = model.dim();
    if (dim == 0) throw DimensionError("energy_dispersion: empty model");
    if (pert.dim() != dim) throw DimensionError("energy_dispersion: unpaired spectra");
    double wsum = 0.0, mean = 0.0;
    for (std::size_t mu = 0; mu < dim; ++mu) {
        const double w = std::norm(model.coefficients[mu]);
        wsum += w;
        mean += w * (pert.energies_approx[mu] - model.energies[mu]);
    }
    mean /= wsum;
    double var = 0.0;
    for (std::size_t mu = 0; mu < dim; ++mu) {
        const double w = std::norm(model.coefficients[mu]);
        const double d = pert.energies_approx[mu] - model.energies[mu] - mean;
        var += w * d * d;
    }
    return std::sqrt(var / wsum);
}

namespace {

std::vector<cplx> mat_vec(const SymMatrix& H, std::span<const cplx> v) {
    std::vector<cplx> out(H.n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < H.n; ++i) {
        cplx s(0.0, 0.0);
        for (std::size_t j = 0; j < H.n; ++j) s += H.at(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double vec_norm(std::span<const cplx> a) {
    double s = 0.0;
    for (const cplx& z : a) s += std::norm(z);
    return std::sqrt(s);
}

} // namespace

double spectral_norm_estimate(const SymMatrix& H, std::size_t max_iters) {
    if (H.n == 0) throw DimensionError("spectral_norm_estimate: empty matrix");
    std::vector<cplx> v(H.n);
    for (std::size_t i = 0; i < H.n; ++i)
        v[i] = cplx(1.0 + 0.37 * double(i % 7), 0.0);  // fixed aperiodic start
    double nv = vec_norm(v);
    for (cplx& z : v) z /= nv;
    double est = 0.0;
    for (std::size_t it = 0; it < max_iters; ++it) {
        auto w = mat_vec(H, v);
        const double nw = vec_norm(w);
        if (nw == 0.0) return 0.0;
        const double prev = est;
        est = nw;
        for (std::size_t i = 0; i < H.n; ++i) v[i] = w[i] / nw;
        if (it > 4 && std::abs(est - prev) <= 1e-14 * est) break;
    }
    return est;
}

RayleighError rayleigh_energy_error(const SymMatrix& H, const WaveState& phi,
                                    std::span<const cplx> delta_phi) {
    if (phi.dim() != H.n || delta_phi.size() != H.n)
        throw DimensionError("rayleigh_energy_error: dimension mismatch");
    if (std::abs(phi.norm() - 1.0) > kNormTolOperation)
        throw ContractViolation("rayleigh_energy_error: phi must be normalized");

    const auto Hphi = mat_vec(H, phi.amplitudes);
    const double E = dot(phi.amplitudes, Hphi).real();

    // eigenvector precondition: ||H phi - E phi|| small on the matrix scale
    double res2 = 0.0;
    for (std::size_t i = 0; i < H.n; ++i) res2 += std::norm(Hphi[i] - E * phi.amplitudes[i]);
    if (std::sqrt(res2) > 1e-10 * std::max(1.0, H.frobenius()))
        throw ContractViolation("rayleigh_energy_error: phi is not an eigenvector of H");

    const auto Hd = mat_vec(H, delta_phi);
    RayleighError out;
    out.eigenvalue = E;
    out.value = 2.0 * E * dot(phi.amplitudes, delta_phi).real()
                + dot(delta_phi, Hd).real();
    const double eps = vec_norm(delta_phi);
    out.bound = 2.0 * std::abs(E) * eps + eps * eps * spectral_norm_estimate(H);
    return out;
}

void write_perturbed_csv(const std::filesystem::path& path, const SpectralModel& model,
                         const PerturbedSpectrum& pert) {
    if (model.dim() != pert.dim())
        throw DimensionError("write_perturbed_csv: unpaired spectra");
    csv::Writer w(path, {"mu", "energy_exact", "energy_approx", "re_c", "im_c",
                         "re_c_approx", "im_c_approx"});
    for (std::size_t mu = 0; mu < model.dim(); ++mu)
        w.row({csv::format_u64(mu), csv::format_double(model.energies[mu]),
               csv::format_double(pert.energies_approx[mu]),
               csv::format_double(model.coefficients[mu].real()),
               csv::format_double(model.coefficients[mu].imag()),
               csv::format_double(pert.coefficients_approx[mu].real()),
               csv::format_double(pert.coefficients_approx[mu].imag())});
    w.close();
}

} // namespace horizonlab
