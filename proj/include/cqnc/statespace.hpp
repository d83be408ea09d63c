#pragma once

// Exact linear input-output model: drift matrix M, noise matrix A, the
// transfer matrix P(w) = 1 - A (i w - M)^-1 A and symmetrized output spectra.

#include "cqnc/errors.hpp"
#include "cqnc/params.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bitset>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace cqnc {

using cplx = std::complex<double>;
using RealMatrix6 = Eigen::Matrix<double, 6, 6>;
using ComplexMatrix6 = Eigen::Matrix<cplx, 6, 6>;

// Fixed quadrature ordering shared by state, input and output vectors.
namespace basis {
inline constexpr int x_c = 0;
inline constexpr int p_c = 1;  // meter phase quadrature, the measured output
inline constexpr int x_a = 2;
inline constexpr int p_a = 3;
inline constexpr int x_m = 4;
inline constexpr int p_m = 5;
inline constexpr int size = 6;

// Input slots; slot x_m carries no noise and slot p_m carries f + F.
inline constexpr int force_in = p_m;

inline constexpr std::array<const char*, size> state_labels{"x_c", "p_c", "x_a", "p_a", "x_m", "p_m"};
inline constexpr std::array<const char*, size> input_labels{"x_c_in", "p_c_in", "x_a_in", "p_a_in", "-", "f+F"};
} // namespace basis

using ChannelMask = std::bitset<basis::size>;
inline const ChannelMask all_channels{0b111111};

struct StateSpace {
    RealMatrix6 drift = RealMatrix6::Zero();
    RealMatrix6 noise = RealMatrix6::Zero();
};

struct TransferMatrix {
    double omega = 0.0;
    ComplexMatrix6 entries = ComplexMatrix6::Identity();
};

struct OutputSpectrumMatrix {
    double omega = 0.0;
    RealMatrix6 entries = RealMatrix6::Zero();

    double s_pp() const { return entries(basis::p_c, basis::p_c); }
};

inline StateSpace build_matrices(const ModelParams& p)
{
    check(p);
    using namespace basis;
    const double bs_minus_dc = p.g_bs - p.g_dc;
    const double bs_plus_dc = p.g_bs + p.g_dc;

    StateSpace ss;
    RealMatrix6& m = ss.drift;
    m(x_c, x_c) = -p.kappa_c / 2.0;
    m(x_c, p_a) = bs_minus_dc;

    m(p_c, p_c) = -p.kappa_c / 2.0;
    m(p_c, x_a) = -bs_plus_dc;
    m(p_c, x_m) = -p.g;

    m(x_a, p_c) = bs_minus_dc;
    m(x_a, x_a) = -p.kappa_a / 2.0;
    m(x_a, p_a) = p.detuning;

    m(p_a, x_c) = -bs_plus_dc;
    m(p_a, x_a) = -p.detuning;
    m(p_a, p_a) = -p.kappa_a / 2.0;

    m(x_m, p_m) = p.omega_m;

    m(p_m, x_c) = -p.g;
    m(p_m, x_m) = -p.omega_m;
    m(p_m, p_m) = -p.gamma_m;

    RealMatrix6& a = ss.noise;
    a(x_c, x_c) = -std::sqrt(p.kappa_c);
    a(p_c, p_c) = -std::sqrt(p.kappa_c);
    a(x_a, x_a) = -std::sqrt(p.kappa_a);
    a(p_a, p_a) = -std::sqrt(p.kappa_a);
    a(p_m, p_m) = std::sqrt(p.gamma_m);
    return ss;
}

namespace detail {

inline ComplexMatrix6 resolvent_operand(const StateSpace& ss, double omega)
{
    ComplexMatrix6 op = -ss.drift.cast<cplx>();
    op.diagonal().array() += cplx(0.0, omega);
    return op;
}

inline void require_finite(const ComplexMatrix6& m, double omega)
{
    if (!m.allFinite()) {
        std::ostringstream os;
        os << "non-finite transfer matrix at omega=" << omega;
        throw Error(ErrorCode::singular_at_omega, os.str());
    }
}

} // namespace detail

/// P(w) via a full-pivot LU solve of (i w - M) X = A.
inline TransferMatrix transfer_matrix(const StateSpace& ss, double omega)
{
    const ComplexMatrix6 op = detail::resolvent_operand(ss, omega);
    Eigen::FullPivLU<ComplexMatrix6> lu(op);
    // Rank test relative to the largest pivot; (i w - M) is singular only at an undamped pole.
    lu.setThreshold(64.0 * std::numeric_limits<double>::epsilon());
    if (!lu.isInvertible()) {
        std::ostringstream os;
        os << "(i omega - M) is singular at omega=" << omega;
        throw Error(ErrorCode::singular_at_omega, os.str());
    }
    const ComplexMatrix6 a = ss.noise.cast<cplx>();
    TransferMatrix t;
    t.omega = omega;
    t.entries = ComplexMatrix6::Identity() - a * lu.solve(a);
    detail::require_finite(t.entries, omega);
    return t;
}

/// Same quantity through an explicit inverse; used only to cross-check the solve.
inline TransferMatrix transfer_matrix_by_inverse(const StateSpace& ss, double omega)
{
    const ComplexMatrix6 a = ss.noise.cast<cplx>();
    TransferMatrix t;
    t.omega = omega;
    t.entries = ComplexMatrix6::Identity() - a * detail::resolvent_operand(ss, omega).inverse() * a;
    detail::require_finite(t.entries, omega);
    return t;
}

/// Two-sided input spectrum 1/2 diag(1, 1, 1, 1, 0, 2 nbar).
inline OutputSpectrumMatrix input_spectrum(double nbar, const ChannelMask& channels = all_channels)
{
    detail::require_non_negative(nbar, "nbar");
    OutputSpectrumMatrix s;
    s.entries.diagonal() << 0.5, 0.5, 0.5, 0.5, 0.0, nbar;
    for (int k = 0; k < basis::size; ++k) {
        if (!channels.test(static_cast<std::size_t>(k))) s.entries(k, k) = 0.0;
    }
    return s;
}

/// Symmetrized S_out = 1/2 (P S_in P^dagger + c.c.), i.e. Re(P S_in P^dagger).
inline OutputSpectrumMatrix output_spectrum(const TransferMatrix& transfer, const OutputSpectrumMatrix& s_in)
{
    const ComplexMatrix6& p = transfer.entries;
    const ComplexMatrix6 full = p * s_in.entries.cast<cplx>() * p.adjoint();
    OutputSpectrumMatrix out;
    out.omega = transfer.omega;
    out.entries = full.real();
    // Exact symmetry; removes rounding asymmetry between (i, j) and (j, i).
    out.entries = (0.5 * (out.entries + out.entries.transpose())).eval();
    return out;
}

struct StabilityReport {
    std::array<cplx, basis::size> eigenvalues{};
    double spectral_abscissa = std::numeric_limits<double>::quiet_NaN();
    bool solver_ok = false;

    bool stable() const { return solver_ok && spectral_abscissa < 0.0; }
};

inline StabilityReport analyze_stability(const StateSpace& ss)
{
    StabilityReport report;
    Eigen::EigenSolver<RealMatrix6> solver(ss.drift, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) return report;
    const auto values = solver.eigenvalues();
    for (int k = 0; k < basis::size; ++k) report.eigenvalues[static_cast<std::size_t>(k)] = values(k);
    std::sort(report.eigenvalues.begin(), report.eigenvalues.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    report.spectral_abscissa = report.eigenvalues.front().real();
    report.solver_ok = true;
    return report;
}

/// Spectral abscissa of M; the system is stable iff the result is negative.
inline double stability(const StateSpace& ss)
{
    const StabilityReport r = analyze_stability(ss);
    if (!r.solver_ok) {
        throw Error(ErrorCode::unstable_system, "eigenvalue solver did not converge");
    }
    return r.spectral_abscissa;
}

/// Row-major plain-text dump, 17 significant digits.
inline void dump_matrix(std::ostream& os, const RealMatrix6& m)
{
    char buf[32];
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.16e", m(i, j));
            os << buf << (j + 1 < m.cols() ? " " : "\n");
        }
    }
}

inline void dump(std::ostream& os, const StateSpace& ss)
{
    os << "# M\n";
    dump_matrix(os, ss.drift);
    os << "# A\n";
    dump_matrix(os, ss.noise);
}

} // namespace cqnc
