#include "catch_amalgamated.hpp"

#include "support.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <complex>
#include <random>
#include <sstream>

using namespace cqnc;
using namespace cqnc::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Drift matrix typed in row by row from the linearized equations of motion.
std::array<std::array<double, 6>, 6> drift_template(const ModelParams& p)
{
    const double kc = p.kappa_c / 2.0;
    const double ka = p.kappa_a / 2.0;
    const double dm = p.g_bs - p.g_dc;
    const double sp = p.g_bs + p.g_dc;
    return {{
        {-kc, 0.0, 0.0, dm, 0.0, 0.0},
        {0.0, -kc, -sp, 0.0, -p.g, 0.0},
        {0.0, dm, -ka, p.detuning, 0.0, 0.0},
        {-sp, 0.0, -p.detuning, -ka, 0.0, 0.0},
        {0.0, 0.0, 0.0, 0.0, 0.0, p.omega_m},
        {-p.g, 0.0, 0.0, 0.0, -p.omega_m, -p.gamma_m},
    }};
}

// Characteristic polynomial coefficients c[0..6] (c[6] = 1) by Faddeev-LeVerrier.
std::array<double, 7> characteristic_polynomial(const RealMatrix6& m)
{
    std::array<double, 7> c{};
    c[6] = 1.0;
    RealMatrix6 mk = RealMatrix6::Zero();
    const RealMatrix6 id = RealMatrix6::Identity();
    for (int k = 1; k <= 6; ++k) {
        mk = m * (mk + c[7 - k] * id);
        c[6 - k] = -mk.trace() / k;
    }
    return c;
}

// Durand-Kerner iteration for the roots of a monic polynomial.
std::array<std::complex<double>, 6> polynomial_roots(const std::array<double, 7>& c)
{
    double radius = 0.0;
    for (int k = 0; k < 6; ++k) radius = std::max(radius, std::pow(std::abs(c[k]), 1.0 / (6 - k)));
    radius = 2.0 * std::max(radius, 1e-300);

    std::array<std::complex<double>, 6> z;
    const std::complex<double> seed(0.4, 0.9);
    for (int k = 0; k < 6; ++k) z[k] = radius * std::pow(seed, k) / std::abs(std::pow(seed, k));
    auto eval = [&](std::complex<double> x) {
        std::complex<double> v = 1.0;
        for (int k = 5; k >= 0; --k) v = v * x + c[k];
        return v;
    };
    for (int iter = 0; iter < 5000; ++iter) {
        double change = 0.0;
        for (int i = 0; i < 6; ++i) {
            std::complex<double> denom = 1.0;
            for (int j = 0; j < 6; ++j) {
                if (j != i) denom *= z[i] - z[j];
            }
            const std::complex<double> step = eval(z[i]) / denom;
            z[i] -= step;
            change = std::max(change, std::abs(step) / radius);
        }
        if (change < 1e-15) break;
    }
    return z;
}

} // namespace

TEST_CASE("drift and noise matrices match the equations of motion")
{
    std::mt19937_64 rng(11);
    for (int draw = 0; draw < 20; ++draw) {
        const ModelParams p = random_model(rng);
        const StateSpace ss = build_matrices(p);
        const auto expected = drift_template(p);
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) CHECK(ss.drift(i, j) == expected[i][j]);
        }
        const std::array<double, 6> a_diag{-std::sqrt(p.kappa_c), -std::sqrt(p.kappa_c), -std::sqrt(p.kappa_a),
                                           -std::sqrt(p.kappa_a), 0.0, std::sqrt(p.gamma_m)};
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) CHECK(ss.noise(i, j) == (i == j ? a_diag[i] : 0.0));
        }
    }
}

TEST_CASE("matrix dump is row-major with full precision")
{
    const StateSpace ss = build_matrices(design_model());
    std::ostringstream os;
    dump(os, ss);
    std::istringstream in(os.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "# M");
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            double v = 0.0;
            in >> v;
            CHECK(v == ss.drift(i, j));
        }
    }
    in >> std::ws;
    std::getline(in, header);
    CHECK(header == "# A");
}

TEST_CASE("decoupled meter reflects with unit modulus")
{
    ModelParams p = unit_model(1e3, 0.1);
    p.g = p.g_bs = p.g_dc = 0.0;
    const StateSpace ss = build_matrices(p);
    const TransferMatrix t0 = transfer_matrix(ss, 0.0);
    CHECK_THAT(t0.entries(basis::p_c, basis::p_c).real(), WithinAbs(-1.0, 1e-14));
    CHECK_THAT(t0.entries(basis::p_c, basis::p_c).imag(), WithinAbs(0.0, 1e-14));
    for (double w : log_grid(1e-3, 1e5, 30)) {
        const TransferMatrix t = transfer_matrix(ss, w);
        CHECK_THAT(std::abs(t.entries(basis::p_c, basis::p_c)), WithinRel(1.0, 1e-12));
        const OutputSpectrumMatrix s = output_spectrum(t, input_spectrum(0.0));
        CHECK_THAT(s.s_pp(), WithinRel(0.5, 1e-12));
    }
}

TEST_CASE("structural invariants on random stable draws")
{
    std::mt19937_64 rng(23);
    int checked = 0;
    while (checked < 25) {
        const ModelParams p = random_model(rng);
        const StateSpace ss = build_matrices(p);
        if (!analyze_stability(ss).stable()) continue;
        ++checked;
        for (double w : log_grid(1e-2 * p.omega_m, 1e2 * p.omega_m, 15)) {
            const TransferMatrix tp = transfer_matrix(ss, w);
            const TransferMatrix tm = transfer_matrix(ss, -w);
            const TransferMatrix ti = transfer_matrix_by_inverse(ss, w);
            const double scale = tp.entries.cwiseAbs().maxCoeff();
            CHECK((tm.entries - tp.entries.conjugate()).cwiseAbs().maxCoeff() <= 1e-10 * scale);
            CHECK((ti.entries - tp.entries).cwiseAbs().maxCoeff() <= 1e-9 * scale);

            const OutputSpectrumMatrix sp = output_spectrum(tp, input_spectrum(p.nbar));
            const OutputSpectrumMatrix sm = output_spectrum(tm, input_spectrum(p.nbar));
            const double s_scale = std::max(1.0, sp.entries.cwiseAbs().maxCoeff());
            CHECK((sp.entries - sp.entries.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * s_scale);
            CHECK((sp.entries - sm.entries).cwiseAbs().maxCoeff() <= 1e-9 * s_scale);
            Eigen::SelfAdjointEigenSolver<RealMatrix6> es(sp.entries);
            CHECK(es.eigenvalues().minCoeff() >= -1e-12 * s_scale);
        }
    }
}

TEST_CASE("thermal input scales the force channel only")
{
    const ModelParams p = design_model();
    const StateSpace ss = build_matrices(p);
    const double w = 0.3 * p.omega_m;
    const TransferMatrix t = transfer_matrix(ss, w);
    const double s0 = output_spectrum(t, input_spectrum(0.0)).s_pp();
    const double s1 = output_spectrum(t, input_spectrum(1.0)).s_pp();
    const double force_gain = std::norm(t.entries(basis::p_c, basis::force_in));
    CHECK_THAT(s1 - s0, WithinRel(force_gain, 1e-9));

    ChannelMask only_force;
    only_force.set(basis::force_in);
    const double sf = output_spectrum(t, input_spectrum(1.0, only_force)).s_pp();
    CHECK_THAT(sf, WithinRel(force_gain, 1e-12));
}

TEST_CASE("eigen solver agrees with an independent characteristic-polynomial solve")
{
    std::mt19937_64 rng(5);
    std::vector<ModelParams> cases{design_model()};
    for (int i = 0; i < 15; ++i) cases.push_back(random_model(rng));
    for (const ModelParams& p : cases) {
        const StateSpace ss = build_matrices(p);
        const StabilityReport r = analyze_stability(ss);
        REQUIRE(r.solver_ok);
        const auto roots = polynomial_roots(characteristic_polynomial(ss.drift));
        double abscissa = -std::numeric_limits<double>::infinity();
        for (const auto& z : roots) abscissa = std::max(abscissa, z.real());
        const double scale = ss.drift.cwiseAbs().maxCoeff();
        CHECK(std::abs(abscissa - r.spectral_abscissa) <= 1e-6 * scale);
    }
}

TEST_CASE("design point is stable with the expected decay rates")
{
    const ModelParams p = design_model();
    const StabilityReport r = analyze_stability(build_matrices(p));
    REQUIRE(r.solver_ok);
    CHECK(r.stable());
    CHECK(r.spectral_abscissa < 0.0);
    CHECK_THAT(r.spectral_abscissa, WithinRel(-p.gamma_m / 2.0, 1e-3));
    CHECK_THAT(stability(build_matrices(p)), WithinRel(r.spectral_abscissa, 1e-15));
    for (std::size_t i = 1; i < r.eigenvalues.size(); ++i) {
        CHECK(r.eigenvalues[i - 1].real() >= r.eigenvalues[i].real());
    }
}

TEST_CASE("strong resonant down-conversion is unstable")
{
    ModelParams p = unit_model(1e3, 0.1, 1.0);
    p.detuning = 0.0;
    p.g_bs = 0.0;
    p.g_dc = 2.0;
    const StabilityReport r = analyze_stability(build_matrices(p));
    CHECK_FALSE(r.stable());
    CHECK(r.spectral_abscissa > 0.0);
}

TEST_CASE("resolvent singular at a lossless pole is reported")
{
    // gamma_m far below working precision: i w - M is singular at w = w_m.
    ModelParams p = unit_model(1e20, 0.1, 1.0);
    const StateSpace ss = build_matrices(p);
    try {
        (void)transfer_matrix(ss, p.omega_m);
        FAIL("expected SINGULAR_AT_OMEGA");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::singular_at_omega);
    }
    CHECK_NOTHROW(transfer_matrix(ss, 0.5 * p.omega_m));
}
