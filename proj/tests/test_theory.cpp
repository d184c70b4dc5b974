#include <doctest.h>

#include <cmath>

#include "ztpc/errors.hpp"
#include "ztpc/theory.hpp"

using namespace ztpc;

TEST_CASE("kappa: reference values and the small-argument regime") {
    CHECK(kappa(1.0) == doctest::Approx(6.6766335735319984).epsilon(1e-12));
    CHECK(std::sqrt(kappa(1.0)) == doctest::Approx(2.5839182598395017).epsilon(1e-12));
    CHECK(std::sqrt(kappa(0.1)) == doctest::Approx(7.166886374523147).epsilon(1e-12));
    CHECK(std::sqrt(kappa(0.01)) == doctest::Approx(22.390542481004551).epsilon(1e-12));
    CHECK(std::sqrt(kappa(0.001)) == doctest::Approx(70.720107741192865).epsilon(1e-12));

    // kappa(b) ~ 5/b as b -> 0; naive evaluation loses everything to
    // cancellation well before 1e-4, the expm1 form does not.
    CHECK(kappa(1e-4) * 1e-4 == doctest::Approx(5.0).epsilon(1e-2));

    CHECK_THROWS_AS((void)kappa(0.0), contract_error);
    CHECK_THROWS_AS((void)kappa(-1.0), contract_error);
}

TEST_CASE("c_beta: reference values and limits") {
    CHECK(c_beta(1.0) == doctest::Approx(0.41802329313067356).epsilon(1e-12));
    CHECK(c_beta(0.1) == doctest::Approx(0.04916680552249504).epsilon(1e-12));
    CHECK(c_beta(50.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c_beta(1.0) > 0.0);
    CHECK(c_beta(1.0) < 1.0);
    CHECK_THROWS_AS((void)c_beta(0.0), contract_error);
}

TEST_CASE("KL divergences: reference values, identity, and the large-rate limit") {
    CHECK(kl_poisson(2.0, 1.0) == doctest::Approx(0.3862943611198906).epsilon(1e-13));
    CHECK(kl_poisson(1.0, 2.0) == doctest::Approx(0.3068528194400547).epsilon(1e-13));
    CHECK(kl_ztp(2.0, 1.0) == doctest::Approx(0.2900121991613068).epsilon(1e-13));
    CHECK(kl_ztp(1.0, 2.0) == doctest::Approx(0.21671899344024216).epsilon(1e-13));

    // KL(p || p) is identically zero, not merely tiny.
    CHECK(kl_poisson(3.7, 3.7) == 0.0);
    CHECK(kl_ztp(3.7, 3.7) == 0.0);

    // Divergence is positive off the diagonal.
    CHECK(kl_poisson(1.5, 1.6) > 0.0);
    CHECK(kl_ztp(1.5, 1.6) > 0.0);

    // At large rates truncating the zero bin changes nothing measurable.
    CHECK(kl_ztp(100.0, 50.0) ==
          doctest::Approx(kl_poisson(100.0, 50.0)).epsilon(1e-6));

    CHECK_THROWS_AS((void)kl_poisson(0.0, 1.0), contract_error);
    CHECK_THROWS_AS((void)kl_poisson(1.0, 0.0), contract_error);
    CHECK_THROWS_AS((void)kl_ztp(-1.0, 1.0), contract_error);
}

TEST_CASE("dimension requirement: cube sizes around the threshold") {
    auto cube = [](index_t n) { return Shape({n, n, n}); };
    // For a cube of side I with 3 modes the requirement is
    // I >= 2*log2(I)^2 + 1: fails at 81, holds from 82 up.
    CHECK(dimension_requirement_met(cube(82)));
    CHECK(!dimension_requirement_met(cube(81)));
    CHECK(!dimension_requirement_met(cube(50)));
    CHECK(dimension_requirement_met(cube(100)));

    // Exact boundary: max extent 128 gives log2 = 7 exactly, so the smallest
    // admissible min extent is 2*49 + 1 = 99.
    CHECK(dimension_requirement_met(Shape({99, 128, 128})));
    CHECK(!dimension_requirement_met(Shape({98, 128, 128})));
}

TEST_CASE("theorem_bound: reference value and structural identities") {
    BoundInputs in{Shape({100, 100, 100}), 1.0, 2.5, 5, 5, 100000};

    const double pois_nncp = theorem_bound(in, BoundKind::PoissonNncp);
    const double ztp_nncp = theorem_bound(in, BoundKind::ZtpNncp);
    const double pois_cp = theorem_bound(in, BoundKind::PoissonCp);
    const double ztp_cp = theorem_bound(in, BoundKind::ZtpCp);

    CHECK(pois_nncp == doctest::Approx(38832.296442589806).epsilon(1e-12));
    CHECK(ztp_nncp == doctest::Approx(259269.01416594229).epsilon(1e-12));

    // The truncated bound is the plain one amplified by exactly kappa(beta).
    CHECK(ztp_nncp / pois_nncp == doctest::Approx(kappa(in.beta)).epsilon(1e-15));
    CHECK(ztp_cp / pois_cp == doctest::Approx(kappa(in.beta)).epsilon(1e-15));

    // For R = R_est = 5 and three modes the CP rank term is
    // 2*(5*sqrt(5))^2 = 250 against 10 for the nonnegative variant.
    CHECK(pois_cp / pois_nncp == doctest::Approx(25.0).epsilon(1e-12));

    SUBCASE("more trusted indices can only tighten the bound") {
        double prev = theorem_bound(in, BoundKind::PoissonNncp);
        for (index_t size : {index_t{1000000}, index_t{10000000}, index_t{100000000}}) {
            in.omega_size = size;
            const double next = theorem_bound(in, BoundKind::PoissonNncp);
            CHECK(next < prev);
            prev = next;
        }
    }

    SUBCASE("invalid inputs are rejected") {
        BoundInputs bad = in;
        bad.omega_size = 1;
        CHECK_THROWS_AS((void)theorem_bound(bad, BoundKind::PoissonNncp), contract_error);
        bad = in;
        bad.rank_true = 0;
        CHECK_THROWS_AS((void)theorem_bound(bad, BoundKind::PoissonNncp), contract_error);
        bad = in;
        bad.alpha = 0.5;  // below beta
        CHECK_THROWS_AS((void)theorem_bound(bad, BoundKind::PoissonNncp), contract_error);
    }
}

TEST_CASE("bound kind names") {
    CHECK(std::string(to_string(BoundKind::ZtpNncp)) == "ztp-nncp");
    CHECK(std::string(to_string(BoundKind::ZtpCp)) == "ztp-cp");
    CHECK(std::string(to_string(BoundKind::PoissonNncp)) == "poisson-nncp");
    CHECK(std::string(to_string(BoundKind::PoissonCp)) == "poisson-cp");
}

TEST_CASE("verify_kl_bounds: the inequalities hold over the sampled box") {
    const auto report = verify_kl_bounds(1.0, 2.5, 10000, 42);
    CHECK(report.passed);
    CHECK(report.violations == 0);
    CHECK(report.examples.empty());
    CHECK(report.samples == 10000);
    CHECK(report.checked == 2 * (10000 + 2));  // two corner probes ride along
    CHECK(report.worst_margin_poisson >= -1e-12);
    CHECK(report.worst_margin_ztp >= -1e-12);
    CHECK(std::isfinite(report.worst_margin_poisson));

    SUBCASE("byte-identical on replay") {
        const auto again = verify_kl_bounds(1.0, 2.5, 10000, 42);
        CHECK(again.worst_margin_poisson == report.worst_margin_poisson);
        CHECK(again.worst_margin_ztp == report.worst_margin_ztp);
        CHECK(again.checked == report.checked);
    }
    SUBCASE("a different regime also passes") {
        const auto narrow = verify_kl_bounds(0.1, 4.0, 2000, 7);
        CHECK(narrow.passed);
    }
    SUBCASE("minimal sample count works, zero does not") {
        const auto tiny = verify_kl_bounds(1.0, 2.0, 1, 0);
        CHECK(tiny.checked == 6);
        CHECK_THROWS_AS((void)verify_kl_bounds(1.0, 2.0, 0, 0), contract_error);
        CHECK_THROWS_AS((void)verify_kl_bounds(2.0, 1.0, 10, 0), contract_error);
    }
}
