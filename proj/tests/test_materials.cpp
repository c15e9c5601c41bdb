// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "iop/materials.hpp"

using Catch::Approx;
using namespace iop;

namespace {
// independent copy of c so the oracle does not share the library constant
constexpr double kC = 2.99792458e8;
constexpr double kTwoPi = 6.283185307179586;
} // namespace

TEST_CASE("refractive index from permittivity")
{
    CHECK(refractive_from_permittivity(1.0) == 1.0);
    CHECK(refractive_from_permittivity(4.0) == 2.0);
    CHECK(refractive_from_permittivity(2.39) == Approx(1.546).margin(5e-4));
    CHECK_THROWS_AS(refractive_from_permittivity(0.99), DomainError);
}

TEST_CASE("PTFE keeps its tabulated index and carries a note")
{
    const auto db = preset_materials();
    CHECK(db.at("PTFE").refractive_index == 1.42);
    CHECK(std::abs(refractive_from_permittivity(2.39) - 1.42) > 0.1);
    CHECK_FALSE(db.entry("PTFE").note.empty());
}

TEST_CASE("loss tangent to absorption")
{
    CHECK(absorption_from_loss_tangent(1e12, 2.22, 0.0) == 0.0);

    // 2*pi*f*sqrt(eps)*tan/c evaluated by hand: PMMA 1748.7 /m, PEN 100.6 /m
    CHECK(absorption_from_loss_tangent(1e12, 2.22, 0.056) == Approx(1748.7).epsilon(1e-3));
    CHECK(absorption_from_loss_tangent(1e12, 2.56, 0.003) == Approx(100.6).epsilon(2e-3));

    // PMMA within a factor of two of the tabulated 22 /cm
    const double pmma = absorption_from_loss_tangent(1e12, 2.22, 0.056);
    CHECK(pmma / 2200.0 > 0.5);
    CHECK(pmma / 2200.0 < 2.0);

    CHECK_THROWS_AS(absorption_from_loss_tangent(0.0, 2.0, 0.01), DomainError);
    CHECK_THROWS_AS(absorption_from_loss_tangent(1e12, 0.5, 0.01), DomainError);
    CHECK_THROWS_AS(absorption_from_loss_tangent(1e12, 2.0, -0.01), DomainError);
}

TEST_CASE("loss tangent conversion is linear in f and tan_delta")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uf(1e11, 3e12), ue(1.0, 10.0), ut(0.0, 0.2), uk(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double f = uf(rng), e = ue(rng), t = ut(rng), k = uk(rng);
        const double base = absorption_from_loss_tangent(f, e, t);
        CHECK(absorption_from_loss_tangent(k * f, e, t) == Approx(k * base).epsilon(1e-12));
        CHECK(absorption_from_loss_tangent(f, e, k * t) == Approx(k * base).epsilon(1e-12));
        CHECK(base == Approx(kTwoPi * f * std::sqrt(e) * t / kC).epsilon(1e-12));
    }
}

TEST_CASE("log-frequency interpolation")
{
    MediumSpec m{"x", 1.5, std::vector<AbsorptionSample>{{200e9, 300.0}, {300e9, 400.0}}, 0.0};

    auto exact = alpha_at(m, 300e9);
    CHECK(exact.alpha_per_m == 400.0);
    CHECK_FALSE(exact.extrapolated);

    // geometric midpoint sits halfway in log f
    const double fm = std::sqrt(200e9 * 300e9);
    CHECK(alpha_at(m, fm).alpha_per_m == Approx(350.0).epsilon(1e-12));

    // hand interpolation at 250 GHz: t = ln(1.25)/ln(1.5)
    const double t = 0.22314355131420976 / 0.4054651081081644;
    CHECK(alpha_at(m, 250e9).alpha_per_m == Approx(300.0 + 100.0 * t).epsilon(1e-12));

    auto below = alpha_at(m, 100e9);
    CHECK(below.alpha_per_m == 300.0);
    CHECK(below.extrapolated);
    auto above = alpha_at(m, 1e12);
    CHECK(above.alpha_per_m == 400.0);
    CHECK(above.extrapolated);

    MediumSpec flat{"y", 2.0, 123.0, 0.0};
    CHECK(alpha_at(flat, 1e9).alpha_per_m == 123.0);
    CHECK(alpha_at(flat, 5e12).alpha_per_m == 123.0);
}

TEST_CASE("empty absorption profile is a configuration error")
{
    MediumSpec m{"z", 1.5, std::vector<AbsorptionSample>{}, 0.0};
    CHECK_THROWS_AS(alpha_at(m, 200e9), ConfigError);
}

TEST_CASE("medium invariants")
{
    CHECK_THROWS_AS(validate(MediumSpec{"a", 0.9, 1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(validate(MediumSpec{"a", 1.5, -1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(validate(MediumSpec{"a", 1.5, 1.0, -1e-6}), DomainError);
    CHECK_THROWS_AS(
        validate(MediumSpec{"a", 1.5, std::vector<AbsorptionSample>{{300e9, 1.0}, {200e9, 2.0}}, 0.0}),
        DomainError);
    CHECK_THROWS_AS(
        validate(MediumSpec{"a", 1.5, std::vector<AbsorptionSample>{{200e9, 1.0}, {300e9, -2.0}}, 0.0}),
        DomainError);
    const auto db = preset_materials();
    for (const auto& [name, e] : db.entries())
        CHECK_NOTHROW(validate(e.spec));
}

TEST_CASE("atmospheric absorption")
{
    const double a = atmospheric_alpha(250e9);
    CHECK(a >= 1e-4);
    CHECK(a <= 1e-1);
    CHECK(4.342944819032518 * a * 0.04 < 0.02);

    // 6.8 dB/km at 300 GHz
    CHECK(atmospheric_alpha(300e9) == Approx(6.8e-3 / 4.342944819032518).epsilon(1e-12));
    CHECK_THROWS_AS(atmospheric_alpha(99e9), DomainError);
    CHECK_THROWS_AS(atmospheric_alpha(1.01e12), DomainError);

    // continuous and positive across the table
    double prev = atmospheric_alpha(100e9);
    for (double f = 101e9; f <= 1000e9; f += 1e9) {
        const double cur = atmospheric_alpha(f);
        CHECK(cur > 0.0);
        CHECK(std::abs(cur - prev) < 0.1 * std::max(cur, prev));
        prev = cur;
    }
}

TEST_CASE("preset catalog")
{
    const auto db = preset_materials();
    CHECK(db.size() == 8);
    for (const char* n : {"air", "titanium-white-paint", "plaster", "PET", "PEN", "PMMA", "polypropylene", "PTFE"})
        CHECK(db.contains(n));
    CHECK(db.at("titanium-white-paint").refractive_index == 2.13);
    CHECK(alpha_at(db.at("titanium-white-paint"), 200e9).alpha_per_m == Approx(321.2).margin(0.05));
    CHECK(db.entry("plaster").provenance == Provenance::preset);
    CHECK_THROWS_AS(db.at("unobtainium"), ConfigError);
}

TEST_CASE("materials file parsing")
{
    SECTION("empty text gives the presets")
    {
        const auto db = parse_materials("  \n");
        CHECK(db.size() == 8);
    }
    SECTION("override")
    {
        const auto db = parse_materials(R"({"version":"iop-materials/1","materials":[
            {"name":"plaster","refractive_index":1.73,"absorption":{"constant_per_m":100}}]})");
        CHECK(alpha_at(db.at("plaster"), 250e9).alpha_per_m == 100.0);
        CHECK(db.entry("plaster").provenance == Provenance::file);
        CHECK(db.entry("PET").provenance == Provenance::preset);
    }
    SECTION("bare array and sampled absorption")
    {
        const auto db = parse_materials(R"([{"name":"new","refractive_index":1.3,"roughness_rms_m":1e-6,
            "absorption":{"samples":[[1e11, 1.0],[2e11, 2.0]]}}])");
        CHECK(db.size() == 9);
        CHECK(db.at("new").roughness_rms_m == 1e-6);
        CHECK(alpha_at(db.at("new"), 2e11).alpha_per_m == 2.0);
    }
    SECTION("errors name the entry")
    {
        auto msg = [](std::string_view text) {
            try {
                parse_materials(text);
            } catch (const LoadError& e) {
                return std::string(e.what());
            }
            return std::string("no error");
        };
        CHECK_THAT(msg(R"([{"name":"a","refractive_index":1.2,"absorption":{"constant_per_m":1}},
                           {"name":"a","refractive_index":1.3,"absorption":{"constant_per_m":1}}])"),
                   Catch::Matchers::ContainsSubstring("'a'"));
        CHECK_THAT(msg(R"([{"name":"bad","refractive_index":0.5,"absorption":{"constant_per_m":1}}])"),
                   Catch::Matchers::ContainsSubstring("bad"));
        CHECK_THAT(msg(R"([{"name":"b","refractive_index":1.5,"absorption":{}}])"),
                   Catch::Matchers::ContainsSubstring("'b'"));
        CHECK_THAT(msg(R"({"version":"iop-materials/9","materials":[]})"),
                   Catch::Matchers::ContainsSubstring("version"));
        CHECK_THAT(msg("{not json"), Catch::Matchers::ContainsSubstring("materials file"));
    }
    SECTION("load error is a config error")
    {
        CHECK_THROWS_AS(load_materials("/nonexistent/materials.json"), ConfigError);
    }
}

TEST_CASE("serialize and reload round trip")
{
    auto db = preset_materials();
    db.put({"custom", 1.7, std::vector<AbsorptionSample>{{1e11, 0.1234567890123}, {5e11, 7.5}}, 3e-6},
           Provenance::file);
    const auto again = parse_materials(serialize_materials(db), MaterialDb{});
    REQUIRE(again.size() == db.size());
    for (const auto& [name, e] : db.entries())
        CHECK(again.at(name) == e.spec);
}
