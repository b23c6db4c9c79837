#include <catch2/catch_amalgamated.hpp>

#include "contract_battery.hpp"

using gp_test::BatteryResult;

namespace {

void report(const BatteryResult& res, int want_cases) {
    CHECK(res.cases >= want_cases);
    for (std::size_t k = 0; k < res.failures.size() && k < 5; ++k) UNSCOPED_INFO(res.failures[k]);
    CHECK(res.failures.empty());
}

}  // namespace

TEST_CASE("battery: frozen mask") { report(gp_test::check_frozen_mask(200, 1001), 200); }

TEST_CASE("battery: budget exactness") { report(gp_test::check_budget_exactness(200, 1002), 200); }

TEST_CASE("battery: pgd iterate symmetry and box") { report(gp_test::check_symmetry(200, 1003), 200); }

TEST_CASE("battery: determinism per seed") { report(gp_test::check_determinism(200, 1004), 200); }

TEST_CASE("battery: isolation avoidance") {
    report(gp_test::check_isolation_avoidance(200, 1005), 200);
}
