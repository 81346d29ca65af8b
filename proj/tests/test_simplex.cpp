#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "support.hpp"

using namespace retroplan;

namespace {

struct LpBuilder {
    MilpModel m;
    int var(const std::string& name, double lo, double up, double obj) {
        return m.add_var(name, VarKind::continuous, lo, up, obj);
    }
    void row(const std::string& name, std::vector<std::pair<int, double>> c, Sense s, double rhs) {
        m.add_row(name, std::move(c), s, rhs);
    }
};

// Dual objective from the duals + reduced costs; equals the primal objective
// at an optimum (strong duality), so the gap measures solver consistency.
double dual_objective(const MilpModel& m, const LpResult& r) {
    double v = m.obj_constant;
    for (size_t i = 0; i < m.rows.size(); ++i) v += r.duals[i] * m.rows[i].rhs;
    for (size_t j = 0; j < m.vars.size(); ++j) {
        double dj = m.vars[j].obj;
        for (size_t i = 0; i < m.rows.size(); ++i)
            for (const auto& [c, a] : m.rows[i].coeffs)
                if (c == static_cast<int>(j)) dj -= r.duals[i] * a;
        if (dj > 0)
            v += dj * m.vars[j].lower;
        else
            v += dj * m.vars[j].upper;
    }
    return v;
}

}  // namespace

TEST_CASE("two-variable LP with known optimum and duals", "[simplex]") {
    LpBuilder b;
    int x = b.var("x", 0, kInf, -1);
    int y = b.var("y", 0, kInf, -2);
    b.row("r1", {{x, 1}, {y, 1}}, Sense::le, 4);
    b.row("r2", {{x, 1}}, Sense::le, 3);
    b.row("r3", {{y, 1}}, Sense::le, 3);
    auto r = solve_lp(b.m);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.objective == Catch::Approx(-7.0));
    CHECK(r.x[x] == Catch::Approx(1.0));
    CHECK(r.x[y] == Catch::Approx(3.0));
    // marginal value of slack in r1 and r3; r2 is not binding
    REQUIRE(r.duals.size() == 3);
    CHECK(r.duals[0] == Catch::Approx(-1.0));
    CHECK(r.duals[1] == Catch::Approx(0.0).margin(1e-9));
    CHECK(r.duals[2] == Catch::Approx(-1.0));
}

TEST_CASE("equalities and ge rows start from artificials", "[simplex]") {
    LpBuilder b;
    int x = b.var("x", 0, kInf, 2);
    int y = b.var("y", 0, kInf, 3);
    b.row("sum", {{x, 1}, {y, 1}}, Sense::eq, 10);
    b.row("floor", {{x, 1}}, Sense::ge, 4);
    auto r = solve_lp(b.m);
    REQUIRE(r.status == LpStatus::optimal);
    // push everything into the cheaper x
    CHECK(r.x[x] == Catch::Approx(10.0));
    CHECK(r.x[y] == Catch::Approx(0.0).margin(1e-9));
    CHECK(r.objective == Catch::Approx(20.0));
    CHECK(r.duals[0] == Catch::Approx(2.0));  // one more unit of rhs costs 2
}

TEST_CASE("free and negative variables", "[simplex]") {
    LpBuilder b;
    int x = b.var("x", -kInf, kInf, 1);
    int y = b.var("y", -5, 5, 1);
    b.row("r", {{x, 1}, {y, 1}}, Sense::ge, -3);
    auto r = solve_lp(b.m);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.objective == Catch::Approx(-3.0));
    CHECK(r.x[x] + r.x[y] == Catch::Approx(-3.0));
}

TEST_CASE("upper-bound flips without basis changes", "[simplex]") {
    LpBuilder b;
    int x = b.var("x", 0, 2, -5);
    int y = b.var("y", 0, 2, -4);
    b.row("r", {{x, 1}, {y, 1}}, Sense::le, 10);  // never binding
    auto r = solve_lp(b.m);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.x[x] == 2.0);
    CHECK(r.x[y] == 2.0);
    CHECK(r.objective == Catch::Approx(-18.0));
    CHECK(r.duals[0] == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("infeasibility is detected", "[simplex]") {
    SECTION("conflicting rows") {
        LpBuilder b;
        int x = b.var("x", 0, kInf, 1);
        b.row("lo", {{x, 1}}, Sense::ge, 5);
        b.row("hi", {{x, 1}}, Sense::le, 3);
        CHECK(solve_lp(b.m).status == LpStatus::infeasible);
    }
    SECTION("row against bound") {
        LpBuilder b;
        int x = b.var("x", 0, 1, 0);
        b.row("need", {{x, 1}}, Sense::ge, 2);
        CHECK(solve_lp(b.m).status == LpStatus::infeasible);
    }
    SECTION("crossed bounds") {
        LpBuilder b;
        int x = b.var("x", 3, 1, 0);
        b.row("r", {{x, 1}}, Sense::le, 10);
        CHECK(solve_lp(b.m).status == LpStatus::infeasible);
    }
}

TEST_CASE("unboundedness is detected", "[simplex]") {
    SECTION("with a row") {
        LpBuilder b;
        int x = b.var("x", 0, kInf, -1);
        int y = b.var("y", 0, kInf, 0);
        b.row("r", {{x, -1}, {y, 1}}, Sense::le, 1);
        CHECK(solve_lp(b.m).status == LpStatus::unbounded);
    }
    SECTION("no rows at all") {
        LpBuilder b;
        b.var("x", 0, kInf, -1);
        CHECK(solve_lp(b.m).status == LpStatus::unbounded);
    }
}

TEST_CASE("empty constraint matrix picks bounds by sign", "[simplex]") {
    LpBuilder b;
    int x = b.var("x", 0, 5, -2);
    int y = b.var("y", 1, 4, 3);
    int z = b.var("z", -kInf, kInf, 0);
    auto r = solve_lp(b.m);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.x[x] == 5);
    CHECK(r.x[y] == 1);
    CHECK(r.x[z] == 0);
    CHECK(r.objective == Catch::Approx(-7.0));
}

TEST_CASE("degenerate LPs terminate", "[simplex]") {
    // many redundant rows through the same vertex
    LpBuilder b;
    int x = b.var("x", 0, kInf, -1);
    int y = b.var("y", 0, kInf, -1);
    for (int i = 0; i < 8; ++i)
        b.row("r" + std::to_string(i), {{x, 1.0 + 0.0 * i}, {y, 1.0}}, Sense::le, 2);
    b.row("cap", {{x, 1}}, Sense::le, 1);
    auto r = solve_lp(b.m);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.objective == Catch::Approx(-2.0));
}

TEST_CASE("objective constant is carried through", "[simplex]") {
    LpBuilder b;
    int x = b.var("x", 0, 10, 1);
    b.m.obj_constant = 42;
    b.row("r", {{x, 1}}, Sense::ge, 3);
    auto r = solve_lp(b.m);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.objective == Catch::Approx(45.0));
}

TEST_CASE("duals report sensitivity in original row units", "[simplex]") {
    // same LP with a row scaled by 8: the dual must scale down by 8
    auto build = [](double s) {
        LpBuilder b;
        int x = b.var("x", 0, kInf, 3);
        b.row("r", {{x, s}}, Sense::ge, 6 * s);
        return b.m;
    };
    auto r1 = solve_lp(build(1));
    auto r8 = solve_lp(build(8));
    REQUIRE(r1.status == LpStatus::optimal);
    REQUIRE(r8.status == LpStatus::optimal);
    CHECK(r1.objective == Catch::Approx(18.0));
    CHECK(r8.objective == Catch::Approx(18.0));
    CHECK(r1.duals[0] == Catch::Approx(3.0));
    CHECK(r8.duals[0] == Catch::Approx(3.0 / 8));
}

TEST_CASE("strong duality holds on random boxed LPs", "[simplex]") {
    std::mt19937 rng(4242);
    auto u = [&](double a, double bb) { return a + (bb - a) * (rng() / 4294967296.0); };
    int optimal_count = 0;
    for (int trial = 0; trial < 60; ++trial) {
        LpBuilder b;
        int n = 2 + static_cast<int>(rng() % 5);
        int m = 1 + static_cast<int>(rng() % 8);
        for (int j = 0; j < n; ++j) b.var("x" + std::to_string(j), 0, u(0.5, 10), u(-5, 5));
        for (int i = 0; i < m; ++i) {
            std::vector<std::pair<int, double>> c;
            for (int j = 0; j < n; ++j)
                if (rng() % 3 != 0) c.emplace_back(j, u(-3, 3));
            if (c.empty()) c.emplace_back(static_cast<int>(rng() % n), 1.0);
            Sense s = rng() % 5 == 0 ? Sense::eq : (rng() % 2 ? Sense::le : Sense::ge);
            b.row("r" + std::to_string(i), std::move(c), s, u(-4, 8));
        }
        auto r = solve_lp(b.m);
        if (r.status != LpStatus::optimal) continue;  // infeasible draws are fine
        ++optimal_count;
        double dual = dual_objective(b.m, r);
        INFO("trial=" << trial);
        CHECK(std::abs(r.objective - dual) <= 1e-6 * (1 + std::abs(r.objective)));
        // primal feasibility of the reported point
        for (size_t i = 0; i < b.m.rows.size(); ++i) {
            double lhs = 0;
            for (const auto& [c, a] : b.m.rows[i].coeffs) lhs += a * r.x[c];
            double rhs = b.m.rows[i].rhs;
            double tol = 1e-7 * (1 + std::abs(rhs));
            switch (b.m.rows[i].sense) {
                case Sense::le: CHECK(lhs <= rhs + tol); break;
                case Sense::ge: CHECK(lhs >= rhs - tol); break;
                case Sense::eq: CHECK(std::abs(lhs - rhs) <= tol); break;
            }
        }
    }
    CHECK(optimal_count > 20);  // the generator must not collapse to all-infeasible
}

TEST_CASE("iteration limit reports cleanly", "[simplex]") {
    LpBuilder b;
    int x = b.var("x", 0, kInf, -1);
    int y = b.var("y", 0, kInf, -2);
    b.row("r1", {{x, 1}, {y, 1}}, Sense::le, 4);
    b.row("r2", {{y, 1}}, Sense::le, 3);
    LpOptions opt;
    opt.max_iters = 0;
    CHECK(solve_lp(b.m, opt).status == LpStatus::iteration_limit);
}
