#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "pstraj/emitter_space.hpp"
#include "pstraj/oracle_basis.hpp"
#include "pstraj/young_basis.hpp"

using namespace pstraj;
using namespace pstraj::young;

namespace {

YoungDiagram diag(std::vector<int> rows) { return YoungDiagram{std::move(rows)}; }

Matrix unit(int d, int a, int b)
{
    Matrix m = Matrix::Zero(d, d);
    m(a, b) = 1.0;
    return m;
}

// Brute-force standard tableau count: place 1..N one at a time.
std::uint64_t brute_standard(const YoungDiagram& nu)
{
    std::vector<int> filled(nu.levels(), 0);
    std::function<std::uint64_t(int)> rec = [&](int left) -> std::uint64_t {
        if (left == 0) return 1;
        std::uint64_t total = 0;
        for (int r = 0; r < nu.levels(); ++r) {
            if (filled[r] == nu.rows[r]) continue;
            if (r > 0 && filled[r] >= filled[r - 1]) continue;
            ++filled[r];
            total += rec(left - 1);
            --filled[r];
        }
        return total;
    };
    return rec(nu.boxes());
}

// Brute-force semistandard fillings with labels 1..d.
int brute_weyl(const YoungDiagram& nu, int d)
{
    std::vector<std::pair<int, int>> cells;
    for (int r = 0; r < nu.levels(); ++r)
        for (int c = 0; c < nu.rows[r]; ++c) cells.emplace_back(r, c);
    std::vector<std::vector<int>> t(nu.levels());
    for (int r = 0; r < nu.levels(); ++r) t[r].assign(nu.rows[r], 0);
    std::function<int(std::size_t)> rec = [&](std::size_t i) -> int {
        if (i == cells.size()) return 1;
        const auto [r, c] = cells[i];
        int total = 0;
        for (int v = 1; v <= d; ++v) {
            if (c > 0 && v < t[r][c - 1]) continue;
            if (r > 0 && v <= t[r - 1][c]) continue;
            t[r][c] = v;
            total += rec(i + 1);
        }
        return total;
    };
    return rec(0);
}

// Partition oracle: all non-increasing sequences of length d summing to n,
// sorted descending.
std::vector<std::vector<int>> brute_partitions(int n, int d)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur(d);
    std::function<void(int)> rec = [&](int i) {
        if (i == d) {
            int s = 0;
            for (int v : cur) s += v;
            if (s == n && std::is_sorted(cur.rbegin(), cur.rend())) out.push_back(cur);
            return;
        }
        for (int v = 0; v <= n; ++v) {
            cur[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
    std::sort(out.rbegin(), out.rend());
    return out;
}

} // namespace

TEST_CASE("diagram enumeration")
{
    auto d22 = enumerate_diagrams(2, 2);
    REQUIRE(d22.size() == 2);
    CHECK(d22[0].rows == std::vector<int>{2, 0});
    CHECK(d22[1].rows == std::vector<int>{1, 1});

    auto d33 = enumerate_diagrams(3, 3);
    REQUIRE(d33.size() == 3);
    CHECK(d33[0].rows == std::vector<int>{3, 0, 0});
    CHECK(d33[1].rows == std::vector<int>{2, 1, 0});
    CHECK(d33[2].rows == std::vector<int>{1, 1, 1});

    auto d42 = enumerate_diagrams(4, 2);
    REQUIRE(d42.size() == 3);
    CHECK(d42[2].rows == std::vector<int>{2, 2});

    for (int n = 1; n <= 7; ++n)
        for (int d = 2; d <= 4; ++d) {
            std::vector<std::vector<int>> got;
            for (const auto& y : enumerate_diagrams(n, d)) got.push_back(y.rows);
            CHECK(got == brute_partitions(n, d));
        }

    CHECK_THROWS_AS(enumerate_diagrams(3, 1), std::invalid_argument);
}

TEST_CASE("weyl enumeration counts")
{
    CHECK(enumerate_weyl(diag({2, 1, 0}), 3).size() == 8);
    CHECK(enumerate_weyl(diag({1, 1, 1}), 3).size() == 1);
    for (int n = 1; n <= 8; ++n) CHECK(enumerate_weyl(diag({n, 0}), 2).size() == static_cast<std::size_t>(n + 1));
    for (int n = 1; n <= 5; ++n)
        for (int d = 2; d <= 4; ++d)
            for (const auto& nu : enumerate_diagrams(n, d))
                CHECK(static_cast<int>(enumerate_weyl(nu, d).size()) == brute_weyl(nu, d));
}

TEST_CASE("standard tableau counts")
{
    CHECK(standard_count(diag({5, 0, 0})) == 1);
    CHECK(standard_count(diag({2, 1, 0})) == 2);
    for (int n = 1; n <= 7; ++n)
        for (const auto& nu : enumerate_diagrams(n, 4)) CHECK(standard_count(nu) == brute_standard(nu));
    CHECK_THROWS_AS(standard_count(diag({40, 40, 40})), std::overflow_error);
    CHECK(degeneracy(diag({40, 40, 40})) > 1e50);
    CHECK(degeneracy(diag({3, 2, 1})) == 16.0);
}

TEST_CASE("dimension sum rule")
{
    CHECK(1 * 10 + 2 * 8 + 1 * 1 == 27);
    for (int n = 1; n <= 5; ++n)
        for (int d = 2; d <= 4; ++d) {
            std::uint64_t total = 0;
            for (const auto& nu : enumerate_diagrams(n, d)) total += standard_count(nu) * enumerate_weyl(nu, d).size();
            CHECK(total == static_cast<std::uint64_t>(std::pow(d, n)));
        }
}

TEST_CASE("GT pattern of the worked example")
{
    WeylTableau w{diag({4, 3, 1, 0}), {{1, 1, 2, 3}, {2, 3, 4}, {4}, {}}};
    const auto g = weyl_to_gt(w, 4);
    CHECK(g.rows[3] == std::vector<int>{4, 3, 1, 0});
    CHECK(g.rows[2] == std::vector<int>{4, 2, 0});
    CHECK(g.rows[1] == std::vector<int>{3, 1});
    CHECK(g.rows[0] == std::vector<int>{2});
    CHECK(gt_to_weyl(g).entries == w.entries);
}

TEST_CASE("trivial GT patterns")
{
    const auto g1 = weyl_to_gt(WeylTableau{diag({1, 0}), {{1}, {}}}, 2);
    CHECK(g1.rows[1] == std::vector<int>{1, 0});
    CHECK(g1.rows[0] == std::vector<int>{1});

    const auto col = enumerate_weyl(diag({1, 1, 1}), 3);
    REQUIRE(col.size() == 1);
    const auto g2 = weyl_to_gt(col[0], 3);
    CHECK(g2.rows[2] == std::vector<int>{1, 1, 1});
    CHECK(g2.rows[1] == std::vector<int>{1, 1});
    CHECK(g2.rows[0] == std::vector<int>{1});

    CHECK_THROWS_AS(weyl_to_gt(WeylTableau{diag({2, 0}), {{2, 1}, {}}}, 2), std::invalid_argument);
    CHECK_THROWS_AS(weyl_to_gt(WeylTableau{diag({1, 1}), {{1}, {1}}}, 2), std::invalid_argument);
}

TEST_CASE("GT round trip")
{
    for (int n = 1; n <= 5; ++n)
        for (int d = 2; d <= 4; ++d)
            for (const auto& nu : enumerate_diagrams(n, d))
                for (const auto& g : enumerate_patterns(nu)) {
                    CHECK(g.valid());
                    const auto w = gt_to_weyl(g);
                    CHECK(valid_tableau(w, d));
                    CHECK(weyl_to_gt(w, d) == g);
                }
}

TEST_CASE("canonical order matches spin index for d=2")
{
    const auto pats = enumerate_patterns(diag({3, 1}));
    REQUIRE(pats.size() == 3);
    // Row 1 counts species 1 (lower level): M ascends with the index.
    CHECK(pats[0].rows[0][0] == 3);
    CHECK(pats[1].rows[0][0] == 2);
    CHECK(pats[2].rows[0][0] == 1);
}

TEST_CASE("allowed transitions")
{
    auto single = allowed_transitions(diag({1, 0}));
    REQUIRE(single.size() == 1);
    CHECK(single[0].lambda.rows == std::vector<int>{1, 0});

    auto sym = allowed_transitions(diag({2, 0}));
    std::vector<std::vector<int>> targets;
    for (const auto& ct : sym) {
        CHECK(ct.channel.row_removed == 1);
        targets.push_back(ct.lambda.rows);
    }
    CHECK(targets == std::vector<std::vector<int>>{{2, 0}, {1, 1}});

    auto t3 = allowed_transitions(diag({1, 1, 0}));
    int same = 0;
    std::vector<std::vector<int>> seen;
    for (const auto& ct : t3) {
        if (ct.lambda.rows == std::vector<int>{1, 1, 0}) ++same;
        seen.push_back(ct.lambda.rows);
        for (const auto& t : ct.transitions) {
            CHECK(apply_change(t.w_mu, t.removed, +1) == t.w_nu);
            CHECK(apply_change(t.w_mu, t.added, +1) == t.w_lambda);
        }
    }
    // (1,1) has a single removable corner, so lambda = nu is reached once.
    CHECK(same == 1);
    CHECK(seen == std::vector<std::vector<int>>{{2, 0, 0}, {1, 1, 0}});

    int diagonal = 0;
    for (const auto& ct : allowed_transitions(diag({2, 1, 0})))
        if (ct.lambda.rows == std::vector<int>{2, 1, 0}) ++diagonal;
    CHECK(diagonal == 2);
}

TEST_CASE("zeta rejects invalid intermediates")
{
    GTPattern g{{{1}, {1, 0}}};
    CHECK_THROWS_AS(zeta(g, ChangePattern{1, {2, 2}}), std::invalid_argument);
}

TEST_CASE("zeta for two spins")
{
    // Symmetric |1,0> = (du + ud)/sqrt2 and singlet (du - ud)/sqrt2 with
    // species 1 = down.
    GTPattern sym{{{1}, {2, 0}}};
    GTPattern singlet{{{1}, {1, 1}}};
    CHECK(zeta(sym, ChangePattern{1, {1, 1}}) == doctest::Approx(std::sqrt(0.5)));
    CHECK(zeta(sym, ChangePattern{2, {1}}) == doctest::Approx(std::sqrt(0.5)));
    CHECK(std::abs(zeta(singlet, ChangePattern{1, {1, 2}})) == doctest::Approx(std::sqrt(0.5)));
    CHECK(std::abs(zeta(singlet, ChangePattern{2, {2}})) == doctest::Approx(std::sqrt(0.5)));
    CHECK(zeta(singlet, ChangePattern{1, {1, 2}}) * zeta(singlet, ChangePattern{2, {2}}) < 0);
}

TEST_CASE("zeta on the fully symmetric row")
{
    // Bosonic amplitude: adding species s to a symmetric row with k_s boxes
    // of that species has weight sqrt((k_s + 1) / (N + 1)).
    for (int n = 0; n <= 3; ++n)
        for (const auto& wm : enumerate_patterns(diag({n, 0, 0}))) {
            for (int s = 1; s <= 3; ++s) {
                ChangePattern ch{s, std::vector<int>(4 - s, 1)};
                const auto wl = apply_change(wm, ch, +1);
                REQUIRE(wl);
                const double want = std::sqrt((wm.population(s) + 1.0) / (n + 1.0));
                CHECK(zeta(*wl, ch) == doctest::Approx(want));
            }
        }
}

TEST_CASE("CG rows are normalised")
{
    for (int n = 1; n <= 4; ++n)
        for (const auto& nu : enumerate_diagrams(n, 3))
            for (const auto& wn : enumerate_patterns(nu))
                for (int r = 1; r <= 3; ++r) {
                    YoungDiagram mu = nu;
                    --mu.rows[r - 1];
                    if (!mu.valid()) continue;
                    double sum = 0;
                    bool any = false;
                    for (const auto& wm : enumerate_patterns(mu))
                        if (auto ch = change_between(wn, wm)) {
                            sum += std::pow(zeta(wn, *ch), 2);
                            any = true;
                        }
                    if (any) CHECK(sum == doctest::Approx(1.0));
                }
}

TEST_CASE("identity matrix element")
{
    const Matrix id = Matrix::Identity(3, 3);
    for (int n = 1; n <= 3; ++n)
        for (const auto& nu : enumerate_diagrams(n, 3)) {
            const auto pats = enumerate_patterns(nu);
            for (const auto& a : pats)
                for (const auto& b : pats) {
                    cplx total = 0;
                    for (int r = 1; r <= 3; ++r) {
                        YoungDiagram mu = nu;
                        --mu.rows[r - 1];
                        if (!mu.valid()) continue;
                        const cplx f = matrix_element_f(id, mu, a, b);
                        const double w = std::sqrt(n * dimension_ratio(mu, nu));
                        total += f * w;
                    }
                    CHECK(std::abs(total - (a == b ? double(n) : 0.0)) < 1e-12);
                }
        }
}

TEST_CASE("d=2 Young channels reproduce the spin channels")
{
    for (int n = 1; n <= 4; ++n) {
        SpinSpace spin(n);
        YoungSpace young(n, 2);
        oracle::FullSpaceBasis basis(spin);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const Matrix x = unit(2, a, b);
                CHECK(oracle::channel_completeness_error(young, basis, x, x.adjoint()) < 1e-10);
                CHECK(oracle::channel_completeness_error(young, basis, x, Matrix::Identity(2, 2)) < 1e-10);
            }
        const Matrix m = Matrix::Random(2, 2);
        CHECK((spin.collective(m).to_dense() - young.collective(m).to_dense()).norm() < 1e-10);
    }
}

TEST_CASE("d=3 channel completeness")
{
    for (int n = 1; n <= 3; ++n) {
        YoungSpace space(n, 3);
        oracle::FullSpaceBasis basis(space);
        double worst = 0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c)
                    for (int e = 0; e < 3; ++e)
                        worst = std::max(worst,
                                         oracle::channel_completeness_error(space, basis, unit(3, a, b), unit(3, c, e)));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("d=3 matrix element against two qutrits")
{
    YoungSpace space(2, 3);
    oracle::FullSpaceBasis basis(space);
    const Matrix x = unit(3, 0, 2);
    CHECK(oracle::channel_completeness_error(space, basis, x, x) < 1e-10);
    CHECK(oracle::trace_preservation_error(space, basis, x) < 1e-10);
}

TEST_CASE("d=3 collective operator")
{
    for (int n = 1; n <= 3; ++n) {
        YoungSpace space(n, 3);
        oracle::FullSpaceBasis basis(space);
        const Matrix x = Matrix::Random(3, 3);
        const Matrix full = oracle::collective_full(x, n);
        const Matrix dense = space.collective(x).to_dense();
        for (int sec = 0; sec < static_cast<int>(space.sectors().size()); ++sec)
            for (int a = 0; a < space.sectors()[sec].dim; ++a)
                for (int b = 0; b < space.sectors()[sec].dim; ++b) {
                    const cplx want = (basis.vectors(sec, a).col(0).adjoint() * full * basis.vectors(sec, b).col(0))(0, 0);
                    CHECK(std::abs(dense(basis.offset(sec) + a, basis.offset(sec) + b) - want) < 1e-10);
                }
    }
}

namespace {

int diagonal_channel_rank(const YoungBasis& basis, const Matrix& x, int sec)
{
    std::vector<Matrix> blocks;
    for (int r = 1; r <= basis.levels(); ++r) {
        const auto op = basis.build_collective_jump_d(x, TransitionChannel{r, r});
        if (const Block* blk = op.block_from(sec)) blocks.push_back(Matrix(blk->op));
    }
    if (blocks.empty()) return 0;
    const auto size = blocks[0].size();
    Matrix stacked(size, blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) stacked.col(i) = Eigen::Map<const Vector>(blocks[i].data(), size);
    Eigen::FullPivLU<Matrix> lu(stacked);
    lu.setThreshold(1e-10);
    return static_cast<int>(lu.rank());
}

} // namespace

TEST_CASE("rank of diagonal channels")
{
    // nu = (3,2,1) is the smallest shape with three nu = lambda channels.
    YoungSpace space(6, 3);
    const auto& basis = space.basis();
    const int sec = basis.sector_of(diag({3, 2, 1}));
    REQUIRE(sec >= 0);
    std::vector<Matrix> traceless;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (a != b) traceless.push_back(unit(3, a, b));
    traceless.push_back(unit(3, 0, 0) - unit(3, 1, 1));
    traceless.push_back(unit(3, 1, 1) - unit(3, 2, 2));
    for (const auto& x : traceless) CHECK(diagonal_channel_rank(basis, x, sec) == 2);
    // An identity component adds a third independent direction.
    CHECK(diagonal_channel_rank(basis, unit(3, 0, 0), sec) == 3);
}

TEST_CASE("asymptotic basis size")
{
    // Largest sector dimension over N^(d(d-1)/2) stays bounded and settles.
    std::vector<double> ratios;
    for (int n : {10, 20, 40}) {
        std::size_t biggest = 0;
        for (const auto& nu : enumerate_diagrams(n, 3)) biggest = std::max(biggest, enumerate_patterns(nu).size());
        ratios.push_back(biggest / std::pow(n, 3.0));
    }
    CHECK(ratios[1] <= ratios[0]);
    CHECK(ratios[2] <= ratios[1]);
}
