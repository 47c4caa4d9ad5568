import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fenchelfix import (
    AllInfinite,
    SampledFn,
    SampledFn2D,
    SignFlipSolution,
    TransformParams,
    biconjugate,
    brute_conjugate,
    conjugate_2d_brute,
    conjugate_quadratic,
    direct_sum,
    energy,
    fast_conjugate,
    fenchel_young_check,
    grid_fixed_point_residual,
    log_family_eval,
    sample,
    uniform_grid,
)
from fenchelfix.quadratic import QuadraticFn

FLIP = TransformParams([[-1.0]], [0.0], [0.0], 1.0, 0.0)


def random_sampled(rng, max_nodes=120, inf_fraction=0.0):
    n = int(rng.integers(2, max_nodes))
    pts = np.unique(rng.uniform(-10, 10, n))
    while pts.size < 2:
        pts = np.unique(rng.uniform(-10, 10, n))
    vals = rng.uniform(-8, 8, pts.size)
    if inf_fraction > 0.0:
        vals[rng.random(pts.size) < inf_fraction] = np.inf
        if not np.any(np.isfinite(vals)):
            vals[int(rng.integers(0, pts.size))] = float(rng.uniform(-1, 1))
    return SampledFn(pts, vals)


class TestBruteConjugate:
    def test_vee_at_slope_zero(self):
        f = SampledFn([-1.0, 0.0, 1.0], [1.0, 0.0, 1.0])
        assert brute_conjugate(f, [0.0]).values[0] == 0.0

    def test_vee_at_slope_two(self):
        f = SampledFn([-1.0, 0.0, 1.0], [1.0, 0.0, 1.0])
        assert brute_conjugate(f, [2.0]).values[0] == 1.0

    def test_all_infinite_rejected(self):
        with pytest.raises(AllInfinite):
            SampledFn([-1.0, 1.0], [np.inf, np.inf])


class TestFastConjugate:
    def test_single_finite_node(self):
        f = SampledFn([-1.0, 0.0, 1.0], [np.inf, 0.0, np.inf])
        out = fast_conjugate(f, [-3.0, 0.5, 7.0])
        np.testing.assert_array_equal(out.values, [0.0, 0.0, 0.0])

    def test_parabola_matches_oracle_bitwise(self):
        xs = np.linspace(-5.0, 5.0, 201)
        f = SampledFn(xs, 0.5 * xs * xs)
        slopes = np.linspace(-8.0, 8.0, 257)
        fast = fast_conjugate(f, slopes)
        brute = brute_conjugate(f, slopes)
        assert fast.values.tobytes() == brute.values.tobytes()

    def test_dominated_interior_node_is_dropped(self):
        f = SampledFn([-1.0, 0.0, 1.0], [0.0, 5.0, 0.0])
        slopes = np.linspace(-3.0, 3.0, 13)
        fast = fast_conjugate(f, slopes)
        brute = brute_conjugate(f, slopes)
        assert fast.values.tobytes() == brute.values.tobytes()
        np.testing.assert_allclose(fast.values, np.abs(slopes))

    def test_oracle_equivalence_randomized(self, rng):
        for k in range(200):
            f = random_sampled(rng, inf_fraction=0.3 if k % 2 else 0.0)
            m = int(rng.integers(1, 80))
            slopes = np.unique(rng.uniform(-12, 12, m))
            fast = fast_conjugate(f, slopes)
            brute = brute_conjugate(f, slopes)
            assert fast.values.tobytes() == brute.values.tobytes()

    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(
        data=st.lists(
            st.tuples(
                st.floats(-50, 50, allow_nan=False),
                st.one_of(st.floats(-30, 30, allow_nan=False), st.just(float("inf"))),
            ),
            min_size=2,
            max_size=40,
        ),
        slopes=st.lists(st.floats(-20, 20, allow_nan=False), min_size=1, max_size=20),
    )
    def test_oracle_equivalence_hypothesis(self, data, slopes):
        pts = np.unique(np.asarray([d[0] for d in data]))
        if pts.size < 2:
            return
        vals = np.asarray([d[1] for d in data][: pts.size])
        if vals.size < pts.size or not np.any(np.isfinite(vals)):
            return
        f = SampledFn(pts, vals)
        s = np.unique(np.asarray(slopes))
        fast = fast_conjugate(f, s)
        brute = brute_conjugate(f, s)
        assert fast.values.tobytes() == brute.values.tobytes()

    def test_conjugate_output_is_convex(self, rng):
        # chord slopes of any conjugate are nondecreasing; slopes are kept
        # well separated so divided differences do not amplify roundoff
        for _ in range(25):
            f = random_sampled(rng, inf_fraction=0.2)
            slopes = np.unique(np.round(rng.uniform(-10, 10, 40), 1))
            if slopes.size < 3:
                continue
            out = fast_conjugate(f, slopes).values
            d1 = np.diff(out) / np.diff(slopes)
            assert np.all(np.diff(d1) >= -1e-12 * max(1.0, np.max(np.abs(out))))

    def test_order_reversal_on_grids(self, rng):
        for _ in range(20):
            f = random_sampled(rng)
            g = SampledFn(f.points, f.values + rng.uniform(0.0, 3.0, f.points.size))
            slopes = np.unique(rng.uniform(-10, 10, 30))
            fs = fast_conjugate(f, slopes).values
            gs = fast_conjugate(g, slopes).values
            assert np.all(fs >= gs - 1e-12)


class TestBiconjugate:
    def test_convex_data_unchanged(self):
        xs = np.linspace(-4.0, 4.0, 81)
        f = SampledFn(xs, 0.5 * xs * xs)
        out = biconjugate(f)
        np.testing.assert_array_equal(out.values, f.values)

    def test_single_finite_point_unchanged(self):
        f = SampledFn([-1.0, 0.0, 2.0], [np.inf, 3.0, np.inf])
        out = biconjugate(f)
        assert out.values[1] == 3.0
        assert np.isinf(out.values[0]) and np.isinf(out.values[2])

    def test_interior_value_replaced_by_chord(self):
        f = SampledFn([-1.0, 0.0, 1.0], [0.0, 5.0, 0.0])
        np.testing.assert_array_equal(biconjugate(f).values, [0.0, 0.0, 0.0])

    def test_below_original_and_idempotent(self, rng):
        for _ in range(25):
            f = random_sampled(rng, inf_fraction=0.15)
            once = biconjugate(f)
            assert np.all(once.values <= f.values + 1e-12)
            twice = biconjugate(once)
            np.testing.assert_allclose(twice.values, once.values, atol=1e-12, rtol=0.0)

    def test_third_conjugate_equals_first(self, rng):
        for _ in range(20):
            f = random_sampled(rng)
            slopes = np.unique(rng.uniform(-10, 10, 50))
            if slopes.size < 2:
                continue
            first = fast_conjugate(f, slopes)
            second = fast_conjugate(first, f.points)
            third = fast_conjugate(second, slopes)
            np.testing.assert_allclose(third.values, first.values, atol=1e-10, rtol=0.0)


class TestSignFlipFamily:
    def test_pointwise_values(self):
        assert log_family_eval(SignFlipSolution("neg_log"), 1.0) == pytest.approx(-0.5)
        assert log_family_eval(SignFlipSolution("ray_indicator"), -1.0) == np.inf
        assert log_family_eval(SignFlipSolution("split_quadratic", lam=2.0), -1.0) == pytest.approx(1.0)
        assert log_family_eval(SignFlipSolution("split_quadratic", lam=2.0), 1.0) == pytest.approx(0.25)

    def test_half_square_grid_residual(self):
        h = 0.01
        f = SignFlipSolution("half_square").sample(uniform_grid(-5.0, 5.0, h))
        rep = grid_fixed_point_residual(FLIP, f)
        assert rep.max_abs <= 2 * h
        assert rep.grid_h == pytest.approx(h)

    def test_split_quadratic_point_values(self):
        # conjugate of the lam=2 split quadratic at slope -1 equals 1/4,
        # attained at x = -1/2; matches the sample value at x = 1
        h = 0.005
        f = SignFlipSolution("split_quadratic", lam=2.0).sample(uniform_grid(-11.0, 11.0, h))
        star = fast_conjugate(f, np.array([-1.0]))
        assert star.values[0] == pytest.approx(0.25, abs=h)
        assert SignFlipSolution("split_quadratic", lam=2.0)(1.0) == pytest.approx(0.25)

    def test_neg_log_point_values(self):
        h = 0.005
        f = SignFlipSolution("neg_log").sample(uniform_grid(h, 20.0, h))
        star = fast_conjugate(f, np.array([-1.0]))
        assert star.values[0] == pytest.approx(-0.5, abs=2 * h)
        assert SignFlipSolution("neg_log")(1.0) == pytest.approx(-0.5)

    def test_reflection_closure(self):
        # if f passes the sign-flip residual check, so does x -> f(-x)
        h = 0.005
        for member, grid, excl, bound in [
            (SignFlipSolution("ray_indicator"), uniform_grid(-5.0, 5.0, h), 0.0, 2 * h),
            (SignFlipSolution("split_quadratic", lam=0.5), uniform_grid(-11.0, 11.0, h), 0.0, 2 * h),
            (SignFlipSolution("neg_log"), uniform_grid(h, 20.0, h), 10 * h, 4 * h),
        ]:
            rep = grid_fixed_point_residual(
                FLIP, member.sample(grid), window=(-5.0, 5.0), boundary_exclusion=excl
            )
            assert rep.max_abs <= bound
            mirrored = SignFlipSolution(member.kind, lam=member.lam, reflected=True)
            rep_m = grid_fixed_point_residual(
                FLIP, mirrored.sample(-grid[::-1]), window=(-5.0, 5.0), boundary_exclusion=excl
            )
            assert rep_m.max_abs <= bound


class TestConjugate2D:
    def test_energy_self_conjugate(self):
        h = 0.1
        xs = uniform_grid(-3.0, 3.0, h)
        vals = 0.5 * (xs[:, None] ** 2 + xs[None, :] ** 2)
        f = SampledFn2D(xs, xs, vals)
        interior = uniform_grid(-2.0, 2.0, h)
        star = conjugate_2d_brute(f, interior, interior)
        expect = 0.5 * (interior[:, None] ** 2 + interior[None, :] ** 2)
        assert np.max(np.abs(star.values - expect)) <= 2 * h

    def test_quadratic_against_closed_form(self):
        b = np.diag([2.0, 0.5])
        q = QuadraticFn(b, np.zeros(2), 0.0)
        qs = conjugate_quadratic(q)
        h = 0.05
        xs = uniform_grid(-4.0, 4.0, h)
        vals = 0.5 * (2.0 * xs[:, None] ** 2 + 0.5 * xs[None, :] ** 2)
        f = SampledFn2D(xs, xs, vals)
        interior = uniform_grid(-1.5, 1.5, 0.25)
        star = conjugate_2d_brute(f, interior, interior)
        for i, sx in enumerate(interior):
            for j, sy in enumerate(interior):
                assert star.values[i, j] == pytest.approx(qs(np.array([sx, sy])), abs=3 * h)

    def test_quadrant_indicator_support_function(self):
        full = uniform_grid(-5.0, 5.0, 0.5)
        vals = np.zeros((full.size, full.size))
        vals[full < 0.0, :] = np.inf
        vals[:, full < 0.0] = np.inf
        f = SampledFn2D(full, full, vals)
        slopes = uniform_grid(-2.0, 2.0, 1.0)
        star = conjugate_2d_brute(f, slopes, slopes)
        for i, sx in enumerate(slopes):
            for j, sy in enumerate(slopes):
                if sx <= 0.0 and sy <= 0.0:
                    assert star.values[i, j] == 0.0
                else:
                    assert star.values[i, j] == pytest.approx(
                        5.0 * (max(sx, 0.0) + max(sy, 0.0))
                    )

    def test_direct_sum_solves_planar_sign_flip(self):
        # half_square on one axis, split quadratic on the other: the sum
        # solves f(x) = f*(-x) in the plane; checked by brute conjugation
        h = 0.1
        member = SignFlipSolution("split_quadratic", lam=2.0)
        ds = direct_sum([energy(1), member])
        xs = uniform_grid(-3.5, 3.5, h)
        ys = uniform_grid(-3.5, 6.5, h)
        vals = 0.5 * xs[:, None] ** 2 + np.array([member(y) for y in ys])[None, :]
        f = SampledFn2D(xs, ys, vals)
        window = uniform_grid(-3.0, 3.0, h)
        star = conjugate_2d_brute(f, window, window)
        worst = 0.0
        for i, x1 in enumerate(window):
            for j, x2 in enumerate(window):
                direct = ds(np.array([x1, x2]))
                flipped = star.values[window.size - 1 - i, window.size - 1 - j]
                worst = max(worst, abs(direct - flipped))
        assert worst <= 2 * h


class TestFenchelYoung:
    def test_energy_grid_pairs(self, rng):
        xs = np.linspace(-4.0, 4.0, 161)
        f = SampledFn(xs, 0.5 * xs * xs)
        idx = rng.integers(0, xs.size, 100)
        pairs = [(xs[i], float(rng.uniform(-3, 3))) for i in idx]
        rep = fenchel_young_check(f, pairs)
        assert rep.min_gap >= 0.0
        assert rep.max_abs == 0.0

    def test_neg_log_pairs(self, rng):
        h = 0.005
        f = SignFlipSolution("neg_log").sample(uniform_grid(h, 10.0, h))
        xs = f.points[f.finite_mask]
        idx = rng.integers(0, xs.size, 50)
        pairs = [(xs[i], float(rng.uniform(-4, -0.1))) for i in idx]
        rep = fenchel_young_check(f, pairs)
        assert rep.min_gap >= -1e-12

    def test_near_equality_at_subgradient_pairs(self):
        # forward-difference slopes are near-subgradients of convex data,
        # so the inequality is close to tight: every gap stays within O(h)
        h = 0.05
        xs = uniform_grid(-3.0, 3.0, h)
        f = SampledFn(xs, 0.5 * xs * xs)
        pairs = [(xs[i], (f.values[i + 1] - f.values[i]) / h) for i in range(xs.size - 1)]
        rep = fenchel_young_check(f, pairs)
        assert rep.min_gap >= -1e-12
        for x, s in pairs:
            star = fast_conjugate(f, np.array([s])).values[0]
            gap = star + f.values[np.searchsorted(xs, x)] - s * x
            assert -1e-12 <= gap <= 2 * h


class TestGridResidualWindowing:
    def test_window_restricts_reported_nodes(self):
        h = 0.01
        f = SignFlipSolution("half_square").sample(uniform_grid(-5.0, 5.0, h))
        rep = grid_fixed_point_residual(FLIP, f, window=(-1.0, 1.0))
        assert rep.sample_points == 201

    def test_scalar_parameters_required(self):
        f = SignFlipSolution("half_square").sample(uniform_grid(-1.0, 1.0, 0.1))
        p2 = TransformParams(-np.eye(2), np.zeros(2), np.zeros(2), 1.0, 0.0)
        with pytest.raises(Exception):
            grid_fixed_point_residual(p2, f)
