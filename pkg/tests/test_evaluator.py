import numpy as np
import pytest

from ulset import (
    EmptyContour,
    FunctionalHandle,
    InvalidInput,
    MINUS_INF,
    NU,
    PreconditionFailed,
    SetIntersection,
    SetUnion,
    Shift,
    Strategy,
    complement_closure,
    contour2d,
    evaluate,
    evaluate_batch,
    evaluate_dual,
    evaluate_level_shifted,
    evaluate_many,
    evaluate_scaled,
    make_handle,
)
from ulset.evaluator import KIND_FINITE, KIND_MINUS_INF, KIND_NU
from conftest import three_quadrant_value, neg_orthant, random_polyhedral_fixture, three_quadrant_union


class TestClosedFormValues:
    def test_three_quadrant_values(self, tq_handle):
        assert evaluate(tq_handle, [0.0, -1.0]) is MINUS_INF
        assert evaluate(tq_handle, [-1.0, 0.0]) == -1.0
        assert evaluate(tq_handle, [0.5, 2.0]) == 1.5

    def test_cone_values(self, cone_diag):
        assert evaluate(cone_diag, [-1.0, -1.0]) == -1.0
        assert evaluate(cone_diag, [-2.0, 0.0]) == 0.0

    def test_edge_direction_leaves_domain(self, cone_edge):
        assert evaluate(cone_edge, [0.0, 1.0]) is NU
        assert evaluate(cone_edge, [3.0, -1.0]) == 3.0
        # bisection agrees: no membership up to the bracketing horizon
        hb = make_handle(cone_edge.set, cone_edge.direction.k, strategy="bisection")
        assert evaluate(hb, [0.0, 1.0]) is NU

    def test_complement_closure_handle(self):
        from ulset import ComplementClosure

        cc = ComplementClosure(neg_orthant(2))
        h = make_handle(cc, [-1.0, -1.0], allow_unsupported=True)
        assert h.strategy == Strategy.CLOSED_FORM
        expanded = make_handle(complement_closure(neg_orthant(2)), [-1.0, -1.0])
        rng = np.random.default_rng(12)
        pts = rng.uniform(-4, 4, size=(200, 2))
        vc, kc = evaluate_batch(h, pts)
        ve, ke = evaluate_batch(expanded, pts)
        assert (kc == ke).all()
        fin = kc == KIND_FINITE
        assert np.abs(vc[fin] - ve[fin]).max(initial=0.0) < 1e-12

    def test_shifted_set(self, tq_set):
        h = make_handle(Shift(tq_set, [2.0, 0.0]), [1.0, 0.0])
        assert evaluate(h, [2.0, -1.0]) is MINUS_INF
        hb = make_handle(Shift(tq_set, [2.0, 0.0]), [1.0, 0.0], strategy="bisection")
        assert evaluate(hb, [2.0, -1.0]) is MINUS_INF
        v, vb = evaluate(h, [2.5, 2.0]), evaluate(hb, [2.5, 2.0])
        assert abs(v.value - vb.value) < 1e-6

    def test_dimension_mismatch(self, cone_diag):
        with pytest.raises(InvalidInput):
            evaluate(cone_diag, [0.0, 0.0, 0.0])

    def test_closed_form_rejected_for_intersection(self):
        s = SetIntersection((neg_orthant(2), neg_orthant(2)))
        with pytest.raises(InvalidInput):
            make_handle(s, [1.0, 1.0], strategy="closed_form")
        assert make_handle(s, [1.0, 1.0]).strategy == Strategy.BISECTION


class TestBisectionAgainstClosedForm:
    def test_three_quadrant_grid(self, tq_set):
        hc = make_handle(tq_set, [1.0, 0.0])
        hb = make_handle(tq_set, [1.0, 0.0], strategy="bisection")
        xs = np.linspace(-3, 3, 31)
        pts = np.array([[x, y] for x in xs for y in xs])
        vc, kc = evaluate_batch(hc, pts)
        vb, kb = evaluate_batch(hb, pts)
        assert (kc == kb).all()
        fin = kc == KIND_FINITE
        assert np.abs(vc[fin] - vb[fin]).max() < 1e-6

    def test_random_fixtures(self):
        rng = np.random.default_rng(2024)
        for _ in range(5):
            dim = int(rng.integers(2, 4))
            s, k = random_polyhedral_fixture(rng, dim)
            hc = make_handle(s, k, t_max=1e6)
            hb = make_handle(s, k, strategy="bisection", t_max=1e6)
            pts = rng.uniform(-10, 10, size=(500, dim))
            vc, kc = evaluate_batch(hc, pts)
            vb, kb = evaluate_batch(hb, pts)
            assert (kc == kb).all()
            fin = kc == KIND_FINITE
            if fin.any():
                assert np.abs(vc[fin] - vb[fin]).max() < 1e-6

    def test_union_is_min_of_children(self):
        rng = np.random.default_rng(11)
        s, k = random_polyhedral_fixture(rng, 2)
        if not isinstance(s, SetUnion):
            s = SetUnion((s, Shift(s, [1.0, 1.0])))
        h = make_handle(s, k, t_max=1e6)
        pts = rng.uniform(-8, 8, size=(300, 2))
        vals, kinds = evaluate_batch(h, pts)
        child_handles = [make_handle(m, k, t_max=1e6) for m in s.members]
        parts = [evaluate_batch(ch, pts) for ch in child_handles]
        for i in range(len(pts)):
            kinds_i = [kk[i] for _, kk in parts]
            vals_i = [vv[i] for vv, kk in parts if kk[i] == KIND_FINITE]
            if KIND_MINUS_INF in kinds_i:
                assert kinds[i] == KIND_MINUS_INF
            elif vals_i:
                assert kinds[i] == KIND_FINITE
                assert abs(vals[i] - min(vals_i)) < 1e-9
            else:
                assert kinds[i] == KIND_NU


class TestInvariants:
    def test_translation_invariance_closed(self, tq_handle):
        rng = np.random.default_rng(1)
        k = tq_handle.direction.k
        pts = rng.uniform(-5, 5, size=(200, 2))
        ts = rng.uniform(-5, 5, size=200)
        base = evaluate_many(tq_handle, pts)
        moved = evaluate_many(tq_handle, pts + ts[:, None] * k)
        for v0, v1, t in zip(base, moved, ts):
            if v0.is_finite:
                assert abs(v1.value - (v0.value + t)) <= 1e-7
            else:
                assert v1 is MINUS_INF if v0.is_minus_inf else v1 is NU

    def test_sublevel_identity_sampled(self, tq_handle):
        from ulset import contains_many

        rng = np.random.default_rng(2)
        k = tq_handle.direction.k
        pts = rng.uniform(-5, 5, size=(500, 2))
        ts = rng.uniform(-5, 5, size=500)
        vals = evaluate_many(tq_handle, pts)
        member = contains_many(tq_handle.set, pts - ts[:, None] * k, 1e-6)
        for v, t, m in zip(vals, ts, member):
            if v.is_finite and abs(v.value - t) <= 1e-6:
                continue
            lhs = v.is_minus_inf or (v.is_finite and v.value <= t)
            assert lhs == bool(m)

    def test_minimizer_invariance_under_scaling(self, tq_set):
        rng = np.random.default_rng(3)
        F = rng.uniform(-3, 3, size=(40, 2))
        base = make_handle(tq_set, [1.0, 0.0])
        vals0, kinds0 = evaluate_batch(base, F)
        fin = kinds0 == KIND_FINITE
        arg0 = set(np.flatnonzero(fin & (vals0 <= vals0[fin].min() + 1e-9)))
        for lam in (0.5, 2.0, 10.0):
            h = make_handle(tq_set, [lam, 0.0])
            vals, kinds = evaluate_batch(h, F)
            fin2 = kinds == KIND_FINITE
            arg = set(np.flatnonzero(fin2 & (vals <= vals[fin2].min() + 1e-9)))
            assert arg == arg0


class TestScaledAndShifted:
    def test_scaled_three_quadrant(self, tq_handle):
        assert evaluate_scaled(tq_handle, 2.0, [0.5, 2.0]) == 0.75
        assert evaluate_scaled(tq_handle, 1.0, [0.5, 2.0]) == 1.5
        assert evaluate_scaled(tq_handle, 2.0, [0.0, -1.0]) is MINUS_INF
        with pytest.raises(InvalidInput):
            evaluate_scaled(tq_handle, 0.0, [0.5, 2.0])

    def test_scaled_matches_direct_double_direction(self):
        # two independent bisections, tight refinement to meet 1e-8
        rng = np.random.default_rng(4)
        s, k = random_polyhedral_fixture(rng, 2)
        h1 = make_handle(s, k, strategy="bisection", t_max=1e6, tol=1e-10)
        h2 = make_handle(s, 2.0 * k, strategy="bisection", t_max=1e6, tol=1e-10)
        pts = rng.uniform(-6, 6, size=(100, 2))
        for y in pts:
            v1 = evaluate_scaled(h1, 2.0, y)
            v2 = evaluate(h2, y)
            if v1.is_finite:
                assert abs(v1.value - v2.value) < 1e-8
            else:
                assert v1 == v2

    def test_level_shift_three_quadrant(self, tq_handle):
        assert evaluate_level_shifted(tq_handle, 0.0, [-1.0, 0.0]) == -1.0
        assert evaluate_level_shifted(tq_handle, 1.0, [-1.0, 0.0]) == -2.0

    def test_level_shift_matches_shifted_set(self, tq_set):
        rng = np.random.default_rng(5)
        c = 1.75
        k = np.array([1.0, 0.0])
        h = make_handle(tq_set, k)
        shifted = make_handle(Shift(tq_set, c * k), k, strategy="bisection", tol=1e-10)
        pts = rng.uniform(-4, 4, size=(100, 2))
        for y in pts:
            lhs = evaluate_level_shifted(h, c, y)
            rhs = evaluate(shifted, y)
            if lhs.is_finite:
                assert abs(lhs.value - rhs.value) < 1e-8
            else:
                assert lhs == rhs


class TestDual:
    def test_cone_dual_matches_direct(self, cone_diag):
        assert evaluate_dual(cone_diag, [-1.0, -1.0]) == -1.0
        assert abs(evaluate_dual(cone_diag, [0.0, 0.0]).value) < 1e-12

    def test_dual_against_bisection_on_complement(self, cone_diag):
        rng = np.random.default_rng(6)
        comp = complement_closure(cone_diag.set)
        neg_k = -cone_diag.direction.k
        oracle = make_handle(comp, neg_k, strategy="bisection")
        pts = rng.uniform(-5, 5, size=(100, 2))
        for y in pts:
            d = evaluate_dual(cone_diag, y)
            o = evaluate(oracle, y)
            if d.is_finite:
                assert abs(d.value + o.value) < 1e-6

    def test_strict_recession_precondition_fails_on_three_quadrants(self, tq_handle):
        with pytest.raises(PreconditionFailed):
            evaluate_dual(tq_handle, [0.0, 0.0])

    def test_non_polyhedral_rejected(self):
        s = SetIntersection((neg_orthant(2), neg_orthant(2)))
        h = make_handle(s, [1.0, 1.0])
        with pytest.raises(PreconditionFailed):
            evaluate_dual(h, [0.0, 0.0])


class TestContour:
    def test_orthant_zero_level_traces_boundary(self, cone_diag):
        polys = contour2d(cone_diag, 0.0, (-2.0, -2.0, 2.0, 2.0), 81)
        assert polys
        pts = np.concatenate(polys)
        cell = 4.0 / 80

        def dist_to_boundary(p):
            x, y = p
            d1 = abs(y) if x <= 0 else np.hypot(x, y)   # edge y=0, x<=0
            d2 = abs(x) if y <= 0 else np.hypot(x, y)   # edge x=0, y<=0
            return min(d1, d2)

        worst = max(dist_to_boundary(p) for p in pts)
        assert worst <= 2 * cell
        # boundary is covered too: sampled boundary points near some polyline point
        bnd = [(-2 + 0.05 * i, 0.0) for i in range(41)] + [(0.0, -2 + 0.05 * i) for i in range(41)]
        for q in bnd:
            d = np.min(np.linalg.norm(pts - np.asarray(q), axis=1))
            assert d <= 2 * cell

    def test_level_shift_translates_contour(self, cone_diag):
        t = 0.5
        k = cone_diag.direction.k
        base = np.concatenate(contour2d(cone_diag, 0.0, (-2.0, -2.0, 2.0, 2.0), 81))
        lifted = np.concatenate(contour2d(cone_diag, t, (-2.0 + t, -2.0 + t, 2.0 + t, 2.0 + t), 81))
        moved = base + t * k
        for p in moved[::7]:
            d = np.min(np.linalg.norm(lifted - p, axis=1))
            assert d <= 2 * (4.0 / 80)

    def test_three_quadrant_zero_set_matches_formula(self, tq_handle):
        polys = contour2d(tq_handle, 0.0, (-3.0, -3.0, 3.0, 3.0), 121)
        pts = np.concatenate(polys)
        cell = 6.0 / 120
        tol = 2 * cell + 1e-9
        # traced points lie on the 0-sublevel boundary staircase: x=-1 above
        # y=0, the fold y=0 on [-1,0], x=0 on the middle band, and the fold
        # y=-1 right of x=0 where the value jumps from -inf to positive
        for x, y in pts:
            d1 = abs(x + 1.0) if y >= -tol else np.inf
            d2 = abs(y - 0.0) if -1 - tol <= x <= tol else np.inf
            d3 = abs(x - 0.0) if -1 - tol <= y <= tol else np.inf
            d4 = abs(y + 1.0) if x >= -tol else np.inf
            assert min(d1, d2, d3, d4) <= tol
        # and the formula's zero set is covered: x=0 on (-1,0], x=-1 on y>0
        zero_set = [(0.0, -1 + 0.05 * i) for i in range(1, 21)]
        zero_set += [(-1.0, 0.05 * i) for i in range(1, 60)]
        for q in zero_set:
            d = np.min(np.linalg.norm(pts - np.asarray(q), axis=1))
            assert d <= tol

    def test_all_nu_raises_empty(self, cone_edge):
        # domain of the edge handle is {y2 <= 0}; sample far above it
        with pytest.raises(EmptyContour):
            contour2d(cone_edge, 0.0, (2.0, 2.0, 5.0, 5.0), 16)

    def test_grid_bounds_validated(self, cone_diag):
        with pytest.raises(InvalidInput):
            contour2d(cone_diag, 0.0, (-1.0, -1.0, 1.0, 1.0), 7)
        with pytest.raises(InvalidInput):
            contour2d(cone_diag, 0.0, (-1.0, -1.0, 1.0, 1.0), 5000)


class TestHandleValidation:
    def test_tolerances_validated(self, tq_set):
        from ulset import certify_direction

        d = certify_direction(tq_set, [1.0, 0.0])
        with pytest.raises(InvalidInput):
            FunctionalHandle(tq_set, d, Strategy.BISECTION, t_max=-1.0)
        with pytest.raises(InvalidInput):
            FunctionalHandle(tq_set, d, Strategy.BISECTION, tol=0.0)

    def test_direction_dim_checked(self, tq_set):
        from ulset import certify_direction

        d = certify_direction(neg_orthant(3), [1.0, 1.0, 1.0])
        with pytest.raises(InvalidInput):
            FunctionalHandle(tq_set, d, Strategy.BISECTION)
