import numpy as np
import pytest

from phaseret import (
    Autocorrelation,
    Signal,
    SupportSet,
    autocorrelation,
    classify_roots,
    construct_ambiguous_pair,
    enumerate_factorizations,
    equivalent,
    is_uniform_support,
    poly_roots,
)
import phaseret.oracle


def _signal(values):
    arr = np.asarray(values, dtype=float)
    return Signal(arr.size, arr)


class TestPolyRoots:
    def test_quadratic_with_unit_leading(self):
        roots = np.sort_complex(poly_roots((-1.0, 0.0, 1.0)))
        np.testing.assert_allclose(roots, [-1.0, 1.0], atol=1e-9)

    def test_quadratic_reciprocal_pair(self):
        roots = np.sort_complex(poly_roots((3.0, 10.0, 3.0)))
        np.testing.assert_allclose(roots, [-3.0, -1.0 / 3.0], atol=1e-9)

    def test_degree_ten_planted_roots(self):
        planted = np.array([-3.0, -2.0, -1.5, -0.5, 0.4, 0.8, 1.3, 2.2, 3.5, 5.0])
        coeffs = np.poly(planted)[::-1]
        got = np.sort(poly_roots(coeffs).real)
        np.testing.assert_allclose(got, planted, rtol=1e-7, atol=1e-9)

    def test_quadruple_root_cluster(self):
        roots = poly_roots((1.0, 4.0, 6.0, 4.0, 1.0))
        assert roots.size == 4
        np.testing.assert_allclose(roots, np.full(4, -1.0), atol=1e-3)

    def test_residuals_stay_below_scaled_bound(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            coeffs = rng.standard_normal(rng.integers(3, 13))
            coeffs[-1] += np.sign(coeffs[-1]) + 0.5
            roots = poly_roots(coeffs)
            bound = 1e-8 * float(np.linalg.norm(coeffs))
            deg = coeffs.size - 1
            for r in roots:
                scale = max(1.0, abs(r)) ** deg
                assert abs(np.polyval(coeffs[::-1], r)) / scale <= bound

    def test_ignores_trailing_zero_coefficients(self):
        roots = np.sort_complex(poly_roots((-1.0, 0.0, 1.0, 0.0, 0.0)))
        np.testing.assert_allclose(roots, [-1.0, 1.0], atol=1e-9)

    def test_constant_has_no_roots(self):
        assert poly_roots((5.0,)).size == 0

    def test_rejects_zero_polynomial(self):
        with pytest.raises(ValueError):
            poly_roots((0.0, 0.0, 0.0))

    def test_rejects_excessive_degree(self):
        coeffs = np.zeros(66)
        coeffs[0] = 1.0
        coeffs[-1] = 1.0
        with pytest.raises(ValueError):
            poly_roots(coeffs)


class TestClassifyRoots:
    def test_reciprocal_real_pair(self):
        quads = classify_roots(autocorrelation(_signal((1.0, 3.0))))
        assert len(quads) == 1
        q = quads[0]
        assert q.kind == "real_pair"
        assert q.multiplicity == 1
        assert abs(q.root) == pytest.approx(1.0 / 3.0, abs=1e-6) or abs(
            q.root
        ) == pytest.approx(3.0, abs=1e-6)

    def test_unit_circle_conjugate_pair(self):
        quads = classify_roots(autocorrelation(_signal((1.0, 0.0, 1.0))))
        assert len(quads) == 1
        q = quads[0]
        assert q.kind == "unit_conjugate"
        assert q.multiplicity == 2
        assert abs(q.root) == pytest.approx(1.0, abs=1e-6)
        assert q.root.imag == pytest.approx(1.0, abs=1e-6) or q.root.imag == pytest.approx(
            -1.0, abs=1e-6
        )

    def test_root_on_real_axis_and_unit_circle(self):
        quads = classify_roots(autocorrelation(_signal((1.0, 1.0))))
        assert [(q.root, q.multiplicity, q.kind) for q in quads] == [
            ((-1.0 + 0.0j), 2, "real_unit")
        ]

    def test_generic_complex_orbit(self):
        quads = classify_roots(autocorrelation(_signal((1.0, 0.0, 0.0, 2.0))))
        kinds = sorted(q.kind for q in quads)
        assert kinds == ["generic", "real_pair"]

    def test_two_separate_orbits(self):
        quads = classify_roots(autocorrelation(_signal((1.0, 5.0, 6.0))))
        assert sorted((q.kind, q.multiplicity) for q in quads) == [
            ("real_pair", 1),
            ("real_pair", 1),
        ]

    def test_zero_autocorrelation_has_no_orbits(self):
        assert classify_roots(Autocorrelation(4, np.zeros(4))) == []


class TestEnumerateFactorizations:
    def test_single_class_pair(self):
        classes = enumerate_factorizations(Autocorrelation(2, (10.0, 3.0)))
        assert len(classes) == 1
        assert equivalent(classes[0], _signal((1.0, 3.0)))

    def test_spike(self):
        classes = enumerate_factorizations(Autocorrelation(5, (9.0, 0.0, 0.0, 0.0, 0.0)))
        assert len(classes) == 1
        assert classes[0].values[0] == pytest.approx(3.0)
        assert np.all(classes[0].values[1:] == 0.0)

    def test_zero(self):
        classes = enumerate_factorizations(Autocorrelation(3, np.zeros(3)))
        assert len(classes) == 1
        np.testing.assert_array_equal(classes[0].values, np.zeros(3))

    def test_two_class_example(self):
        classes = enumerate_factorizations(Autocorrelation(3, (62.0, 35.0, 6.0)))
        assert len(classes) == 2
        for target in ((1.0, 5.0, 6.0), (3.0, 7.0, 2.0)):
            assert any(equivalent(c, _signal(target)) for c in classes)

    def test_reflection_only_swap_gives_single_class(self):
        # the orbit swap for (62,35,6) viewed as a signal produces its
        # own reflection, so one class comes back despite the swap
        x = _signal((62.0, 35.0, 6.0))
        classes = enumerate_factorizations(autocorrelation(x))
        assert len(classes) == 1
        assert equivalent(classes[0], x)

    def test_sparsity_filter_prunes_dense_alternatives(self):
        dense = np.zeros(12)
        dense[[0, 2, 7]] = (2.0, -1.0, 3.0)
        x = Signal(12, dense)
        a = autocorrelation(x)
        unrestricted = enumerate_factorizations(a)
        sparse_only = enumerate_factorizations(a, max_nonzeros=3)
        assert len(unrestricted) > len(sparse_only)
        assert len(sparse_only) == 1
        assert equivalent(sparse_only[0], x)
        assert any(equivalent(c, x) for c in unrestricted)

    def test_every_class_reproduces_the_autocorrelation(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            n = int(rng.integers(4, 10))
            k = int(rng.integers(1, 4))
            vals = np.zeros(n)
            idx = rng.choice(n, size=k, replace=False)
            vals[idx] = rng.integers(1, 5, size=k) * rng.choice((-1.0, 1.0), size=k)
            x = Signal(n, vals)
            a = autocorrelation(x)
            classes = enumerate_factorizations(a)
            assert any(equivalent(c, x, tol=1e-6) for c in classes)
            for c in classes:
                back = autocorrelation(c)
                assert float(np.max(np.abs(back.lags - a.lags))) <= 1e-6 * max(
                    1.0, a.lags[0]
                )

    def test_combination_cap(self, monkeypatch):
        monkeypatch.setattr(phaseret.oracle, "_MAX_COMBINATIONS", 1)
        with pytest.raises(ValueError):
            enumerate_factorizations(Autocorrelation(3, (62.0, 35.0, 6.0)))


class TestConstructAmbiguousPair:
    def test_worked_factors(self):
        first, second = construct_ambiguous_pair((1.0, 2.0), (1.0, 3.0))
        np.testing.assert_allclose(first.values, (1.0, 5.0, 6.0))
        np.testing.assert_allclose(second.values, (3.0, 7.0, 2.0))
        np.testing.assert_allclose(
            autocorrelation(first).lags, autocorrelation(second).lags, atol=1e-12
        )
        assert not equivalent(first, second)

    def test_palindromic_factor_degenerates(self):
        first, second = construct_ambiguous_pair((1.0, 2.0), (1.0, 1.0))
        assert equivalent(first, second)

    def test_autocorrelations_always_match(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            g = rng.standard_normal(int(rng.integers(2, 5)))
            h = rng.standard_normal(int(rng.integers(2, 5)))
            first, second = construct_ambiguous_pair(g, h)
            np.testing.assert_allclose(
                autocorrelation(first).lags,
                autocorrelation(second).lags,
                atol=1e-9,
            )

    def test_rejects_empty_factor(self):
        with pytest.raises(ValueError):
            construct_ambiguous_pair((), (1.0, 2.0))


class TestIsUniformSupport:
    @pytest.mark.parametrize(
        "indices, expected",
        [
            ((0, 2, 4, 6), True),
            ((0, 1, 2), True),
            ((0, 2, 5), False),
            ((3,), True),
            ((1, 7), True),
            ((2, 5, 8, 11), True),
            ((0, 3, 6, 10), False),
        ],
    )
    def test_cases(self, indices, expected):
        assert is_uniform_support(SupportSet(12, indices)) is expected
