import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lawson_kdv.spectral_core import (
    DimensionError,
    Field,
    Grid,
    InvalidFieldError,
    ParameterError,
    SymmetryError,
    bernstein_constant,
    difference_symbol,
    finite_difference,
    inner_discrete,
    norm,
    pad,
    project,
    propagate_airy,
    sobolev_norm,
    sup_norm,
    to_grid,
    to_spectrum,
)


def direct_dft(values, L):
    """(1/n) sum_j v_j exp(-i l pi x_j / L), by explicit loops."""
    n = len(values)
    N = (n - 1) // 2
    h = 2 * L / n
    out = []
    for l in range(-N, N + 1):
        s = 0j
        for j, v in enumerate(values):
            s += v * cmath.exp(-1j * l * math.pi * (-L + j * h) / L)
        out.append(s / n)
    return np.array(out)


def random_field(grid, seed=0):
    rng = np.random.default_rng(seed)
    return Field(grid, rng.uniform(-1, 1, grid.size))


class TestGrid:
    def test_odd_point_count_and_nodes(self):
        g = Grid(5, 30.0)
        assert g.size == 11
        x = g.nodes
        assert x[0] == -30.0
        assert math.isclose(x[-1], 30.0 - g.h)
        assert np.all(np.diff(x) > 0)
        assert np.allclose(np.diff(x), g.h, rtol=1e-13)
        assert math.isclose(g.h * g.size, 60.0, rel_tol=1e-15)

    def test_from_h_picks_smallest_grid_not_coarser_than_h(self):
        g = Grid.from_h(30.0, 1 / 40)
        assert g.N == 1200
        assert g.h <= 1 / 40
        assert Grid(g.N - 1, 30.0).h > 1 / 40

    @pytest.mark.parametrize("N, L", [(0, 1.0), (-3, 1.0), (2.5, 1.0), (4, 0.0), (4, -1.0)])
    def test_rejects_bad_parameters(self, N, L):
        with pytest.raises(ParameterError):
            Grid(N, L)

    def test_field_rejects_wrong_length(self):
        with pytest.raises(DimensionError):
            Field(Grid(4), np.zeros(8))

    def test_nonfinite_field_is_invalid(self):
        f = Field(Grid(3), [0, 1, np.nan, 0, 0, 0, 0])
        assert not f.valid
        with pytest.raises(InvalidFieldError):
            propagate_airy(f, 0.1)


class TestTransforms:
    @pytest.mark.parametrize("L", [math.pi, 30.0])
    def test_matches_direct_sum(self, L):
        rng = np.random.default_rng(3)
        v = rng.standard_normal(9)
        assert np.allclose(to_spectrum(v), direct_dft(v, L), atol=1e-14)

    @pytest.mark.parametrize("k", range(-4, 5))
    def test_exact_mode(self, k):
        g = Grid(4, 30.0)
        v = np.exp(1j * k * np.pi * g.nodes / g.L)
        c = to_spectrum(v)
        expected = np.zeros(9)
        expected[k + 4] = 1.0
        assert np.allclose(c, expected, atol=1e-14)

    def test_constant(self):
        c = to_spectrum(np.full(7, 2.5))
        assert np.allclose(c, [0, 0, 0, 2.5, 0, 0, 0], atol=1e-15)

    def test_aliasing_of_mode_N_plus_1(self):
        # direct DFT sum with N = 3: mode N+1 folds onto -N with sign (-1)^(2N+1)
        g = Grid(3)
        v = np.exp(1j * 4 * g.nodes)
        expected = np.zeros(7, complex)
        expected[0] = -1.0
        assert np.allclose(direct_dft(v, g.L), expected, atol=1e-13)
        assert np.allclose(to_spectrum(v), expected, atol=1e-13)

    def test_even_length_rejected(self):
        with pytest.raises(DimensionError):
            to_spectrum(np.zeros(8))

    @pytest.mark.parametrize("N", [4, 16, 64, 256])
    def test_roundtrip(self, N):
        v = np.random.default_rng(N).uniform(-1, 1, 2 * N + 1)
        back = to_grid(to_spectrum(v))
        assert np.max(np.abs(back - v)) <= 1e-13 * np.max(np.abs(v))

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, st.integers(1, 40).map(lambda N: 2 * N + 1),
                  elements=st.floats(-1e3, 1e3)))
    def test_roundtrip_property(self, v):
        back = to_grid(to_spectrum(v))
        assert np.max(np.abs(back - v)) <= 1e-13 * max(1.0, np.max(np.abs(v)))

    @settings(max_examples=30, deadline=None)
    @given(arrays(np.float64, 11, elements=st.floats(-10, 10)))
    def test_hermitian_symmetry(self, v):
        c = to_spectrum(v)
        assert np.allclose(c[::-1], np.conj(c), atol=1e-13)

    def test_cosine_pair(self):
        g = Grid(4)
        c = np.zeros(9, complex)
        c[4 + 1] = c[4 - 1] = 0.5
        assert np.allclose(to_grid(c), np.cos(g.nodes), atol=1e-14)

    def test_zero_coeffs(self):
        assert np.all(to_grid(np.zeros(9)) == 0)

    def test_lone_mode_is_not_real(self):
        c = np.zeros(9, complex)
        c[5] = 1.0
        with pytest.raises(SymmetryError):
            to_grid(c)


class TestProjection:
    def test_identity_at_full_cutoff(self):
        c = to_spectrum(np.random.default_rng(1).uniform(-1, 1, 11))
        assert np.array_equal(project(c, 5), c)

    def test_supported_input_unchanged(self):
        c = np.zeros(11, complex)
        c[5] = 1.0
        c[4] = c[6] = 0.3
        assert np.array_equal(pad(project(c, 2), 5), c)

    def test_idempotent(self):
        c = to_spectrum(np.random.default_rng(2).uniform(-1, 1, 21))
        p = project(c, 4)
        assert np.array_equal(project(p, 4), p)

    def test_cutoff_above_N(self):
        with pytest.raises(ParameterError):
            project(np.zeros(7), 4)


class TestAiryPropagator:
    def test_zero_time_is_identity(self):
        f = random_field(Grid(8))
        assert np.array_equal(propagate_airy(f, 0.0).values, f.values)

    @pytest.mark.parametrize("t", [0.3, -1.7, 12.0])
    def test_single_mode_translation(self, t):
        g = Grid(8)
        f = g.sample(np.sin)
        assert np.allclose(propagate_airy(f, t).values, np.sin(g.nodes + t), atol=1e-14)

    def test_inverse(self):
        f = random_field(Grid(16, 30.0))
        back = propagate_airy(propagate_airy(f, 0.8), -0.8)
        assert np.allclose(back.values, f.values, atol=1e-13)

    @pytest.mark.parametrize("m", [0, 1, 2, 3])
    def test_preserves_sobolev_seminorms(self, m):
        f = random_field(Grid(32, 30.0), seed=m)
        g = propagate_airy(f, 2.3)
        assert math.isclose(norm(g, "h", m), norm(f, "h", m), rel_tol=1e-13)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 64), st.floats(-50, 50), st.integers(0, 2**32 - 1))
    def test_isometry_property(self, N, t, seed):
        f = random_field(Grid(N), seed)
        assert math.isclose(norm(propagate_airy(f, t)), norm(f), rel_tol=1e-13)


class TestFiniteDifferences:
    def test_second_difference_of_constant(self):
        f = Field(Grid(5), np.full(11, 3.0))
        assert np.all(finite_difference(f, "second").values == 0)

    @pytest.mark.parametrize("kind", ["centered", "second", "forward", "backward"])
    def test_stencil_symbol(self, kind):
        g = Grid(6, 2.0)
        for k in range(-g.N, g.N + 1):
            mode = np.exp(1j * k * np.pi * g.nodes / g.L)
            re = finite_difference(Field(g, mode.real), kind).values
            im = finite_difference(Field(g, mode.imag), kind).values
            assert np.allclose(re + 1j * im, difference_symbol(g, kind)[k + g.N] * mode, atol=1e-12)

    def test_analytic_symbols(self):
        g = Grid(6, 2.0)
        theta = g.modes * np.pi * g.h / g.L
        assert np.allclose(difference_symbol(g, "centered"), 1j * np.sin(theta) / g.h)
        assert np.allclose(difference_symbol(g, "second"), 2 * (np.cos(theta) - 1) / g.h**2)

    def test_centered_is_mean_of_one_sided(self):
        f = random_field(Grid(10))
        avg = 0.5 * (finite_difference(f, "forward").values + finite_difference(f, "backward").values)
        assert np.allclose(finite_difference(f, "centered").values, avg, atol=1e-13)

    def test_unknown_kind(self):
        with pytest.raises(ParameterError):
            finite_difference(random_field(Grid(3)), "upwind")


class TestNorms:
    def test_constant_l2(self):
        f = Field(Grid(6), np.full(13, 2.0))
        assert math.isclose(norm(f), 2.0 * math.sqrt(2 * math.pi), rel_tol=1e-14)

    @pytest.mark.parametrize("N", [4, 16, 64, 256])
    def test_discrete_equals_l2(self, N):
        f = random_field(Grid(N, 7.0), N)
        assert math.isclose(norm(f, "discrete"), norm(f, "l2"), rel_tol=1e-13)

    def test_seminorm_of_sine(self):
        # |sin(kx)|_m^2 = pi k^{2m}
        g = Grid(8)
        f = g.sample(lambda x: np.sin(3 * x))
        for m in range(4):
            assert math.isclose(norm(f, "h", m), math.sqrt(math.pi) * 3**m, rel_tol=1e-13)

    def test_unsupported_order(self):
        f = random_field(Grid(4))
        with pytest.raises(ParameterError):
            norm(f, "h", 4)
        with pytest.raises(ParameterError):
            sobolev_norm(f, -1)

    @pytest.mark.parametrize("L", [math.pi, 30.0])
    def test_nikolski(self, L):
        for seed in range(20):
            f = random_field(Grid(12, L), seed)
            assert sup_norm(f) <= norm(f) / math.sqrt(f.grid.h) * (1 + 1e-13)

    def test_nikolski_sharp_for_dirichlet_kernel(self):
        # Dirichlet kernel centred on the node x = -pi attains the bound there
        g = Grid(7)
        f = Field.from_coeffs(g, (-1.0) ** g.modes)
        assert math.isclose(norm(f, "linf"), norm(f) / math.sqrt(g.h), rel_tol=1e-13)

    def test_bernstein(self):
        g = Grid(20, 5.0)
        for seed in range(10):
            f = random_field(g, seed)
            for mu in range(4):
                for m in range(mu, 4):
                    assert sobolev_norm(f, m) <= bernstein_constant(g, mu, m) * sobolev_norm(f, mu) * (1 + 1e-13)

    def test_bernstein_constant_scales_like_inverse_h(self):
        # C h^{m - mu} stays bounded as the grid is refined
        vals = [bernstein_constant(Grid(N), 1, 3) * Grid(N).h ** 2 for N in (16, 64, 256, 1024)]
        assert max(vals) < 1.01 * np.pi**2
        assert np.all(np.diff(vals) > 0)

    def test_bernstein_attained_by_cutoff_mode(self):
        g = Grid(9)
        f = g.sample(lambda x: np.cos(9 * x))
        assert math.isclose(sobolev_norm(f, 2), bernstein_constant(g, 0, 2) * sobolev_norm(f, 0),
                            rel_tol=1e-12)


class TestInnerProduct:
    def test_discrete_orthogonality(self):
        g = Grid(5, 3.0)
        for k in range(-5, 6):
            for l in range(-5, 6):
                ek = np.exp(1j * k * np.pi * g.nodes / g.L)
                el = np.exp(1j * l * np.pi * g.nodes / g.L)
                ip = g.h * np.sum(ek * np.conj(el))
                assert abs(ip - (2 * g.L if k == l else 0)) < 1e-12

    def test_symmetric(self):
        g = Grid(10)
        u, v = random_field(g, 1), random_field(g, 2)
        assert inner_discrete(u, v) == inner_discrete(v, u)

    def test_grid_mismatch(self):
        with pytest.raises(DimensionError):
            inner_discrete(random_field(Grid(4)), random_field(Grid(5)))

    def test_agrees_with_interpolant_inner_product(self):
        g = Grid(10, 2.0)
        u, v = random_field(g, 1), random_field(g, 2)
        l2 = 2 * g.L * np.sum(u.coeffs * np.conj(v.coeffs)).real
        assert math.isclose(inner_discrete(u, v), l2, rel_tol=1e-12)

    @pytest.mark.parametrize("N", [4, 16, 64])
    def test_summation_by_parts(self, N):
        g = Grid(N)
        for seed in range(100):
            rng = np.random.default_rng(seed)
            a, b = Field(g, rng.uniform(-1, 1, g.size)), Field(g, rng.uniform(-1, 1, g.size))
            lhs = inner_discrete(a, finite_difference(b, "second"))
            rhs = -inner_discrete(finite_difference(a, "forward"), finite_difference(b, "forward"))
            scale = g.h * np.sum(np.abs(a.values * finite_difference(b, "second").values))
            assert abs(lhs - rhs) <= 1e-12 * scale
