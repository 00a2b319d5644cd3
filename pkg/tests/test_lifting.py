"""Real-lifting identities and symbol blocks."""

import numpy as np
import pytest

from ciblp import (
    LiftingOperators,
    PskConstellation,
    SymbolBlock,
    complexify_precoder,
    expand_precoder,
    extend_symbols,
    realify_precoder,
)


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestOperators:
    def test_selector_identities_exact(self):
        ops = LiftingOperators(n_tx=3, n_users=2)
        np.testing.assert_array_equal(ops.p.T @ ops.p, np.eye(3))
        np.testing.assert_array_equal(ops.q.T @ ops.q, np.eye(3))
        np.testing.assert_array_equal(ops.p.T @ ops.q, np.zeros((3, 3)))
        np.testing.assert_array_equal(ops.q.T @ ops.p, np.zeros((3, 3)))

    def test_rotation_identities_exact(self):
        ops = LiftingOperators(n_tx=2, n_users=3)
        np.testing.assert_array_equal(ops.t @ ops.t, -np.eye(6))
        np.testing.assert_array_equal(ops.t.T, -ops.t)


class TestExtendSymbols:
    def test_real_symbol(self):
        s_ext, s_rot = extend_symbols([1.0 + 0.0j])
        np.testing.assert_array_equal(s_ext, [1.0, 0.0])
        np.testing.assert_array_equal(s_rot, [0.0, -1.0])

    def test_imaginary_symbol(self):
        s_ext, s_rot = extend_symbols([1j])
        np.testing.assert_array_equal(s_ext, [0.0, 1.0])
        np.testing.assert_array_equal(s_rot, [1.0, 0.0])

    def test_two_users(self):
        s_ext, s_rot = extend_symbols([1.0 + 0.0j, 1j])
        np.testing.assert_array_equal(s_ext, [1.0, 0.0, 0.0, 1.0])
        np.testing.assert_array_equal(s_rot, [0.0, 1.0, -1.0, 0.0])

    def test_rotation_matches_operator(self):
        rng = np.random.default_rng(0)
        s = random_complex(rng, 5)
        s /= np.abs(s)
        s_ext, s_rot = extend_symbols(s)
        ops = LiftingOperators(n_tx=1, n_users=5)
        np.testing.assert_allclose(s_rot, ops.t @ s_ext, atol=1e-15)


class TestPrecoderLifting:
    def test_round_trip(self):
        rng = np.random.default_rng(1)
        w = random_complex(rng, (4, 3))
        np.testing.assert_allclose(complexify_precoder(realify_precoder(w)), w)

    def test_lifting_consistency(self):
        # Top half of the expanded precoder applied to s_ext is Re(Ws), the
        # bottom half Im(Ws); the realified precoder gives the two halves
        # directly from s_ext and the rotated lift.
        rng = np.random.default_rng(2)
        for _ in range(25):
            n_tx, k = rng.integers(1, 5, size=2)
            w = random_complex(rng, (n_tx, k))
            s = random_complex(rng, k)
            s /= np.abs(s)
            s_ext, s_rot = extend_symbols(s)
            w_real = realify_precoder(w)
            w_ext = expand_precoder(w_real)
            ws = w @ s
            stacked = w_ext @ s_ext
            np.testing.assert_allclose(stacked[:n_tx], ws.real, atol=1e-12)
            np.testing.assert_allclose(stacked[n_tx:], ws.imag, atol=1e-12)
            np.testing.assert_allclose(w_real @ s_ext, ws.real, atol=1e-12)
            np.testing.assert_allclose(w_real @ s_rot, ws.imag, atol=1e-12)

    def test_expand_matches_operator_form(self):
        rng = np.random.default_rng(3)
        n_tx, k = 3, 2
        w_real = rng.standard_normal((n_tx, 2 * k))
        ops = LiftingOperators(n_tx=n_tx, n_users=k)
        expected = ops.p @ w_real + ops.q @ w_real @ ops.t
        np.testing.assert_allclose(expand_precoder(w_real), expected, atol=1e-15)

    def test_power_identity(self):
        # ||w_real s_ext||^2 + ||w_real s_rot||^2 == ||W s||^2
        rng = np.random.default_rng(4)
        w = random_complex(rng, (5, 3))
        s = random_complex(rng, 3)
        s /= np.abs(s)
        s_ext, s_rot = extend_symbols(s)
        w_real = realify_precoder(w)
        lhs = np.sum((w_real @ s_ext) ** 2) + np.sum((w_real @ s_rot) ** 2)
        np.testing.assert_allclose(lhs, np.sum(np.abs(w @ s) ** 2), rtol=1e-12)


class TestSymbolBlock:
    def test_from_indices(self):
        con = PskConstellation(8)
        idx = np.array([[0, 3], [7, 1]])
        block = SymbolBlock.from_indices(idx, con)
        np.testing.assert_allclose(block.symbols, con.points[idx])
        assert block.n_slots == 2 and block.n_users == 2

    def test_lifted_norms(self):
        con = PskConstellation(8)
        rng = np.random.default_rng(5)
        block = SymbolBlock.from_indices(rng.integers(0, 8, (6, 3)), con)
        np.testing.assert_allclose(np.sum(block.extended**2, axis=1), 3.0, atol=1e-12)
        np.testing.assert_allclose(np.sum(block.rotated**2, axis=1), 3.0, atol=1e-12)

    def test_rotated_is_quadrature_lift(self):
        con = PskConstellation(4)
        block = SymbolBlock.from_indices([[0, 1, 2]], con)
        s = block.symbols[0]
        np.testing.assert_allclose(
            block.rotated[0], np.concatenate([s.imag, -s.real]), atol=1e-15
        )

    def test_non_unit_modulus_rejected(self):
        con = PskConstellation(4)
        with pytest.raises(ValueError):
            SymbolBlock(con, np.array([[0.5 + 0.0j]]))

    def test_bad_indices_rejected(self):
        con = PskConstellation(4)
        with pytest.raises(ValueError):
            SymbolBlock.from_indices([[0, 4]], con)
