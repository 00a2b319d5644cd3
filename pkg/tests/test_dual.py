"""Dual coupling assembly, multiplier/precoder recovery, end-to-end solve."""

import numpy as np
import pytest

from ciblp import (
    DegenerateDualError,
    PskConstellation,
    SingularGramError,
    SymbolBlock,
    block_geometry,
    block_scaling,
    build_block_gram,
    coupling_matrix,
    power_split_matrices,
    rayleigh_channel,
    recover_mu,
    recover_precoder,
    solve_ci_blp,
)


def make_instance(seed, n_users=2, n_tx=3, n_slots=4, order=8, max_tries=20):
    """Random channel + block with a well-conditioned Gram matrix."""
    rng = np.random.default_rng(seed)
    con = PskConstellation(order)
    channel = rayleigh_channel(rng, n_users, n_tx)
    for _ in range(max_tries):
        block = SymbolBlock.from_indices(
            rng.integers(0, order, (n_slots, n_users)), con
        )
        try:
            gram = build_block_gram(block)
        except SingularGramError:
            continue
        return channel, block, block_geometry(channel, block), gram
    raise RuntimeError("could not draw a well-conditioned block")


def triple_sum_split(geometries, gram, n_users):
    """Literal triple-loop expansion of the two power matrices (test oracle)."""
    n = len(geometries)
    dim = 2 * n_users * n
    f = np.zeros((dim, dim))
    g = np.zeros((dim, dim))
    a = [geom.re_map for geom in geometries]
    b = [geom.im_map for geom in geometries]
    two_k = 2 * n_users
    for ell in range(n):
        for m in range(n):
            for j in range(n):
                f_block = (
                    gram.ss[ell, j] * gram.ss[m, ell] * (a[m] @ a[j].T)
                    + gram.cs[ell, j] * gram.ss[m, ell] * (a[m] @ b[j].T)
                    + gram.ss[ell, j] * gram.sc[m, ell] * (b[m] @ a[j].T)
                    + gram.cs[ell, j] * gram.sc[m, ell] * (b[m] @ b[j].T)
                )
                g_block = (
                    gram.sc[ell, j] * gram.cs[m, ell] * (a[m] @ a[j].T)
                    + gram.cc[ell, j] * gram.cs[m, ell] * (a[m] @ b[j].T)
                    + gram.sc[ell, j] * gram.cc[m, ell] * (b[m] @ a[j].T)
                    + gram.cc[ell, j] * gram.cc[m, ell] * (b[m] @ b[j].T)
                )
                f[m * two_k : (m + 1) * two_k, j * two_k : (j + 1) * two_k] += f_block
                g[m * two_k : (m + 1) * two_k, j * two_k : (j + 1) * two_k] += g_block
    return f, g


class TestCouplingMatrix:
    def test_single_slot_single_user_formula(self):
        con = PskConstellation(4)
        channel = np.array([[1.0 + 0.0j]])
        block = SymbolBlock(con, np.array([[1.0 + 0.0j]]))
        geoms = block_geometry(channel, block)
        gram = build_block_gram(block)
        # ss = cc = 1 and cs = sc = 0, so U = A A^T + B B^T.
        a, b = geoms[0].re_map, geoms[0].im_map
        np.testing.assert_allclose(
            coupling_matrix(geoms, gram), a @ a.T + b @ b.T, atol=1e-12
        )

    def test_symmetry(self):
        _, _, geoms, gram = make_instance(0)
        u = coupling_matrix(geoms, gram)
        assert np.abs(u - u.T).max() <= 1e-10 * np.abs(u).max()

    def test_psd_up_to_roundoff(self):
        for seed in range(5):
            _, _, geoms, gram = make_instance(seed, n_users=2, n_tx=2, n_slots=3)
            u = coupling_matrix(geoms, gram)
            eigval = np.linalg.eigvalsh(u)
            assert eigval[0] >= -1e-8 * max(abs(eigval[-1]), 1e-30)

    def test_quadratic_form_equals_scaled_block_power(self):
        # d'Ud must equal (2 mu)^2 times the block power of the precoder
        # recovered from the same weights, for arbitrary simplex weights.
        channel, block, geoms, gram = make_instance(1)
        u = coupling_matrix(geoms, gram)
        rng = np.random.default_rng(42)
        for _ in range(5):
            delta = rng.random(u.shape[0])
            delta /= delta.sum()
            mu = 0.7
            precoder = recover_precoder(delta, mu, geoms, gram, block)
            np.testing.assert_allclose(
                float(delta @ u @ delta),
                (2.0 * mu) ** 2 * precoder.block_power,
                rtol=1e-9,
            )


class TestPowerSplit:
    def test_single_slot_single_user(self):
        con = PskConstellation(4)
        channel = np.array([[1.0 + 0.0j]])
        block = SymbolBlock(con, np.array([[1.0 + 0.0j]]))
        geoms = block_geometry(channel, block)
        gram = build_block_gram(block)
        f, g = power_split_matrices(geoms, gram)
        a, b = geoms[0].re_map, geoms[0].im_map
        np.testing.assert_allclose(f, a @ a.T, atol=1e-12)
        np.testing.assert_allclose(g, b @ b.T, atol=1e-12)
        np.testing.assert_allclose(f + g, coupling_matrix(geoms, gram), atol=1e-12)

    def test_matches_triple_loop_expansion(self):
        _, block, geoms, gram = make_instance(2, n_users=2, n_tx=2, n_slots=3)
        f, g = power_split_matrices(geoms, gram)
        f_ref, g_ref = triple_sum_split(geoms, gram, block.n_users)
        np.testing.assert_allclose(f, f_ref, atol=1e-10)
        np.testing.assert_allclose(g, g_ref, atol=1e-10)

    def test_split_sums_to_coupling(self):
        for seed in range(10):
            _, _, geoms, gram = make_instance(seed, n_users=2, n_tx=4, n_slots=4)
            f, g = power_split_matrices(geoms, gram)
            u = coupling_matrix(geoms, gram)
            assert np.linalg.norm(f + g - u) <= 1e-10 * np.linalg.norm(u)

    def test_split_terms_match_power_decomposition(self):
        # d'Fd / (2mu)^2 is the power through the extended lifts only, and
        # d'Gd the power through the rotated lifts.
        channel, block, geoms, gram = make_instance(3)
        f, g = power_split_matrices(geoms, gram)
        rng = np.random.default_rng(9)
        delta = rng.random(f.shape[0])
        delta /= delta.sum()
        mu = 1.3
        precoder = recover_precoder(delta, mu, geoms, gram, block)
        w_real = precoder.w_real
        power_ext = float(np.sum((block.extended @ w_real.T) ** 2))
        power_rot = float(np.sum((block.rotated @ w_real.T) ** 2))
        np.testing.assert_allclose(
            float(delta @ f @ delta), (2 * mu) ** 2 * power_ext, rtol=1e-9
        )
        np.testing.assert_allclose(
            float(delta @ g @ delta), (2 * mu) ** 2 * power_rot, rtol=1e-9
        )


class TestRecoverMu:
    def test_plug_in_value(self):
        # d'Ud = 4 with N*p0 = 1 gives mu = 1.
        u = np.diag([8.0, 8.0])
        delta = np.array([0.5, 0.5])
        assert recover_mu(delta, u, n_slots=1, p0=1.0) == pytest.approx(1.0)

    def test_degenerate_form_raises(self):
        with pytest.raises(DegenerateDualError):
            recover_mu(np.array([1.0, 0.0]), np.zeros((2, 2)), 1, 1.0)


class TestRecoverPrecoder:
    def test_zero_weights_give_zero_precoder(self):
        _, block, geoms, gram = make_instance(4)
        precoder = recover_precoder(
            np.zeros(2 * block.n_users * block.n_slots), 1.0, geoms, gram, block
        )
        np.testing.assert_array_equal(precoder.w_real, 0.0)
        np.testing.assert_array_equal(precoder.w, 0.0)

    def test_nonpositive_mu_rejected(self):
        _, block, geoms, gram = make_instance(5)
        with pytest.raises(ValueError):
            recover_precoder(
                np.ones(2 * block.n_users * block.n_slots), 0.0, geoms, gram, block
            )


class TestSolveEndToEnd:
    def test_micro_case(self):
        con = PskConstellation(4)
        block = SymbolBlock(con, np.array([[np.exp(1j * np.pi / 4.0)]]))
        precoder = solve_ci_blp(np.array([[1.0 + 0.0j]]), block, 1.0)
        np.testing.assert_allclose(precoder.w, [[1.0]], atol=1e-9)
        assert precoder.certificate.t == pytest.approx(1.0, abs=1e-9)
        assert precoder.block_power == pytest.approx(1.0, rel=1e-9)

    def test_certificate_consistency(self):
        for seed in range(8):
            channel, block, geoms, gram = make_instance(seed)
            precoder = solve_ci_blp(channel, block, 1.0)
            n, p0 = block.n_slots, 1.0
            # Power constraint active.
            assert precoder.block_power == pytest.approx(n * p0, rel=1e-6)
            # Reported t is the minimum recomputed scaling...
            scalings = block_scaling(precoder.w_real, geoms, block)
            assert precoder.certificate.t == pytest.approx(scalings.min(), abs=1e-9)
            # ...and matches the dual objective value sqrt(N p0 d'Ud).
            u = coupling_matrix(geoms, gram)
            delta = precoder.certificate.delta
            t_dual = np.sqrt(n * p0 * float(delta @ u @ delta))
            assert precoder.certificate.t == pytest.approx(t_dual, rel=1e-6)
            # Complementary slackness: active weights sit at the minimum.
            active = delta > 1e-6
            np.testing.assert_allclose(
                scalings.ravel()[active], precoder.certificate.t, atol=1e-5
            )

    def test_stationarity_residual(self):
        channel, block, geoms, gram = make_instance(11)
        precoder = solve_ci_blp(channel, block, 1.0)
        delta = precoder.certificate.delta.reshape(block.n_slots, -1)
        lhs = 2.0 * precoder.certificate.mu * (precoder.w_real @ gram.matrix)
        rhs = np.zeros_like(lhs)
        for n, geom in enumerate(geoms):
            rhs += np.outer(geom.re_map.T @ delta[n], block.extended[n])
            rhs += np.outer(geom.im_map.T @ delta[n], block.rotated[n])
        scale = max(np.abs(lhs).max(), np.abs(rhs).max())
        assert np.abs(lhs - rhs).max() <= 1e-8 * scale

    def test_power_budget_homogeneity(self):
        channel, block, _, _ = make_instance(6)
        base = solve_ci_blp(channel, block, 1.0)
        scaled = solve_ci_blp(channel, block, 4.0)
        assert scaled.certificate.t == pytest.approx(2.0 * base.certificate.t,
                                                     rel=1e-6)
        np.testing.assert_allclose(scaled.w, 2.0 * base.w, atol=1e-6)

    def test_channel_scaling_keeps_support_and_doubles_margin(self):
        channel, block, _, _ = make_instance(7)
        base = solve_ci_blp(channel, block, 1.0)
        scaled = solve_ci_blp(2.0 * channel, block, 1.0)
        support = base.certificate.delta > 1e-6
        support_scaled = scaled.certificate.delta > 1e-6
        np.testing.assert_array_equal(support, support_scaled)
        assert scaled.certificate.t == pytest.approx(2.0 * base.certificate.t,
                                                     rel=1e-6)

    def test_single_slot_multiuser_raises_singular_gram(self):
        con = PskConstellation(8)
        rng = np.random.default_rng(8)
        channel = rayleigh_channel(rng, 2, 3)
        block = SymbolBlock.from_indices(rng.integers(0, 8, (1, 2)), con)
        with pytest.raises(SingularGramError):
            solve_ci_blp(channel, block, 1.0)
