import importlib

import numpy as np
import pytest

import orthoscherk._kernels as kernels


def _direct_abs_product(x, t, half_a):
    out = np.ones_like(x)
    for ti, hi in zip(t, half_a):
        out *= np.abs(x - ti) ** hi
    return out


def test_abs_product_matches_direct():
    rng = np.random.default_rng(7)
    t = np.array([-1.0, -0.3, 0.2, 1.0])
    half_a = np.array([-0.5, 0.5, -1.0, -0.5])
    x = rng.uniform(0.21, 0.99, size=40)
    got = kernels.abs_product(x, t, half_a)
    np.testing.assert_allclose(got, _direct_abs_product(x, t, half_a), rtol=1e-13)


def test_complex_product_principal_branch():
    # With principal anchor arguments, the kernel must reproduce the plain
    # principal-branch product anywhere in the open upper half-plane.
    t = np.array([-1.0, 0.0, 0.5], dtype=np.complex128)
    half_a = np.array([-0.5, 0.5, -1.0])
    z0 = 2.0 + 1.0j
    args0 = np.angle(z0 - t)
    z = np.array([1j, 0.3 + 0.7j, -2.0 + 0.05j, 2.0 + 3.0j])
    got = kernels.complex_product(z, z0, args0, t, half_a)
    expect = np.ones_like(z)
    for ti, hi in zip(t, half_a):
        expect *= (z - ti) ** hi
    np.testing.assert_allclose(got, expect, rtol=1e-12)


def test_complex_product_tracks_through_lower_half_plane():
    # Continuing across the cut must disagree with the principal branch by
    # the monodromy factor, not silently snap back.
    t = np.array([0.0], dtype=np.complex128)
    half_a = np.array([0.5])
    z0 = 1.0 + 0.0j
    args0 = np.array([0.0])
    # walk a chord chain: 1 -> i -> -1 -> -i (three quarter turns)
    z1 = kernels.complex_product(np.array([1j]), z0, args0, t, half_a)[0]
    a1 = np.array([np.pi / 2])
    z2 = kernels.complex_product(np.array([-1.0 + 0j]), 1j, a1, t, half_a)[0]
    a2 = np.array([np.pi])
    z3 = kernels.complex_product(np.array([-1j]), -1.0 + 0j, a2, t, half_a)[0]
    assert z3 == pytest.approx(complex(np.exp(1j * 0.75 * np.pi)), rel=1e-12)
    assert z2 == pytest.approx(1j, rel=1e-12)
    assert z1 == pytest.approx(complex(np.exp(1j * 0.25 * np.pi)), rel=1e-12)


def test_backends_agree(monkeypatch):
    if kernels.BACKEND != "numba":
        pytest.skip("numba backend unavailable")
    rng = np.random.default_rng(11)
    t = np.array([-2.0, -1.0, 0.5, 0.9])
    half_a = np.array([0.5, -0.5, -0.5, 0.5])
    x = rng.uniform(1.0, 3.0, size=17)
    zc = rng.uniform(-1, 1, 8) + 1j * rng.uniform(0.1, 2, 8)
    z0 = 4.0 + 1.0j
    args0 = np.angle(z0 - t.astype(np.complex128))
    fast = (
        kernels.abs_product(x, t, half_a),
        kernels.complex_product(zc, z0, args0, t.astype(np.complex128), half_a),
    )
    monkeypatch.setenv("ORTHOSCHERK_KERNELS", "numpy")
    knp = importlib.reload(kernels)
    try:
        assert knp.BACKEND == "numpy"
        slow = (
            knp.abs_product(x, t, half_a),
            knp.complex_product(zc, z0, args0, t.astype(np.complex128), half_a),
        )
    finally:
        monkeypatch.undo()
        importlib.reload(kernels)
    np.testing.assert_allclose(fast[0], slow[0], rtol=1e-14)
    np.testing.assert_allclose(fast[1], slow[1], rtol=1e-14)


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("ORTHOSCHERK_THREADS", "3")
    assert kernels.thread_count() == 3
    monkeypatch.setenv("ORTHOSCHERK_THREADS", "0")
    assert kernels.thread_count() == 1
    monkeypatch.delenv("ORTHOSCHERK_THREADS")
    assert kernels.thread_count() >= 1
