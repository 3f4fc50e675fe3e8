import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def lanczos_oracle(points, weights):
    """Jacobi entries of a discrete measure by Lanczos with full reorthogonalization.

    Independent of the Stieltjes recurrence used by the library: it
    tridiagonalizes ``diag(points)`` from the start vector ``sqrt(weights)``.
    """
    x = np.asarray(points, dtype=float)
    w = np.asarray(weights, dtype=float)
    d = len(x)
    Q = np.zeros((d, d))
    q = np.sqrt(w / w.sum())
    alphas, betas = [], []
    for k in range(d):
        Q[:, k] = q
        v = x * q
        alphas.append(q @ v)
        v = v - Q[:, : k + 1] @ (Q[:, : k + 1].T @ v)
        v = v - Q[:, : k + 1] @ (Q[:, : k + 1].T @ v)
        if k < d - 1:
            b = np.linalg.norm(v)
            betas.append(b)
            q = v / b
    return np.array(alphas), np.array(betas)


def eigh_oracle(diag, offdiag):
    """Eigenvalues and squared first eigenvector components from LAPACK."""
    d = len(diag)
    m = np.diag(np.asarray(diag, dtype=float))
    if d > 1:
        m += np.diag(offdiag, 1) + np.diag(offdiag, -1)
    vals, vecs = np.linalg.eigh(m)
    return vals, vecs[0] ** 2
