import numpy as np
import pytest


def build_corpus():
    """Twenty small datasets, most with ties; each is (name, matrix n x d)."""
    rng = np.random.default_rng(20240611)
    out = []
    for k in range(4):
        out.append((f"continuous-{k}", rng.normal(size=(40 + 10 * k, 3))))
    for k in range(4):
        out.append((f"poisson-{k}", rng.poisson(1.0 + k, size=(60, 3)).astype(float)))
    for k in range(4):
        p = 0.2 + 0.15 * k
        out.append((f"bernoulli-{k}", (rng.random((50, 2)) < p).astype(float)))
    for k in range(3):
        z = rng.normal(size=(80, 1))
        x = np.hstack([z + 0.5 * rng.normal(size=(80, 1)) for _ in range(3)])
        out.append((f"dependent-rounded-{k}", np.round(x * (k + 1))))
    for k in range(3):
        x = rng.integers(0, 3, size=(45, 3)).astype(float)
        x[: 30 + 5 * k, 0] = 0.0  # one dominant atom
        out.append((f"heavy-tie-{k}", x))
    out.append(("mixed-zero-inflated", np.where(rng.random((70, 3)) < 0.4, 0.0, rng.normal(size=(70, 3)))))
    out.append(("two-point-comonotone", np.array([[1.0, 1.0], [2.0, 2.0]])))
    assert len(out) == 20
    return out


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()
