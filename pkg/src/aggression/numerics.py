"""Dense float64 kernels, a splitmix64 RNG and a finite-difference gradient oracle.

Matrices and vectors are plain ``numpy.ndarray`` objects of dtype float64
(2-d and 1-d respectively). The helpers here add the shape checks and the
numerically stable forms the model relies on.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

Matrix = np.ndarray
Vector = np.ndarray

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MASK64 = (1 << 64) - 1


def as_matrix(data, rows: int | None = None, cols: int | None = None) -> Matrix:
    m = np.asarray(data, dtype=np.float64)
    if rows is not None:
        m = m.reshape(rows, cols)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    return m


def as_vector(data) -> Vector:
    v = np.asarray(data, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {v.shape}")
    return v


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError(f"matmul needs 2-d operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul dimension mismatch: {a.shape[0]}x{a.shape[1]} @ {b.shape[0]}x{b.shape[1]}")
    return a @ b


def hadamard(a: Vector, b: Vector) -> Vector:
    if a.shape != b.shape:
        raise ValueError(f"hadamard length mismatch: {a.shape} vs {b.shape}")
    return a * b


def sigmoid(x: Vector) -> Vector:
    """Logistic function, evaluated branch-wise so ``exp`` never overflows."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ez = np.exp(x[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def tanh(x: Vector) -> Vector:
    return np.tanh(np.asarray(x, dtype=np.float64))


def softmax(x: Vector) -> Vector:
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ValueError("softmax of an empty vector")
    z = np.exp(x - x.max())
    return z / z.sum()


def finite_diff_grad(f: Callable[[Vector], float], x: Vector, eps: float = 1e-5) -> Vector:
    """Central-difference gradient of a scalar function.

    ``x`` is not modified. Raises ``FloatingPointError`` if ``f`` returns a
    non-finite value at any probe point.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        hi = float(f(x))
        flat[i] = orig - eps
        lo = float(f(x))
        flat[i] = orig
        if not (np.isfinite(hi) and np.isfinite(lo)):
            raise FloatingPointError(f"non-finite function value near coordinate {i}")
        gflat[i] = (hi - lo) / (2.0 * eps)
    return grad


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class Rng:
    """splitmix64 generator.

    The stream depends only on the seed, so draws are identical across runs
    and platforms. Draws are produced in vectorised blocks; requesting ``n``
    values advances the state by exactly ``n`` steps.
    """

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK64

    def _next_block(self, n: int) -> np.ndarray:
        steps = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + steps * _GAMMA
            out = _mix64(z)
        self.state = (self.state + n * int(_GAMMA)) & _MASK64
        return out

    def next_u64(self) -> int:
        return int(self._next_block(1)[0])

    def random(self, n: int | None = None):
        """Uniform floats in [0, 1) from the top 53 bits of each draw."""
        if n is None:
            return float(self._next_block(1)[0] >> np.uint64(11)) * 2.0**-53
        return (self._next_block(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def randint(self, high: int, n: int | None = None):
        """Integers in [0, high)."""
        if high < 1:
            raise ValueError("randint needs high >= 1")
        if n is None:
            return min(int(self.random() * high), high - 1)
        return np.minimum((self.random(n) * high).astype(np.int64), high - 1)

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates shuffle of ``range(n)``."""
        idx = np.arange(n)
        if n < 2:
            return idx
        u = self.random(n - 1)
        for k, i in enumerate(range(n - 1, 0, -1)):
            j = min(int(u[k] * (i + 1)), i)
            idx[i], idx[j] = idx[j], idx[i]
        return idx

    def choice(self, n: int, k: int) -> np.ndarray:
        """``k`` distinct integers from ``range(n)``, in draw order."""
        if k > n:
            raise ValueError(f"cannot choose {k} of {n} without replacement")
        idx = np.arange(n)
        u = self.random(k) if k else np.zeros(0)
        for i in range(k):
            j = i + min(int(u[i] * (n - i)), n - i - 1)
            idx[i], idx[j] = idx[j], idx[i]
        return idx[:k].copy()

    def spawn(self, key: int) -> "Rng":
        """Independent child stream derived from the current state and ``key``."""
        with np.errstate(over="ignore"):
            z = _mix64(np.array([self.state ^ (int(key) & _MASK64)], dtype=np.uint64) + _GAMMA)
        return Rng(int(z[0]))


def derive_seed(seed: int, key: int) -> int:
    """Deterministic seed for sub-stream ``key`` of ``seed``."""
    with np.errstate(over="ignore"):
        z = np.array([int(seed) & _MASK64], dtype=np.uint64) + np.uint64(int(key) & _MASK64) * _GAMMA
        return int(_mix64(z + _GAMMA)[0])


def rand_uniform(rng: Rng, rows: int, cols: int, scale: float) -> Matrix:
    """``rows x cols`` matrix with entries drawn uniformly from [-scale, scale]."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    u = rng.random(rows * cols)
    return ((2.0 * u - 1.0) * scale).reshape(rows, cols)
