"""Elementary symmetric functions, generalized Kronecker tensors, and Newton
operators of small symmetric matrices.

Everything here is plain dense linear algebra on matrices of dimension <= 8.
Two independent evaluation routes are kept side by side on purpose: an
eigenvalue route (cyclic Jacobi + stable coefficient recurrence) and an
explicit Kronecker-delta contraction route (iteration over index subsets and
signed permutations).  Downstream verification relies on cross-checking the
two, so neither may be expressed in terms of the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from .errors import CapabilityError

MAX_DIM = 8
_KRONECKER_MAX_DIM = 6


def as_sym_matrix(H) -> np.ndarray:
    """Validate and return a float copy of a symmetric matrix.

    The result is stored exactly symmetric (average of H and H^T after a
    near-symmetry check), with dimension capped at MAX_DIM.
    """
    A = np.array(H, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n < 1:
        raise ValueError("matrix dimension must be >= 1")
    if n > MAX_DIM:
        raise CapabilityError(f"dimension {n} exceeds the design bound {MAX_DIM}")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.T)) > 1e-9 * scale:
        raise ValueError("matrix is not symmetric")
    return 0.5 * (A + A.T)


def elementary_all(x) -> np.ndarray:
    """All elementary symmetric functions e_0..e_k of a vector of length k.

    Uses the incremental product recurrence (building up prod_i (t + x_i)
    one root at a time), which is O(k^2) and numerically stable; subsets are
    never enumerated.
    """
    xs = np.asarray(x, dtype=float).ravel()
    k = xs.size
    e = np.zeros(k + 1)
    e[0] = 1.0
    for i, xi in enumerate(xs):
        # update in place, descending so e[j-1] is still the old value
        for j in range(i + 1, 0, -1):
            e[j] += xi * e[j - 1]
    return e


def sigma_elementary(x, r: int) -> float:
    """r-th elementary symmetric function of a real vector.

    sigma_0 = 1 and sigma_r = 0 for r >= len(x) + 1 by convention.
    """
    if r < 0:
        raise ValueError(f"order r must be nonnegative, got {r}")
    xs = np.asarray(x, dtype=float).ravel()
    if r == 0:
        return 1.0
    if r > xs.size:
        return 0.0
    return float(elementary_all(xs)[r])


def _perm_parity(perm) -> int:
    """Parity (+1/-1) of a permutation of 0..m-1, by inversion count."""
    inv = 0
    m = len(perm)
    for a in range(m):
        pa = perm[a]
        for b in range(a + 1, m):
            if pa > perm[b]:
                inv += 1
    return -1 if inv & 1 else 1


def parity_between(ref, tup) -> int:
    """Parity of the permutation taking tuple `ref` to tuple `tup`.

    Both must be arrangements of the same distinct values.
    """
    pos = {v: m for m, v in enumerate(ref)}
    return _perm_parity([pos[v] for v in tup])


@lru_cache(maxsize=None)
def _perms_with_parity(r: int):
    """Permutations of range(r) with their parities, in lexicographic order."""
    return tuple((p, _perm_parity(p)) for p in permutations(range(r)))


def kronecker_delta(upper, lower) -> int:
    """Generalized Kronecker tensor delta^{upper}_{lower} in {-1, 0, 1}.

    1 if the upper indices are distinct and lower is an even permutation of
    them, -1 for an odd permutation, 0 otherwise.
    """
    up = tuple(upper)
    lo = tuple(lower)
    if len(up) != len(lo):
        raise ValueError(f"index lists differ in length: {len(up)} vs {len(lo)}")
    if len(up) > MAX_DIM:
        raise CapabilityError(f"index lists longer than {MAX_DIM} are unsupported")
    if len(set(up)) != len(up):
        return 0
    if set(lo) != set(up):
        return 0
    return parity_between(up, lo)


# ---------------------------------------------------------------------------
# Eigenvalues: cyclic Jacobi
# ---------------------------------------------------------------------------

def jacobi_eigh(H, tol_factor: float = 1e-13, max_sweeps: int = 60):
    """Eigen-decomposition of a small symmetric matrix by cyclic Jacobi.

    Sweeps the strict upper triangle in fixed row-major order and rotates
    every entry, stopping once the largest off-diagonal magnitude drops
    below tol_factor * ||H||.  Deterministic, no external dependency.

    Returns (eigenvalues ascending, eigenvectors as matching columns).
    """
    A = as_sym_matrix(H)
    n = A.shape[0]
    V = np.eye(n)
    if n == 1:
        return A.diagonal().copy(), V
    norm = float(np.max(np.abs(A)))
    tol = tol_factor * max(norm, np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            row = np.abs(A[p, p + 1:])
            if row.size:
                off = max(off, float(row.max()))
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= tol * 1e-2:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * A[:, p] - s * A[:, q]
                rot_q = s * A[:, p] + c * A[:, q]
                A[:, p], A[:, q] = rot_p, rot_q
                rot_p = c * A[p, :] - s * A[q, :]
                rot_q = s * A[p, :] + c * A[q, :]
                A[p, :], A[q, :] = rot_p, rot_q
                A[p, q] = A[q, p] = 0.0
                vp = c * V[:, p] - s * V[:, q]
                vq = s * V[:, p] + c * V[:, q]
                V[:, p], V[:, q] = vp, vq
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    w = A.diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


# ---------------------------------------------------------------------------
# sigma_r of a Hessian: the two routes
# ---------------------------------------------------------------------------

def sigma_hessian_eig(H, r: int) -> float:
    """sigma_r of the eigenvalues of H (Jacobi + coefficient recurrence)."""
    A = as_sym_matrix(H)
    if r < 0:
        raise ValueError(f"order r must be nonnegative, got {r}")
    w, _ = jacobi_eigh(A)
    return sigma_elementary(w, r)


def sigma_hessian_kronecker(H, r: int) -> float:
    """sigma_r of H via the explicit generalized-Kronecker contraction.

    The 1/r! prefactor cancels against the sum over orderings of the upper
    index tuple, so what is iterated is: ascending r-subsets S of the index
    range, and signed permutations pairing the lower indices against S.
    """
    A = as_sym_matrix(H)
    n = A.shape[0]
    if r < 0:
        raise ValueError(f"order r must be nonnegative, got {r}")
    if n > _KRONECKER_MAX_DIM:
        raise CapabilityError(
            f"Kronecker contraction limited to dimension {_KRONECKER_MAX_DIM}")
    if r == 0:
        return 1.0
    if r > n:
        return 0.0
    total = 0.0
    perms = _perms_with_parity(r)
    for S in combinations(range(n), r):
        for perm, sgn in perms:
            prod = 1.0
            for m in range(r):
                prod *= A[S[m], S[perm[m]]]
            total += sgn * prod
    return total


def sigma_hessian(H, r: int) -> float:
    """sigma_r of the eigenvalues of a symmetric matrix (eigenvalue route)."""
    return sigma_hessian_eig(H, r)


# ---------------------------------------------------------------------------
# Newton operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonOperator:
    """Newton operator T_r of a symmetric matrix: T_0 = I,
    T_r = sigma_r(H) I - T_{r-1} H."""
    order: int
    matrix: np.ndarray


def newton_matrices(H, r: int) -> list[np.ndarray]:
    """The sequence [T_0, ..., T_r] from the defining recursion."""
    A = as_sym_matrix(H)
    n = A.shape[0]
    if not 0 <= r <= n:
        raise ValueError(f"order r must satisfy 0 <= r <= {n}, got {r}")
    w, _ = jacobi_eigh(A)
    e = elementary_all(w)
    mats = [np.eye(n)]
    for k in range(1, r + 1):
        T = e[k] * np.eye(n) - mats[-1] @ A
        mats.append(0.5 * (T + T.T))
    return mats


def newton_operator(H, r: int) -> NewtonOperator:
    """T_r of H via the recursion; symmetric by construction."""
    return NewtonOperator(order=r, matrix=newton_matrices(H, r)[r])


def newton_partial_form(H, r: int) -> np.ndarray:
    """T_r of H via the (r+1)-index Kronecker-delta contraction.

    This is the partial-derivative form of T_r (entrywise gradient of
    sigma_{r+1} with respect to the matrix entries), evaluated by explicit
    iteration: for each entry (i, j), ascending r-subsets I of the indices
    excluding i, and signed arrangements of ({i} u I) \\ {j} on the lower
    slots.  Cost is O(n^2 C(n-1, r) r!), so the dimension is capped.
    """
    A = as_sym_matrix(H)
    n = A.shape[0]
    if n > _KRONECKER_MAX_DIM:
        raise CapabilityError(
            f"partial form limited to dimension {_KRONECKER_MAX_DIM}")
    if not 0 <= r <= n:
        raise ValueError(f"order r must satisfy 0 <= r <= {n}, got {r}")
    T = np.zeros((n, n))
    idx = range(n)
    for i in idx:
        others = [x for x in idx if x != i]
        for I in combinations(others, r):
            S = (i,) + I
            sset = set(S)
            for j in idx:
                if j not in sset:
                    continue
                rest = [v for v in S if v != j]
                for J in permutations(rest):
                    L = (j,) + J
                    sgn = parity_between(S, L)
                    prod = 1.0
                    for m in range(r):
                        prod *= A[I[m], J[m]]
                    T[i, j] += sgn * prod
    return 0.5 * (T + T.T)


def trace_identity_residual(H, r: int) -> float:
    """|trace(T_r H) - (r+1) sigma_{r+1}(H)|.

    Both sides are exactly equal in real arithmetic (Euler's identity for
    the homogeneous polynomial sigma_{r+1}); the residual is pure roundoff.
    """
    A = as_sym_matrix(H)
    n = A.shape[0]
    if not 0 <= r <= n - 1:
        raise ValueError(f"order r must satisfy 0 <= r <= {n - 1}, got {r}")
    T = newton_matrices(A, r)[r]
    lhs = float(np.trace(T @ A))
    rhs = (r + 1) * sigma_hessian_eig(A, r + 1)
    return abs(lhs - rhs)


def double_factorial(k: int) -> int:
    """k!! = k (k-2) (k-4) ...; equal to 1 for every k <= 0."""
    if k <= 0:
        return 1
    out = 1
    while k > 0:
        out *= k
        k -= 2
    return out


def binomial(n: int, k: int) -> int:
    """C(n, k), zero outside the valid range."""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)
