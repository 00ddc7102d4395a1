"""Wavelet frames on a dilation-translation grid.

Atoms h_mn(t) = gamma0^(-m/2) h(t / gamma0^m - n tau0) are materialized
on one common grid (a single interpolation pass of the mother), frame
bounds A and B are the extreme eigenvalues of the frame operator
restricted to the atom span, and dual atoms come from a truncated
Neumann series in the relaxation operator P = I - (2/K) S.

Bounds computed here are finite-section values on the discretized span,
not continuum constants; inner products carry trapezoid quadrature
weights so the results are sample-rate independent to first order.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .affine import DEFAULT_INTERPOLATOR, Interpolator, evaluate_at
from .signals import SampledSignal

DEFAULT_DIM = 4096
EIG_TOL = 1e-8
EIG_MAX_ITER = 10_000


class FrameError(ValueError):
    """Invalid frame construction or usage."""


class FrameConvergenceError(RuntimeError):
    """Eigen-iteration failed to converge; carries the iteration count."""

    def __init__(self, message: str, iterations: int):
        super().__init__(message)
        self.iterations = iterations


class FrameDivergenceError(RuntimeError):
    """Neumann series diverges for the selected relaxation constant."""


@dataclass(frozen=True)
class FrameGrid:
    """Grid constants: dilations gamma0^m and shifts n tau0 gamma0^m."""

    gamma0: float
    tau0: float
    m_range: tuple[int, int]
    n_range: tuple[int, int]

    def __post_init__(self):
        if self.gamma0 <= 0 or self.gamma0 == 1.0:
            raise FrameError("gamma0 must be positive and different from 1")
        if self.tau0 <= 0:
            raise FrameError("tau0 must be positive")
        if self.m_range[0] > self.m_range[1] or self.n_range[0] > self.n_range[1]:
            raise FrameError("index ranges must be non-empty")

    def m_values(self) -> range:
        return range(self.m_range[0], self.m_range[1] + 1)

    def n_values(self) -> range:
        return range(self.n_range[0], self.n_range[1] + 1)

    def __len__(self) -> int:
        return len(self.m_values()) * len(self.n_values())


@dataclass
class FrameBounds:
    A: float
    B: float
    iterations: int

    @property
    def ratio(self) -> float:
        return self.B / self.A


@dataclass(frozen=True)
class CoefficientTable:
    """Analysis coefficients indexed by (m, n)."""

    m_values: np.ndarray
    n_values: np.ndarray
    values: np.ndarray  # shape (len(m_values), len(n_values))

    def at(self, m: int, n: int) -> complex:
        i = int(np.where(self.m_values == m)[0][0])
        j = int(np.where(self.n_values == n)[0][0])
        return complex(self.values[i, j])


class WaveletFrame:
    """Mother function with grid constants; owns atoms, bounds, and duals.

    The common grid is aligned to the mother's sample grid so that the
    (0, 0) atom and integer-sample translations are reproduced exactly.
    """

    def __init__(
        self,
        mother: SampledSignal,
        grid: FrameGrid,
        interp: Interpolator = DEFAULT_INTERPOLATOR,
        dim: int = DEFAULT_DIM,
    ):
        if dim > DEFAULT_DIM:
            raise FrameError(f"dim must be <= {DEFAULT_DIM}")
        self.mother = mother
        self.grid = grid
        self.interp = interp
        self.dim = dim
        self.bounds: FrameBounds | None = None
        self.K: float | None = None
        self.dual_atoms: dict[tuple[int, int], np.ndarray] | None = None
        self._cache: dict[tuple[int, int], np.ndarray] = {}
        self._lock = threading.Lock()
        self._atom_matrix: np.ndarray | None = None
        self._build_common_grid()

    def _build_common_grid(self) -> None:
        g = self.grid
        corners = []
        for m in (g.m_range[0], g.m_range[1]):
            scale = g.gamma0**m
            for n in (g.n_range[0], g.n_range[1]):
                for end in (self.mother.t0, self.mother.t_end):
                    corners.append(scale * (n * g.tau0 + end))
        lo, hi = min(corners), max(corners)
        fs = self.mother.fs
        # snap the grid origin onto the mother's sample lattice
        lo_snapped = self.mother.t0 - math.ceil((self.mother.t0 - lo) * fs) / fs
        count = int(math.ceil((hi - lo_snapped) * fs)) + 3
        if count > self.dim:
            raise FrameError(
                f"discretized span needs {count} samples, above the dim cap {self.dim}"
            )
        self.fs = fs
        self.t0 = lo_snapped - 1.0 / fs
        self.count = count
        self.times = self.t0 + np.arange(count) / fs
        self.quad = np.full(count, 1.0 / fs)
        self.quad[0] *= 0.5
        self.quad[-1] *= 0.5

    # -- atoms ---------------------------------------------------------

    def atom_values(self, m: int, n: int) -> np.ndarray:
        """h_mn on the common grid, memoized."""
        g = self.grid
        if m < g.m_range[0] or m > g.m_range[1] or n < g.n_range[0] or n > g.n_range[1]:
            raise FrameError(f"grid indices ({m}, {n}) out of range")
        key = (m, n)
        got = self._cache.get(key)
        if got is not None:
            return got
        scale = g.gamma0**m
        vals = evaluate_at(self.mother, self.times / scale - n * g.tau0, self.interp)
        vals = vals / math.sqrt(scale)
        vals.flags.writeable = False
        with self._lock:
            self._cache.setdefault(key, vals)
        return self._cache[key]

    def atom(self, m: int, n: int) -> SampledSignal:
        return SampledSignal(self.atom_values(m, n), self.fs, self.t0)

    def atom_matrix(self) -> np.ndarray:
        """All atoms stacked as rows, (m outer, n inner) index order."""
        if self._atom_matrix is None:
            rows = [self.atom_values(m, n) for m in self.grid.m_values() for n in self.grid.n_values()]
            self._atom_matrix = np.vstack(rows)
        return self._atom_matrix

    # -- signals on the common grid -------------------------------------

    def materialize(self, u: SampledSignal) -> np.ndarray:
        """Resample u onto the common grid (exact when grids are aligned)."""
        return evaluate_at(u, self.times, self.interp)

    def synthesize(self, coeffs: np.ndarray) -> SampledSignal:
        """Linear combination of atoms; coeffs shaped (n_m, n_n) or flat."""
        flat = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
        H = self.atom_matrix()
        if flat.size != H.shape[0]:
            raise FrameError("coefficient count does not match the grid")
        return SampledSignal(H.T @ flat, self.fs, self.t0)

    def frame_operator(self, values: np.ndarray) -> np.ndarray:
        """S u = sum_mn <u, h_mn> h_mn on common-grid sample vectors."""
        H = self.atom_matrix()
        c = np.conj(H) @ (self.quad * values)
        return H.T @ c


def atom(frame: WaveletFrame, m: int, n: int) -> SampledSignal:
    """Grid atom h_mn(t) = gamma0^(-m/2) h(t / gamma0^m - n tau0)."""
    return frame.atom(m, n)


def analyze(frame: WaveletFrame, u: SampledSignal) -> CoefficientTable:
    """Analysis coefficients <u, h_mn> (conjugate-in-atom, linear in u)."""
    uv = frame.materialize(u)
    H = frame.atom_matrix()
    flat = np.conj(H) @ (frame.quad * uv)
    n_m = len(frame.grid.m_values())
    n_n = len(frame.grid.n_values())
    return CoefficientTable(
        m_values=np.array(list(frame.grid.m_values())),
        n_values=np.array(list(frame.grid.n_values())),
        values=flat.reshape(n_m, n_n),
    )


def gram_matrix(atoms: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted Gram G[i, j] = sum_k conj(atoms[i, k]) w[k] atoms[j, k]."""
    return np.conj(atoms) @ (weights[None, :] * atoms).T


def _rayleigh(G: np.ndarray, x: np.ndarray) -> float:
    # ratio form: exactly 1.0 for G = I regardless of normalization noise
    return float(np.real(np.vdot(x, G @ x)) / np.real(np.vdot(x, x)))


def _power_largest(G: np.ndarray, tol: float, max_iter: int) -> tuple[float, np.ndarray, int]:
    n = G.shape[0]
    x = np.ones(n, dtype=np.complex128) + np.linspace(0.0, 0.1, n)
    x /= np.linalg.norm(x)
    lam_prev = 0.0
    lam = 0.0
    for it in range(1, max_iter + 1):
        y = G @ x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            raise FrameError("zero span: frame operator annihilates the start vector")
        x = y / ny
        lam = _rayleigh(G, x)
        if abs(lam - lam_prev) <= tol * max(abs(lam), 1e-300):
            return lam, x, it
        lam_prev = lam
    raise FrameConvergenceError(
        f"power iteration did not converge in {max_iter} iterations", max_iter
    )


def _smallest_nonzero(G: np.ndarray, tol: float, max_iter: int) -> tuple[float, np.ndarray, int]:
    n = G.shape[0]
    seed = np.ones(n, dtype=np.complex128) + np.linspace(0.0, 0.1, n)
    x = G @ seed  # start inside the range of G so null directions never enter
    nx = np.linalg.norm(x)
    if nx == 0.0:
        raise FrameError("zero span: Gram matrix is identically zero")
    x /= nx
    lam_prev = np.inf
    lam = np.inf
    for it in range(1, max_iter + 1):
        y, *_ = np.linalg.lstsq(G, x, rcond=1e-12)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            raise FrameError("zero span: inverse iteration collapsed")
        x = y / ny
        lam = _rayleigh(G, x)
        if abs(lam - lam_prev) <= tol * max(abs(lam), 1e-300):
            return lam, x, it
        lam_prev = lam
    raise FrameConvergenceError(
        f"inverse iteration did not converge in {max_iter} iterations", max_iter
    )


def _rqi_polish(G: np.ndarray, lam: float, x: np.ndarray, steps: int = 3) -> float:
    """Rayleigh-quotient refinement; a singular shift means we are converged."""
    eye = np.eye(G.shape[0], dtype=G.dtype)
    for _ in range(steps):
        try:
            z = np.linalg.solve(G - lam * eye, x)
        except np.linalg.LinAlgError:
            break
        nz = np.linalg.norm(z)
        if not np.isfinite(nz) or nz == 0.0:
            break
        x = z / nz
        lam = _rayleigh(G, x)
    return lam


def bounds_from_gram(
    G: np.ndarray, tol: float = EIG_TOL, max_iter: int = EIG_MAX_ITER
) -> FrameBounds:
    """Extreme nonzero eigenvalues of a Hermitian PSD Gram matrix.

    B by power iteration, A by inverse iteration restricted to the range
    of G, both polished with a few Rayleigh-quotient steps. These equal
    the frame bounds on the span of the atoms.
    """
    b, xb, it_b = _power_largest(G, tol, max_iter)
    b = _rqi_polish(G, b, xb)
    a, xa, it_a = _smallest_nonzero(G, tol, max_iter)
    a = _rqi_polish(G, a, xa)
    if not (0 < a <= b) or not np.isfinite(b):
        raise FrameError(f"degenerate bounds A={a}, B={b}")
    return FrameBounds(A=a, B=b, iterations=it_a + it_b)


def frame_bounds(frame: WaveletFrame, dim: int | None = None) -> FrameBounds:
    """Finite-section frame bounds on the span of the materialized atoms."""
    if dim is not None and frame.count > dim:
        raise FrameError(f"common grid has {frame.count} samples, above dim={dim}")
    G = gram_matrix(frame.atom_matrix(), frame.quad)
    bounds = bounds_from_gram(G)
    frame.bounds = bounds
    return bounds


def convergence_factor(bounds: FrameBounds, K: float) -> float:
    """Spectral radius of P = I - (2/K) S on the span."""
    return max(abs(1.0 - 2.0 * bounds.A / K), abs(1.0 - 2.0 * bounds.B / K))


def _neumann_series(frame: WaveletFrame, start: np.ndarray, K: float, iters: int) -> np.ndarray:
    acc = start.copy()
    cur = start
    for _ in range(iters):
        cur = cur - (2.0 / K) * frame.frame_operator(cur)
        acc = acc + cur
    return (2.0 / K) * acc


def dual_frame(
    frame: WaveletFrame, K: float | None = None, iters: int = 20
) -> dict[tuple[int, int], np.ndarray]:
    """Dual atoms: h~_0n by truncated Neumann series, other rows by dilation.

    h~_0n = (2/K) sum_{k=0..iters} P^k h_0n, then
    h~_mn(t) = gamma0^(-m/2) h~_0n(t / gamma0^m). Requires bounds; the
    default K = A + B minimizes the convergence factor (B-A)/(B+A).
    """
    if frame.bounds is None:
        raise FrameError("compute frame_bounds before building duals")
    if frame.grid.m_range[0] > 0 or frame.grid.m_range[1] < 0:
        raise FrameError("dual construction needs m = 0 in the grid range")
    if K is None:
        K = frame.bounds.A + frame.bounds.B
    if K <= 0:
        raise FrameError("relaxation constant K must be positive")
    r = convergence_factor(frame.bounds, K)
    if r >= 1.0:
        raise FrameDivergenceError(
            f"Neumann series diverges: convergence factor {r:.4g} >= 1 for K={K:.4g}"
        )
    g0 = frame.grid.gamma0
    duals: dict[tuple[int, int], np.ndarray] = {}
    row0: dict[int, SampledSignal] = {}
    for n in frame.grid.n_values():
        vals = _neumann_series(frame, frame.atom_values(0, n), K, iters)
        duals[(0, n)] = vals
        row0[n] = SampledSignal(vals, frame.fs, frame.t0)
    for m in frame.grid.m_values():
        if m == 0:
            continue
        scale = g0**m
        for n in frame.grid.n_values():
            duals[(m, n)] = evaluate_at(row0[n], frame.times / scale, frame.interp) / math.sqrt(
                scale
            )
    frame.K = K
    frame.dual_atoms = duals
    return duals


def true_dual(frame: WaveletFrame, m: int, n: int, iters: int | None = None) -> np.ndarray:
    """Long-series oracle S^(-1) h_mn via the same Neumann recursion."""
    if frame.bounds is None:
        raise FrameError("compute frame_bounds before building duals")
    K = frame.K if frame.K is not None else frame.bounds.A + frame.bounds.B
    r = convergence_factor(frame.bounds, K)
    if r >= 1.0:
        raise FrameDivergenceError(f"convergence factor {r:.4g} >= 1")
    if iters is None:
        iters = 10_000 if r == 0.0 else min(10_000, int(math.log(1e-14) / math.log(r)) + 1)
    return _neumann_series(frame, frame.atom_values(m, n), K, iters)


def reconstruct(
    frame: WaveletFrame,
    coeffs: CoefficientTable,
    duals: dict[tuple[int, int], np.ndarray] | None = None,
) -> SampledSignal:
    """Synthesis sum_mn c_mn h~_mn on the common grid."""
    if duals is None:
        duals = frame.dual_atoms
    if duals is None:
        raise FrameError("no dual atoms available; run dual_frame first")
    out = np.zeros(frame.count, dtype=np.complex128)
    for i, m in enumerate(coeffs.m_values):
        for j, n in enumerate(coeffs.n_values):
            out += coeffs.values[i, j] * duals[(int(m), int(n))]
    return SampledSignal(out, frame.fs, frame.t0)


def reconstruction_error(frame: WaveletFrame, u: SampledSignal) -> float:
    """Relative L2 error of analyze-then-reconstruct against u itself."""
    uv = frame.materialize(u)
    rec = reconstruct(frame, analyze(frame, u)).samples
    num = math.sqrt(float(np.sum(np.abs(uv - rec) ** 2)))
    den = math.sqrt(float(np.sum(np.abs(uv) ** 2)))
    if den == 0.0:
        raise FrameError("cannot compute relative error of the zero signal")
    return num / den


def random_span_signal(frame: WaveletFrame, rng: np.random.Generator) -> SampledSignal:
    """Random vector in the atom span (standard-normal coefficients)."""
    n_atoms = len(frame.grid)
    coeffs = rng.standard_normal(n_atoms)
    if np.iscomplexobj(frame.atom_matrix()):
        coeffs = coeffs + 1j * rng.standard_normal(n_atoms)
    return frame.synthesize(coeffs)


def certify_frame_inequality(
    frame: WaveletFrame,
    bounds: FrameBounds,
    n_vectors: int = 100,
    seed: int = 42,
    slack: float = 1e-9,
) -> tuple[bool, float, float]:
    """Check A ||u||^2 <= sum |<u, h_mn>|^2 <= B ||u||^2 on random span vectors.

    Returns (ok, worst_lower_margin, worst_upper_margin) where margins
    are the signed slack-normalized distances from the bound; negative
    means violated. Randomness comes from numpy's PCG64 stream seeded
    here, so certification is reproducible.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    lo_margin = np.inf
    hi_margin = np.inf
    ok = True
    for _ in range(n_vectors):
        u = random_span_signal(frame, rng)
        uv = frame.materialize(u)
        nrm2 = float(np.sum(np.abs(uv) ** 2 * frame.quad))
        total = float(np.sum(np.abs(analyze(frame, u).values) ** 2))
        lo = total - bounds.A * nrm2 * (1.0 - slack)
        hi = bounds.B * nrm2 * (1.0 + slack) - total
        lo_margin = min(lo_margin, lo)
        hi_margin = min(hi_margin, hi)
        if lo < 0 or hi < 0:
            ok = False
    return ok, lo_margin, hi_margin
