"""Sampled baseband signals, chip pulses, phase codes, and pulse trains.

Conventions used throughout the package:

* A signal is a uniformly sampled complex vector with sample rate ``fs``
  and time origin ``t0`` (time of the first sample).
* Energy is (1/fs) * sum(|samples|^2); np.sum is pairwise and single
  threaded, so energies are bit-stable run to run.
* Chips are sampled at midpoints and padded with one zero sample on each
  side, so trapezoid quadrature of products reduces to the plain sum and
  discrete energies are exact.
* A chip pulse is centered at t = 0; a coded pulse starts at t = 0 with
  chip l centered at (l + 1/2) Tc; delay axes inherit this origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CHIP_SHAPES = ("rectangular", "gaussian")
# gaussian chips are truncated at +-Tc/2 = +-3 sigma, then renormalized
GAUSSIAN_SIGMA_FRACTION = 1.0 / 6.0


class SignalError(ValueError):
    """Invalid signal construction or synthesis parameters."""


@dataclass(frozen=True)
class SampledSignal:
    """Uniformly sampled complex baseband signal."""

    samples: np.ndarray
    fs: float
    t0: float = 0.0

    def __post_init__(self):
        if self.fs <= 0:
            raise SignalError("sample rate must be positive")
        arr = np.ascontiguousarray(self.samples, dtype=np.complex128)
        if arr.ndim != 1 or arr.size == 0:
            raise SignalError("samples must be a non-empty 1-D vector")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size

    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) / self.fs

    @property
    def t_end(self) -> float:
        return self.t0 + (self.samples.size - 1) / self.fs

    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2)) / self.fs

    def norm(self) -> float:
        return math.sqrt(self.energy())

    def scaled(self, c: complex) -> "SampledSignal":
        return SampledSignal(self.samples * c, self.fs, self.t0)


def modulate(sig: SampledSignal, f_hz: float) -> SampledSignal:
    """Multiply by the carrier exp(2 pi j f t); negative f shifts down."""
    phase = np.exp(2j * np.pi * f_hz * sig.times())
    return SampledSignal(sig.samples * phase, sig.fs, sig.t0)


@dataclass(frozen=True)
class ChipPulse:
    """Unit-energy chip of duration Tc, rectangular or gaussian."""

    shape: str = "rectangular"
    Tc: float = 1.0

    def __post_init__(self):
        if self.shape not in CHIP_SHAPES:
            raise SignalError(f"unknown chip shape {self.shape!r}")
        if self.Tc <= 0:
            raise SignalError("chip duration must be positive")


@dataclass(frozen=True)
class PhaseCode:
    """Unimodular code sequence x[0..L-1]."""

    code: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.code, dtype=np.complex128)
        if arr.ndim != 1 or arr.size == 0:
            raise SignalError("code must be a non-empty 1-D vector")
        if np.max(np.abs(np.abs(arr) - 1.0)) > 1e-12:
            raise SignalError("code entries must have unit modulus")
        arr.flags.writeable = False
        object.__setattr__(self, "code", arr)

    def __len__(self) -> int:
        return self.code.size


def golay_companion(code: PhaseCode) -> PhaseCode:
    """Companion code c~[l] = (-1)^l conj(c[L-1-l]).

    For codes admitting a complementary partner (e.g. Golay sequences)
    this produces it; for arbitrary codes it is just a deterministic
    unimodular companion.
    """
    c = code.code
    L = c.size
    signs = (-1.0) ** np.arange(L)
    return PhaseCode(signs * np.conj(c[::-1]))


@dataclass(frozen=True)
class PulseTrainSpec:
    """N pulses at repetition interval T with selector p and weights q_w.

    Pulse n is the coded pulse x when p[n] = 1 and the companion x~ when
    p[n] = 0; q_w weights each pulse in the Q-train. The companion code
    defaults to :func:`golay_companion` of ``code``.
    """

    N: int
    T: float
    p: np.ndarray
    q_w: np.ndarray
    code: PhaseCode
    chip: ChipPulse
    code_complement: PhaseCode | None = None

    def __post_init__(self):
        p = np.ascontiguousarray(self.p, dtype=np.int64)
        q = np.ascontiguousarray(self.q_w, dtype=np.float64)
        if self.N < 1:
            raise SignalError("pulse count must be >= 1")
        if p.shape != (self.N,) or q.shape != (self.N,):
            raise SignalError("p and q_w must have length N")
        if not np.all((p == 0) | (p == 1)):
            raise SignalError("p must be binary")
        if np.any(q < 0):
            raise SignalError("q_w must be nonnegative")
        if self.T < len(self.code) * self.chip.Tc:
            raise SignalError("pulse repetition interval shorter than the coded pulse")
        comp = self.code_complement if self.code_complement is not None else golay_companion(self.code)
        if len(comp) != len(self.code):
            raise SignalError("companion code must match the code length")
        p.flags.writeable = False
        q.flags.writeable = False
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q_w", q)
        object.__setattr__(self, "code_complement", comp)


def _chip_core(pulse: ChipPulse, fs: float) -> np.ndarray:
    """Midpoint samples of the unit-energy chip on [-Tc/2, Tc/2]."""
    n_float = fs * pulse.Tc
    n = int(round(n_float))
    if n_float < 4:
        raise SignalError("chip is undersampled; need fs * Tc >= 4")
    if abs(n_float - n) > 1e-9:
        raise SignalError("fs * Tc must be an integer sample count")
    t = (np.arange(n) + 0.5) / fs - pulse.Tc / 2.0
    if pulse.shape == "rectangular":
        core = np.full(n, 1.0 / math.sqrt(pulse.Tc))
    else:
        sigma = GAUSSIAN_SIGMA_FRACTION * pulse.Tc
        core = np.exp(-(t**2) / (2.0 * sigma**2))
        core /= math.sqrt(np.sum(core**2) / fs)
    return core.astype(np.complex128)


def synth_chip(pulse: ChipPulse, fs: float) -> SampledSignal:
    """Sampled chip centered at 0 with exactly unit discrete energy."""
    core = _chip_core(pulse, fs)
    samples = np.concatenate(([0.0], core, [0.0]))
    t0 = -pulse.Tc / 2.0 + 0.5 / fs - 1.0 / fs
    return SampledSignal(samples, fs, t0)


def synth_coded(code: PhaseCode, pulse: ChipPulse, fs: float) -> SampledSignal:
    """Phase-coded pulse sum_l x[l] w(t - (l + 1/2) Tc), spanning [0, L Tc]."""
    core = _chip_core(pulse, fs)
    blocks = [c * core for c in code.code]
    samples = np.concatenate([[0.0], *blocks, [0.0]])
    t0 = 0.5 / fs - 1.0 / fs
    return SampledSignal(samples, fs, t0)


def synth_train(spec: PulseTrainSpec, fs: float, use_q: bool) -> SampledSignal:
    """P-train (use_q False) or Q-train (use_q True) of coded pulses.

    x_P(t) = sum_n p_n x(t - nT) + (1 - p_n) x~(t - nT); the Q-train
    weights each term by q_w[n].
    """
    step_float = spec.T * fs
    step = int(round(step_float))
    if abs(step_float - step) > 1e-9:
        raise SignalError("T * fs must be an integer sample count")
    x = synth_coded(spec.code, spec.chip, fs)
    xt = synth_coded(spec.code_complement, spec.chip, fs)
    pulse_len = len(x)
    if step < pulse_len - 2:
        raise SignalError("pulses overlap within the train")
    total = step * (spec.N - 1) + pulse_len
    samples = np.zeros(total, dtype=np.complex128)
    for n in range(spec.N):
        block = x.samples if spec.p[n] == 1 else xt.samples
        w = spec.q_w[n] if use_q else 1.0
        samples[n * step : n * step + pulse_len] += w * block
    return SampledSignal(samples, fs, x.t0)


def gaussian_pulse(sigma: float, span: float, fs: float) -> SampledSignal:
    """Unit-energy gaussian exp(-t^2 / 2 sigma^2) sampled over [-span, span]."""
    if sigma <= 0 or span <= 0:
        raise SignalError("sigma and span must be positive")
    n = int(round(2.0 * span * fs))
    if n < 4:
        raise SignalError("pulse is undersampled")
    t = (np.arange(n) + 0.5) / fs - span
    core = np.exp(-(t**2) / (2.0 * sigma**2)).astype(np.complex128)
    core /= math.sqrt(float(np.sum(np.abs(core) ** 2)) / fs)
    samples = np.concatenate(([0.0], core, [0.0]))
    return SampledSignal(samples, fs, -span + 0.5 / fs - 1.0 / fs)


def morlet_pulse(sigma: float, f_center: float, span: float, fs: float) -> SampledSignal:
    """Unit-energy gaussian modulated to f_center Hz (scale-separable mother)."""
    return modulate(gaussian_pulse(sigma, span, fs), f_center)


def signal_to_csv(sig: SampledSignal, path) -> None:
    """Write t,re,im rows with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        fh.write("t,re,im\n")
        for t, v in zip(sig.times(), sig.samples):
            fh.write(f"{t:.17g},{v.real:.17g},{v.imag:.17g}\n")


def signal_from_csv(path, fs: float | None = None) -> SampledSignal:
    """Read a t,re,im CSV written by :func:`signal_to_csv`."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.float64)
    data = np.atleast_2d(data)
    t = data[:, 0]
    if fs is None:
        if t.size < 2:
            raise SignalError("cannot infer sample rate from a single row")
        fs = 1.0 / (t[1] - t[0])
    return SampledSignal(data[:, 1] + 1j * data[:, 2], fs, float(t[0]))
