"""Cesaro spectrum of a return-time set.

For a set R the quantity A_N(theta) = (1/N) sum_{n=1..N} e^{2 pi i theta n} 1_R(n)
converges exactly at the frequencies theta whose character does not average
out along R; the nonzero limits are the Fourier data the reconstruction
stage consumes.  The scan evaluates A_N on a dense FFT grid, keeps local
maxima that clear an amplitude floor, and drops Dirichlet-kernel sidelobes
by comparing against the half-window average: a true peak has already
converged, a sidelobe of finite-window leakage has not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .orbits import ReturnSet, WindowError


@dataclass(frozen=True)
class SpectrumPeak:
    """One spectral line: location, complex amplitude, and stability data."""

    theta: float
    amplitude: complex
    convergence_gap: float
    N_used: int
    flags: tuple[str, ...] = ()

    @property
    def magnitude(self) -> float:
        return abs(self.amplitude)

    def __repr__(self):
        return (
            f"SpectrumPeak(theta={self.theta:.9f}, |A|={self.magnitude:.5f}, "
            f"gap={self.convergence_gap:.2e}, N={self.N_used})"
        )


@dataclass(frozen=True)
class CoefficientEstimate:
    theta: float
    value: complex
    verdict: str  # converged | converging-to-zero | inconclusive
    history: tuple[tuple[int, complex], ...]


@dataclass(frozen=True)
class CompareReport:
    verdict: str  # consistent | distinguished | inconclusive
    mismatch: float
    theta: Optional[float]
    detail: str


def _positive_window(rs: ReturnSet, N: Optional[int]) -> int:
    if N is None:
        N = rs.n_hi
    if N < 2:
        raise WindowError("need N >= 2 for spectral averages")
    if rs.n_lo > 1 or rs.n_hi < N:
        raise WindowError(f"return set window does not cover [1,{N}]")
    return int(N)


def cesaro_average(rs: ReturnSet, theta: float, N: Optional[int] = None) -> complex:
    """A_N(theta) over the window [1, N] (default: the whole positive part)."""
    N = _positive_window(rs, N)
    m = rs.members_in(1, N)
    if m.size == 0:
        return 0.0 + 0.0j
    return complex(np.exp(2j * np.pi * theta * m).sum() / N)


def default_threshold(N: int) -> float:
    return 20.0 / math.sqrt(N)


def _indicator_fft(members: np.ndarray, G: int) -> np.ndarray:
    x = np.zeros(G, dtype=np.float64)
    x[members] = 1.0
    return np.fft.rfft(x)


def _amp_at(R: np.ndarray, G: int, j: int, N: int) -> complex:
    """A(j/G) from the half-spectrum R of a real indicator."""
    if j <= G // 2:
        return complex(np.conj(R[j]) / N)
    return complex(R[G - j] / N)


def scan_spectrum(
    rs: ReturnSet,
    N: Optional[int] = None,
    threshold: Optional[float] = None,
    grid_factor: int = 4,
    max_peaks: int = 25,
) -> list[SpectrumPeak]:
    """Locate candidate spectral lines of A_N on a dense circular grid.

    Grid size is the next power of two at or above grid_factor * N, so the
    frequency resolution beats 1/(4N).  A grid point survives when it is a
    circular local maximum of |A_N|, clears the amplitude threshold
    (default 20/sqrt(N)), and agrees with the half-window average A_{N/2}
    loosely.  The gap screen at this stage must allow for the grid offset:
    sitting delta off a true line rotates the windowed average by about
    pi*delta*N/2 when the window halves, so a genuine peak of magnitude a
    can show a gap up to roughly 0.45*a at delta = 1/(2G).  Leakage
    sidelobes move by order-one fractions of themselves when the window
    doubles and fail even the loose screen; the strict threshold/2 test is
    applied by find_peaks after the location has been polished, where the
    offset term vanishes.
    """
    N = _positive_window(rs, N)
    if threshold is None:
        threshold = default_threshold(N)
    G = 1 << max(3, (grid_factor * N - 1).bit_length())
    m = rs.members_in(1, N)
    R = _indicator_fft(m, G)
    Nh = N // 2
    Rh = _indicator_fft(m[m <= Nh], G)
    mag_half = np.abs(R) / N
    # mirror |A| onto the full circle: A(1 - t) = conj(A(t)) for real input
    mag = np.concatenate([mag_half, mag_half[G // 2 - 1 : 0 : -1]])
    is_max = (mag > np.roll(mag, 1)) & (mag >= np.roll(mag, -1))
    candidates = np.flatnonzero(is_max & (mag >= threshold))
    smear = 0.55 * math.pi * N / (2.0 * G)  # phase-rotation allowance per unit magnitude
    peaks = []
    for j in candidates:
        j = int(j)
        a_full = _amp_at(R, G, j, N)
        a_half = _amp_at(Rh, G, j, Nh)
        gap = abs(a_full - a_half)
        if gap <= threshold / 2 + smear * abs(a_full):
            peaks.append(SpectrumPeak(j / G, a_full, gap, N))
    peaks.sort(key=lambda p: (-p.magnitude, p.theta))
    return peaks[:max_peaks]


def _golden_max(f: Callable[[float], float], a: float, b: float, tol: float):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def refine_peak(
    rs: ReturnSet,
    theta0: float,
    N: Optional[int] = None,
    half_width: Optional[float] = None,
    tol: float = 1e-9,
) -> SpectrumPeak:
    """Polish a peak location by maximizing |A_N| near theta0.

    A 17-point presample brackets the maximum, then golden-section search
    narrows the bracket below tol.  Flags record the pathologies worth
    knowing about: 'bracket-edge' when the presample maximum sits on the
    boundary (the true peak may lie outside), 'non-unimodal' when several
    presample maxima compete, 'tol-exceeds-bracket' when no refinement is
    possible at the requested tolerance (theta0 is returned unchanged).
    """
    N = _positive_window(rs, N)
    if half_width is None:
        # covers the scan's grid error with margin yet stays inside the
        # main lobe (first zeros at +-1/N), keeping the presample unimodal
        half_width = 0.75 / N
    m = rs.members_in(1, N)

    def magnitude(theta: float) -> float:
        return abs(np.exp(2j * np.pi * theta * m).sum()) / N

    flags: list[str] = []
    if tol >= 2.0 * half_width:
        a = complex(np.exp(2j * np.pi * theta0 * m).sum() / N)
        return SpectrumPeak(theta0 % 1.0, a, _gap_at(rs, theta0, N), N, ("tol-exceeds-bracket",))
    grid = np.linspace(theta0 - half_width, theta0 + half_width, 17)
    vals = [magnitude(t) for t in grid]
    best = int(np.argmax(vals))
    interior = [i for i in range(1, 16) if vals[i] > vals[i - 1] and vals[i] >= vals[i + 1]]
    if len(interior) > 1:
        flags.append("non-unimodal")
    if best in (0, 16):
        flags.append("bracket-edge")
    lo = grid[max(0, best - 1)]
    hi = grid[min(16, best + 1)]
    theta, _ = _golden_max(magnitude, float(lo), float(hi), tol)
    theta %= 1.0
    amp = complex(np.exp(2j * np.pi * theta * m).sum() / N)
    return SpectrumPeak(theta, amp, _gap_at(rs, theta, N), N, tuple(flags))


def _gap_at(rs: ReturnSet, theta: float, N: int) -> float:
    return abs(cesaro_average(rs, theta, N) - cesaro_average(rs, theta, N // 2))


def find_peaks(
    rs: ReturnSet,
    N: Optional[int] = None,
    threshold: Optional[float] = None,
    max_peaks: int = 25,
    refine: bool = True,
    tol: float = 1e-9,
) -> list[SpectrumPeak]:
    """Scan, polish each candidate, then apply the strict convergence test.

    A refined location carries no grid offset, so a true line must agree
    with its half-window average to threshold/2 there; leakage artifacts
    that slipped through the scan's loose screen die here.  Refined twins
    closer than half a resolution cell are merged, keeping the stronger.
    """
    N = _positive_window(rs, N)
    if threshold is None:
        threshold = default_threshold(N)
    raw = scan_spectrum(rs, N, threshold, max_peaks=2 * max_peaks)
    if not refine:
        return raw[:max_peaks]
    polished = []
    for p in raw:
        if p.theta == 0.0:
            polished.append(p)  # the mean sits exactly at zero frequency
            continue
        q = refine_peak(rs, p.theta, N, tol=tol)
        if q.convergence_gap <= threshold / 2:
            polished.append(q)
    polished.sort(key=lambda p: (-p.magnitude, p.theta))
    out: list[SpectrumPeak] = []
    for p in polished:
        if all(_circular_dist(p.theta, q.theta) > 0.5 / N for q in out):
            out.append(p)
    return out[:max_peaks]


def estimate_coefficient(
    rs: ReturnSet,
    theta: float,
    N: Optional[int] = None,
    stages: int = 4,
    tol: Optional[float] = None,
) -> CoefficientEstimate:
    """Judge convergence of A_N(theta) along a dyadic window schedule."""
    N = _positive_window(rs, N)
    if tol is None:
        tol = default_threshold(N)
    schedule = [N >> (stages - 1 - k) for k in range(stages)]
    schedule = sorted({n for n in schedule if n >= 2})
    history = [(n, cesaro_average(rs, theta, n)) for n in schedule]
    values = [v for _, v in history]
    last = values[-1]
    if abs(last) < tol and abs(last) <= abs(values[0]) + tol / 2:
        verdict = "converging-to-zero"
    elif (
        len(values) >= 2
        and abs(values[-1] - values[-2]) <= tol / 2
        and (len(values) < 3 or abs(values[-1] - values[-3]) <= tol)
    ):
        verdict = "converged"
    else:
        verdict = "inconclusive"
    return CoefficientEstimate(theta % 1.0, last, verdict, tuple(history))


def _circular_dist(a: float, b: float) -> float:
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


def _match_peaks(pa: Sequence[SpectrumPeak], pb: Sequence[SpectrumPeak], theta_tol: float):
    """Greedy circular matching; returns (pairs, unmatched_a, unmatched_b)."""
    used_b: set[int] = set()
    pairs = []
    unmatched_a = []
    for i, p in enumerate(pa):
        best_j, best_d = None, theta_tol
        for j, q in enumerate(pb):
            if j in used_b:
                continue
            d = _circular_dist(p.theta, q.theta)
            if d <= best_d:
                best_j, best_d = j, d
        if best_j is None:
            unmatched_a.append(p)
        else:
            used_b.add(best_j)
            pairs.append((p, pb[best_j]))
    unmatched_b = [q for j, q in enumerate(pb) if j not in used_b]
    return pairs, unmatched_a, unmatched_b


def compare_systems(
    rs_a: ReturnSet,
    rs_b: ReturnSet,
    N: Optional[int] = None,
    theta_tol: float = 1e-3,
    amp_tol: float = 1e-3,
    mode: str = "auto",
) -> CompareReport:
    """Decide whether two return sets look like the same rotation factor.

    mode 'auto' first tries the bitmask shortcut (equal windows, equal
    masks); mode 'spectra' always compares peak lists.  Peak magnitudes
    are compared (phases depend on the orbit's starting point); an
    unmatched peak contributes its own magnitude to the mismatch.
    """
    if mode not in ("auto", "spectra"):
        raise ValueError(f"unknown compare mode: {mode}")
    if mode == "auto" and rs_a == rs_b:
        return CompareReport("consistent", 0.0, None, "bit-identical return sets")
    pa = find_peaks(rs_a, N)
    pb = find_peaks(rs_b, N)
    if not pa and not pb:
        return CompareReport("inconclusive", 0.0, None, "no spectral lines found on either side")
    pairs, ua, ub = _match_peaks(pa, pb, theta_tol)
    mismatch, where = 0.0, None
    for p, q in pairs:
        d = abs(p.magnitude - q.magnitude)
        if d > mismatch:
            mismatch, where = d, p.theta
    for p in ua + ub:
        if p.magnitude > mismatch:
            mismatch, where = p.magnitude, p.theta
    if mismatch <= amp_tol and not ua and not ub:
        return CompareReport(
            "consistent", mismatch, None, f"{len(pairs)} spectral lines match"
        )
    detail = (
        f"{len(ua) + len(ub)} unmatched lines, worst magnitude gap {mismatch:.4g}"
        if (ua or ub)
        else f"matched lines disagree by {mismatch:.4g}"
    )
    return CompareReport("distinguished", mismatch, where, detail)
