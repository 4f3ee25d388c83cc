"""Spectral sequences: ordering, hypothesis checks, clustering indices.

The two clustering diagnostics are windowed finite surrogates of
limsup-type indices of a normally ordered sequence (lam_k):

* condensation: v_k = -ln|E'(lam_k)| / Re(lam_k) for the canonical product
  E(z) = prod(1 - z^2/lam_k^2);
* pairwise (Bohr-type): v_k = -ln inf_{j!=k} |lam_k - lam_j| / Re(lam_k).

All products are evaluated as sums of ln|.| with an adaptively truncated
far tail; near-coincident entries are subtracted in mpmath so pair gaps
far below binary64 resolution still contribute their exact logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .errors import DuplicateEntry, NonPositiveRealPart, TailBoundUnachievable, TooFewModes
from .generators import SequenceRule
from .precision import mp_log_abs, to_mp, workdps
from .report import DEFAULT_WINDOW, ProfileReport, make_profile

_HEAD_BUFFER = 8
_J_MAX = 8_000_000
_DUP_GAP = 1e-300


@dataclass(frozen=True)
class SpectralSequence:
    """Normally ordered eigenvalues with multiplicity/Jordan metadata.

    ``values`` are mpf/mpc scalars; multiplicity is carried by ``r``,
    never by repetition.  ``rule`` (when present) extends the sequence
    lazily past the stored head for tail evaluations.
    """

    values: tuple
    r: tuple
    jordan_mu: tuple
    sector_delta: float | None = None
    rule: SequenceRule | None = None
    dps: int = 60

    def __len__(self) -> int:
        return len(self.values)

    def entry(self, k: int):
        """1-based access, matching the eigenvalue numbering."""
        if not 1 <= k <= len(self.values):
            raise IndexError(f"index k={k} outside 1..{len(self.values)}")
        return self.values[k - 1]

    def float_values(self, n: int | None = None) -> np.ndarray:
        n = len(self.values) if n is None else n
        if self.rule is not None:
            return self.rule.float_entries(n)
        if n > len(self.values):
            raise IndexError("finite sequence exhausted")
        return np.array(
            [complex(v.real, v.imag) if isinstance(v, mp.mpc) else complex(float(v), 0.0)
             for v in self.values[:n]]
        )

    @property
    def re(self) -> np.ndarray:
        return self.float_values(len(self)).real


def _order_key(z):
    return (abs(z), mp.arg(z))


def _validate(values, context_dps) -> None:
    # entries live at context_dps digits: reject only gaps the stored
    # precision cannot resolve (raw float input uses the 1e-300 cutoff)
    with workdps(context_dps):
        resolvable = mp.mpf(10) ** (-(context_dps - 5))
        for z in values:
            if not (z.real > 0):
                raise NonPositiveRealPart(f"Re(lambda) <= 0 for entry {z}")
        for a, b in zip(values, values[1:]):
            if abs(b - a) < resolvable * (1 + abs(a)):
                raise DuplicateEntry(f"entries near {complex(a)} coincide at working precision")
            ma, mb = abs(a), abs(b)
            ordered = ma < mb or (ma == mb and mp.arg(a) < mp.arg(b))
            if not ordered:
                raise DuplicateEntry(f"ordering violated between {a} and {b}")


def normal_order(raw, r=None, jordan_mu=None, sector_delta=None) -> SpectralSequence:
    """Sort by modulus, breaking ties by strictly increasing argument.

    ``raw`` is a finite list of complex scalars (multiplicity goes in
    ``r``, aligned with ``raw``).  The output is a permutation of the
    input; identical complex values are rejected.
    """
    if len(raw) == 0:
        raise TooFewModes("empty sequence")
    vals = [to_mp(z) for z in raw]
    dps = mp.mp.dps
    rr = list(r) if r is not None else [1] * len(vals)
    mus = list(jordan_mu) if jordan_mu is not None else [None] * len(vals)
    if len(rr) != len(vals) or len(mus) != len(vals):
        raise ValueError("r / jordan_mu must align with raw")
    with workdps(dps + 10):
        for z in vals:
            if not (z.real > 0):
                raise NonPositiveRealPart(f"Re(lambda) <= 0 for entry {z}")
        order = sorted(range(len(vals)), key=lambda i: _order_key(vals[i]))
        vals = [vals[i] for i in order]
        rr = [rr[i] for i in order]
        mus = [mus[i] for i in order]
        for a, b in zip(vals, vals[1:]):
            if abs(b - a) < _DUP_GAP:
                raise DuplicateEntry(f"entries {a} and {b} coincide below 1e-300")
    return SpectralSequence(tuple(vals), tuple(rr), tuple(mus), sector_delta, None, dps)


def from_rule(rule: SequenceRule, K: int, sector_delta=None) -> SpectralSequence:
    """Materialize the first K entries of a rule (plus a small buffer)."""
    if K < 1:
        raise TooFewModes("K must be >= 1")
    align = 2 if rule.name in ("appendixB", "academic_lf", "two_diffusion") else 1
    n = K + _HEAD_BUFFER
    n += (-n) % align
    try:
        vals = rule.mp_entries(n)
    except IndexError:
        try:
            vals = rule.mp_entries(K)
        except IndexError:
            raise TooFewModes(f"rule {rule.name!r} has fewer than K={K} entries") from None
    dps = max(rule.head_dps(n), 60)
    _validate(vals, dps + 10)
    return SpectralSequence(
        tuple(vals), (1,) * len(vals), (None,) * len(vals), sector_delta,
        rule if rule.infinite else None, dps,
    )


@dataclass(frozen=True)
class HypothesisReport:
    sector_delta_est: float
    summability_exponent: float
    summable: bool
    sup_rk: int
    warnings: list = field(default_factory=list)
    fitted_scale: float = 1.0


def _power_fit(moduli: np.ndarray, lo: int, hi: int) -> tuple[float, float]:
    """LS fit ln|lam_k| ~ ln c + p ln k over 1-based k in [lo, hi]."""
    ks = np.arange(lo, hi + 1, dtype=float)
    ys = np.log(moduli[lo - 1:hi])
    p, lnc = np.polyfit(np.log(ks), ys, 1)
    return float(math.exp(lnc)), float(p)


def check_hypotheses(seq: SpectralSequence, K: int, fit_tol: float = 0.05) -> HypothesisReport:
    """Sector constant and summability exponent of the first K moduli."""
    if len(seq) < max(K, 16):
        raise TooFewModes(f"need at least max(K, 16) = {max(K, 16)} entries, have {len(seq)}")
    vals = seq.float_values(K)
    moduli = np.abs(vals)
    delta = float(np.min(vals.real / moduli))
    c, p = _power_fit(moduli, max(1, K // 2), K)
    summable = p > 1.0 + fit_tol
    warnings = [] if summable else ["HYP_SUMMABILITY_FAIL"]
    return HypothesisReport(delta, p, summable, int(max(seq.r)), warnings, c)


def _tail_start(seq: SpectralSequence, lam_abs: float, tol: float) -> int:
    """Smallest J with a proven bound sum_{j>J} |ln|1-lam^2/lam_j^2|| < tol."""
    n0 = len(seq)
    if seq.rule is None:
        return n0  # finite sequence: the product is exact, no tail
    moduli = np.abs(seq.float_values(max(n0, 64)))
    c, p = _power_fit(moduli, max(1, len(moduli) // 2), len(moduli))
    c *= 0.8  # fit safety margin
    if p <= 1.0:
        raise TailBoundUnachievable(f"fitted growth exponent p={p:.3f} <= 1")
    # need c J^p >= sqrt(2) lam_abs so |w| <= 1/2, then
    # sum_{j>J} 2 |w_j| <= 2 lam^2 / (c^2 (2p-1) J^(2p-1))
    j_sep = (math.sqrt(2.0) * lam_abs / c) ** (1.0 / p) * 1.2
    j_tail = (2.0 * lam_abs**2 / (c * c * (2 * p - 1) * tol)) ** (1.0 / (2 * p - 1))
    J = int(math.ceil(max(j_sep, j_tail, n0)))
    if J > _J_MAX:
        raise TailBoundUnachievable(
            f"truncation J={J} exceeds cap {_J_MAX} for tol {tol:g}")
    return J


def _far_sum_eprime(seq, lam_c: complex, n0: int, J: int) -> float:
    if J <= n0:
        return 0.0
    total = 0.0
    chunk = 1 << 20
    vals = seq.float_values(J)
    for lo in range(n0, J, chunk):
        block = vals[lo:min(J, lo + chunk)]
        w = (lam_c / block) ** 2
        total += float(np.sum(np.log(np.abs(1.0 - w))))
    return total


def log_E_prime(seq: SpectralSequence, k: int, rel_tail_tol: float = 1e-10) -> float:
    """ln|E'(lam_k)| for E(z) = prod_j (1 - z^2/lam_j^2), truncated so the
    neglected log-sum is below ``rel_tail_tol``.

    The factor at j = k differentiates to -2 lam_k / lam_k^2, hence the
    leading ln(2/|lam_k|); stored neighbors are handled in mpmath so pair
    gaps below float resolution keep their exact logarithm.
    """
    lam = seq.entry(k)
    lam_abs = float(abs(lam))
    total = math.log(2.0) - math.log(lam_abs)
    with workdps(seq.dps + 20):
        for j, other in enumerate(seq.values, start=1):
            if j == k:
                continue
            total += mp_log_abs(other - lam) + mp_log_abs(other + lam) - 2 * mp_log_abs(other)
    n0 = len(seq)
    J = _tail_start(seq, lam_abs, rel_tail_tol)
    lam_c = complex(lam.real, lam.imag) if isinstance(lam, mp.mpc) else complex(float(lam), 0.0)
    total += _far_sum_eprime(seq, lam_c, n0, J)
    return total


def condensation_profile(seq: SpectralSequence, K: int,
                         rel_tail_tol: float = 1e-10,
                         window: int = DEFAULT_WINDOW,
                         cap: float | None = None) -> ProfileReport:
    """Windowed surrogate of the condensation index."""
    if K > len(seq):
        raise TooFewModes(f"profile needs K={K} stored entries, have {len(seq)}")
    re = seq.re[:K]
    vs = np.array([-log_E_prime(seq, k, rel_tail_tol) for k in range(1, K + 1)]) / re
    return make_profile("condensation", np.arange(1, K + 1), vs, window, cap)


def bohr_profile(seq: SpectralSequence, K: int,
                 window: int = DEFAULT_WINDOW,
                 cap: float | None = None) -> ProfileReport:
    """Windowed surrogate of the nearest-neighbor (Bohr-type) index."""
    if K < 2:
        raise TooFewModes("pairwise profile needs K >= 2")
    if K > len(seq):
        raise TooFewModes(f"profile needs K={K} stored entries, have {len(seq)}")
    vs = np.empty(K)
    partners = np.empty(K, dtype=int)
    with workdps(seq.dps + 20):
        for k in range(1, K + 1):
            lam = seq.values[k - 1]
            best, best_j = None, -1
            for j, other in enumerate(seq.values, start=1):
                if j == k:
                    continue
                g = abs(other - lam)
                if best is None or g < best:
                    best, best_j = g, j
            vs[k - 1] = -mp_log_abs(best) / float(lam.real)
            partners[k - 1] = best_j
    return make_profile("bohr", np.arange(1, K + 1), vs, window, cap,
                        extras={"partner": partners})


def _blaschke_far_and_tail(seq, lam_c: complex, n0: int, tol_abs: float) -> float:
    """Far-zone sum of ln|(1 + lam/conj(l)) / (1 - lam/l)| plus an
    Euler-Maclaurin completion of the remaining tail.

    Those factors only decay like 2|lam|/|l|, so a hard truncation meeting
    tol would need J ~ |lam|/tol entries; instead the work zone is summed
    exactly and the remainder of the fitted power-law tail is added in
    closed form, with the completion error held below tol.
    """
    if seq.rule is None:
        return 0.0
    lam_abs = abs(lam_c)
    J = max(4 * n0, 1 << 16)
    while True:
        if J > _J_MAX:
            raise TailBoundUnachievable(
                f"tail completion still above tolerance at J={J}")
        vals = seq.float_values(J)
        if np.max(np.abs(vals.imag)) != 0.0:
            return _blaschke_far_complex(seq, lam_c, n0, J, tol_abs)
        moduli = vals.real
        cached = seq.rule.fit_cache.get(("tailfit", J))
        if cached is None:
            c, p = _power_fit(moduli, J // 2, J)
            fit_resid = float(np.max(np.abs(
                np.log(moduli[J // 2 - 1:J])
                - (math.log(c) + p * np.log(np.arange(J // 2, J + 1))))))
            seq.rule.fit_cache[("tailfit", J)] = (c, p, fit_resid)
        else:
            c, p, fit_resid = cached
        if p <= 1.0:
            raise TailBoundUnachievable(f"fitted growth exponent p={p:.3f} <= 1")
        # remainder of sum 2 artanh(lam/l): first-order + cubic term
        lead = (2.0 * lam_abs / c) * (J ** (1 - p) / (p - 1) + 0.5 * J ** (-p))
        cubic = (2.0 * lam_abs**3 / (3.0 * c**3)) * J ** (1 - 3 * p) / (3 * p - 1)
        rem = lead + cubic
        err = rem * fit_resid * (2.0 + math.log(J)) \
            + (2.0 * lam_abs / c) * p * J ** (-p - 1) * 5.0
        if err < tol_abs:
            break
        J *= 2
    far = float(np.sum(np.log1p(lam_c.real / moduli[n0:J])
                       - np.log1p(-lam_c.real / moduli[n0:J])))
    return far + rem


def _blaschke_far_complex(seq, lam_c, n0, J, tol_abs) -> float:
    # complex sequences: plain truncation with the 2|lam|/(|l|-|lam|) bound
    vals = seq.float_values(J)
    moduli = np.abs(vals)
    c, p = _power_fit(moduli, J // 2, J)
    bound = 4.0 * abs(lam_c) / (0.8 * c * (p - 1)) * J ** (1 - p) if p > 1 else math.inf
    if bound > tol_abs:
        raise TailBoundUnachievable(
            f"complex-tail truncation bound {bound:.2e} above tolerance at J={J}")
    block = vals[n0:J]
    return float(np.sum(np.log(np.abs(1.0 + lam_c / np.conj(block)))
                        - np.log(np.abs(1.0 - lam_c / block))))


def blaschke_log_wprime(seq: SpectralSequence, k: int, rel_tail_tol: float = 1e-10) -> float:
    """ln|W'(lam_k)| of the half-plane inner function with zeros lam_j.

    |W'(lam_k)| = P_k^{-1} / (2 Re lam_k) with
    P_k = prod_{l != k} |(1 + lam_k/conj(lam_l)) / (1 - lam_k/lam_l)|;
    unimodular normalizing factors drop out of the modulus.  The error
    budget rel_tail_tol is applied to the Re(lam_k)-normalized quantity.
    """
    lam = seq.entry(k)
    ln_pk = 0.0
    with workdps(seq.dps + 20):
        for j, other in enumerate(seq.values, start=1):
            if j == k:
                continue
            ln_pk += mp_log_abs(mp.conj(other) + lam) - mp_log_abs(other - lam)
    lam_c = complex(lam.real, lam.imag) if isinstance(lam, mp.mpc) else complex(float(lam), 0.0)
    tol_abs = rel_tail_tol * max(1.0, lam_c.real)
    ln_pk += _blaschke_far_and_tail(seq, lam_c, len(seq), tol_abs)
    return -math.log(2.0 * float(lam.real)) - ln_pk


def blaschke_profile(seq: SpectralSequence, K: int,
                     rel_tail_tol: float = 1e-10,
                     window: int = DEFAULT_WINDOW,
                     cap: float | None = None) -> ProfileReport:
    """Condensation surrogate computed through |W'| instead of |E'|."""
    if K > len(seq):
        raise TooFewModes(f"profile needs K={K} stored entries, have {len(seq)}")
    re = seq.re[:K]
    vs = np.array([-blaschke_log_wprime(seq, k, rel_tail_tol) for k in range(1, K + 1)]) / re
    return make_profile("blaschke", np.arange(1, K + 1), vs, window, cap)


# ---------------------------------------------------------------------------
# closed-form cross-checks (sine/sinh canonical products)

def ln_sinh(x: float) -> float:
    """ln(sinh x) for x > 0 without overflow."""
    if x > 30.0:
        return x - math.log(2.0) + math.log1p(-math.exp(-2.0 * x))
    return math.log(math.sinh(x))


def log_eprime_single_family(k: int, scale: float = 1.0) -> float:
    """ln|E'(lam_k)| for lam_j = scale*j^2: |E'| = sinh(k pi)/(2 pi k^3 scale)."""
    return ln_sinh(k * math.pi) - math.log(2.0 * math.pi * k**3 * scale)


def log_eprime_two_family(k: int, d: float, scale: float = 1.0) -> float:
    """ln|E'(lam_k)| at lam_k = scale*k^2 for the merged family
    {scale*j^2, scale*d*j^2}:

    |E'| = d sinh(k pi) sinh(k pi/sqrt d) |sin(k pi/sqrt d)| / (2 pi^3 k^5 scale).
    """
    rd = math.sqrt(d)
    return (math.log(d) + ln_sinh(k * math.pi) + ln_sinh(k * math.pi / rd)
            + math.log(abs(math.sin(k * math.pi / rd)))
            - math.log(2.0 * math.pi**3 * k**5 * scale))
