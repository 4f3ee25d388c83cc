"""Named eigenvalue-sequence rules.

Rules generate normally ordered spectra lazily: a high-precision head (the
window actually profiled) plus a cheap float view of the far tail used by
truncated-product evaluations.  Pair perturbations like k^2 + e^{-tau k^2}
collapse in binary64 long before they stop mattering, so the head is kept
in mpmath at a precision chosen from the rule parameters.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np

from .precision import to_mp, workdps

_PI2 = math.pi**2


class SequenceRule:
    """Base class: normally ordered, Re > 0 eigenvalue stream."""

    name = "rule"
    infinite = True

    def __init__(self, **params):
        self.params = params
        self._float_cache = np.zeros(0, dtype=np.complex128)
        self.fit_cache: dict = {}

    def head_dps(self, n: int) -> int:
        return 60

    def mp_entries(self, n: int):
        """First n entries as mpf/mpc, normally ordered."""
        raise NotImplementedError

    def _float_block_impl(self, n: int) -> np.ndarray:
        """First n entries in binary64 (pair splittings may collapse)."""
        raise NotImplementedError

    def float_entries(self, n: int) -> np.ndarray:
        if len(self._float_cache) < n:
            grow = max(n, 2 * len(self._float_cache), 1024)
            self._float_cache = np.asarray(self._float_block_impl(grow), dtype=np.complex128)
        return self._float_cache[:n]


class PowerRule(SequenceRule):
    """lambda_k = c * k^p with Re(c) > 0."""

    name = "power"

    def __init__(self, c=1.0, p=2.0):
        super().__init__(c=c, p=p)
        self.c = complex(c)
        self.p = float(p)

    def mp_entries(self, n):
        with workdps(self.head_dps(n)):
            c = to_mp(self.c)
            return [c * mp.mpf(k) ** self.p for k in range(1, n + 1)]

    def _float_block_impl(self, n):
        return self.c * np.arange(1, n + 1, dtype=float) ** self.p


class AppendixBRule(SequenceRule):
    """Paired sequence {k^2, k^2 + e^{-tau k^2}}, merged in order."""

    name = "appendixB"

    def __init__(self, tau=1.0):
        if tau <= 0:
            raise ValueError("tau must be positive")
        super().__init__(tau=tau)
        self.tau = float(tau)

    def head_dps(self, n):
        kmax = (n + 1) // 2
        return int(self.tau * kmax * kmax / math.log(10)) + 50

    def mp_entries(self, n):
        with workdps(self.head_dps(n)):
            tau = mp.mpf(self.tau)
            out = []
            for k in range(1, (n + 3) // 2 + 1):
                lam = mp.mpf(k) ** 2
                out.append(lam)
                out.append(lam + mp.e ** (-tau * lam))
            return out[:n]

    def _float_block_impl(self, n):
        ks = (np.arange(n) // 2) + 1
        base = ks.astype(float) ** 2
        with np.errstate(under="ignore"):
            pert = np.where(np.arange(n) % 2 == 1, np.exp(-self.tau * base), 0.0)
        return base + pert


class TwoDiffusionRule(SequenceRule):
    """Merged families {s k^2} and {s d k^2}, d > 0, d != 1."""

    name = "two_diffusion"

    def __init__(self, d, scale=1.0):
        if d <= 0 or abs(d - 1.0) <= 1e-9:
            raise ValueError("need d > 0 and d != 1")
        super().__init__(d=d, scale=scale)
        self.d = float(d)
        self.scale = float(scale)

    def _merged(self, n, xp):
        # the n-th smallest of the union needs at most n members per family
        m = n + 4
        fam1 = [self.scale * xp(k) ** 2 for k in range(1, m + 1)]
        fam2 = [self.scale * self.d * xp(k) ** 2 for k in range(1, m + 1)]
        merged = sorted(fam1 + fam2, key=abs)
        return merged[:n]

    def mp_entries(self, n):
        with workdps(self.head_dps(n)):
            return self._merged(n, lambda k: mp.mpf(k))

    def _float_block_impl(self, n):
        m = n + 4
        ks = np.arange(1, m + 1, dtype=float) ** 2
        vals = np.concatenate([self.scale * ks, self.scale * self.d * ks])
        vals.sort()
        return vals[:n]


class AcademicLfRule(SequenceRule):
    """Paired sequence {lam_k - f, lam_k + f}, lam_k = k^2 pi^2, f = e^{-tau lam_k}."""

    name = "academic_lf"

    def __init__(self, tau):
        if tau <= 0:
            raise ValueError("tau must be positive")
        super().__init__(tau=tau)
        self.tau = float(tau)

    def head_dps(self, n):
        kmax = (n + 1) // 2
        return int(self.tau * _PI2 * kmax * kmax / math.log(10)) + 50

    def mp_entries(self, n):
        with workdps(self.head_dps(n)):
            tau = mp.mpf(self.tau)
            out = []
            for k in range(1, (n + 3) // 2 + 1):
                lam = mp.mpf(k) ** 2 * mp.pi**2
                f = mp.e ** (-tau * lam)
                out.append(lam - f)
                out.append(lam + f)
            return out[:n]

    def _float_block_impl(self, n):
        ks = (np.arange(n) // 2) + 1
        lam = _PI2 * ks.astype(float) ** 2
        with np.errstate(under="ignore"):
            f = np.exp(-self.tau * lam)
        return lam + np.where(np.arange(n) % 2 == 1, f, -f)


class ExplicitRule(SequenceRule):
    """A finite, explicitly listed sequence (assumed already orderable)."""

    name = "explicit"
    infinite = False

    def __init__(self, values):
        super().__init__(values=list(values))
        vals = [to_mp(v) for v in values]
        vals.sort(key=lambda z: (abs(z), mp.arg(z)))
        self.values = vals

    def mp_entries(self, n):
        if n > len(self.values):
            raise IndexError("explicit sequence exhausted")
        return self.values[:n]

    def _float_block_impl(self, n):
        if n > len(self.values):
            n = len(self.values)
        return np.array([complex(v.real, v.imag) if isinstance(v, mp.mpc) else complex(float(v), 0.0)
                         for v in self.values[:n]])

    def float_entries(self, n):
        return super().float_entries(min(n, len(self.values)))


_RULES = {
    "power": PowerRule,
    "appendixB": AppendixBRule,
    "two_diffusion": TwoDiffusionRule,
    "academic_lf": AcademicLfRule,
    "explicit": ExplicitRule,
}


def make_rule(name: str, **params) -> SequenceRule:
    try:
        cls = _RULES[name]
    except KeyError:
        raise ValueError(f"unknown sequence rule {name!r}; known: {sorted(_RULES)}") from None
    if name == "explicit":
        return cls(params["values"] if "values" in params else params["list"])
    return cls(**params)
