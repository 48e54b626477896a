"""Logistic and Henon keystreams.

Both maps are iterated in plain Python floats (IEEE-754 binary64) with a
single fixed expression order, so a given key yields the same stream on
every platform:

    logistic:  x <- (mu * x) * (1.0 - x)
    henon:     x, y <- (1.0 - a * (x * x)) + y,  b * x

The logistic stream drives the block permutations, the Henon stream is
turned into a bitstream and cut into 11-bit ECUs (encryption minimal
units) for the AC cipher.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateOrbit,
    DivergentOrbit,
    EcuExhausted,
    InsufficientSequence,
    InvalidKey,
)

BURN_IN = 1000
HENON_B = 0.3
ECU_BITS = 11
ECUS_PER_GROUP = 63
GROUP_BITS = ECU_BITS * ECUS_PER_GROUP

# Chaotic regimes accepted for key material.
LOGISTIC_MU_RANGE = (3.6, 4.0)
HENON_A_RANGE = (1.05, 1.8)

# Scale applied to |x| before taking the parity bit.
BIT_SCALE = 1e6
HENON_ESCAPE = 10.0


def _logistic_step(mu, x):
    return (mu * x) * (1.0 - x)


def _henon_step(a, b, x, y):
    return (1.0 - a * (x * x)) + y, b * x


@dataclass(frozen=True)
class LogisticParams:
    """Logistic map parameters.

    Construction runs the burn-in once and raises ``DegenerateOrbit`` if the
    orbit lands exactly on 0 or 1. The chaotic-regime check on ``mu`` lives
    in :class:`EncryptionKey`; raw parameters accept any ``0 < mu <= 4``.
    """

    mu: float
    x0: float
    burn_in: int = BURN_IN

    def __post_init__(self):
        if not (0.0 < self.mu <= 4.0) or not math.isfinite(self.mu):
            raise InvalidKey(f"logistic mu must lie in (0, 4], got {self.mu!r}")
        if not (0.0 < self.x0 < 1.0):
            raise InvalidKey(f"logistic x0 must lie in (0, 1), got {self.x0!r}")
        if self.burn_in < 0:
            raise InvalidKey("burn_in must be non-negative")
        self.burned_state()

    def burned_state(self):
        x = float(self.x0)
        mu = float(self.mu)
        for i in range(self.burn_in):
            x = _logistic_step(mu, x)
            if x <= 0.0 or x >= 1.0:
                raise DegenerateOrbit(
                    f"logistic orbit reached {x!r} at burn-in step {i + 1}"
                )
        return x


@dataclass(frozen=True)
class HenonParams:
    """Henon map parameters; divergent seeds are rejected at construction."""

    a: float
    x0: float
    y0: float
    b: float = HENON_B
    burn_in: int = BURN_IN

    def __post_init__(self):
        for name in ("a", "b", "x0", "y0"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidKey(f"henon {name} must be finite")
        if self.burn_in < 0:
            raise InvalidKey("burn_in must be non-negative")
        self.burned_state()

    def burned_state(self):
        x, y = float(self.x0), float(self.y0)
        a, b = float(self.a), float(self.b)
        for i in range(self.burn_in):
            x, y = _henon_step(a, b, x, y)
            if not (abs(x) < 2.0 and abs(y) < 1.0):
                raise DivergentOrbit(
                    f"henon orbit left the bounded region at burn-in step {i + 1}"
                )
        return x, y


@dataclass(frozen=True)
class EncryptionKey:
    """The key pair: K1 = (mu, x0) for the logistic map, K2 = (a, x0, y0) for Henon."""

    logistic: LogisticParams
    henon: HenonParams

    def __post_init__(self):
        lo, hi = LOGISTIC_MU_RANGE
        if not (lo < self.logistic.mu < hi):
            raise InvalidKey(f"K1 mu must lie in ({lo}, {hi}), got {self.logistic.mu!r}")
        lo, hi = HENON_A_RANGE
        if not (lo < self.henon.a < hi):
            raise InvalidKey(f"K2 a must lie in ({lo}, {hi}), got {self.henon.a!r}")
        if self.henon.b != HENON_B:
            raise InvalidKey(f"henon b is fixed at {HENON_B}")

    @classmethod
    def from_values(cls, mu, logistic_x0, henon_a, henon_x0, henon_y0):
        return cls(
            LogisticParams(float(mu), float(logistic_x0)),
            HenonParams(float(henon_a), float(henon_x0), float(henon_y0)),
        )

    def values(self):
        """The five key-file numbers in file order."""
        return (
            self.logistic.mu,
            self.logistic.x0,
            self.henon.a,
            self.henon.x0,
            self.henon.y0,
        )

    def perturbed(self, index, delta):
        """Copy of this key with component ``index`` (file order) shifted by ``delta``."""
        vals = list(self.values())
        vals[index] += delta
        return EncryptionKey.from_values(*vals)

    def logistic_stream(self):
        return LogisticStream(self.logistic)

    def henon_stream(self):
        return HenonStream(self.henon)


class LogisticStream:
    """Stateful iterator over post-burn-in logistic values."""

    def __init__(self, params: LogisticParams):
        self.params = params
        self._x = params.burned_state()
        self.consumed = 0

    def take(self, n):
        mu = float(self.params.mu)
        x = self._x
        out = [0.0] * n
        for i in range(n):
            x = _logistic_step(mu, x)
            if x <= 0.0 or x >= 1.0:
                raise DegenerateOrbit(
                    f"logistic orbit reached {x!r} after {self.consumed + i + 1} values"
                )
            out[i] = x
        self._x = x
        self.consumed += n
        return np.array(out, dtype=np.float64)

    def permutation(self, k):
        return derive_permutation(self.take(k), k)


class HenonStream:
    """Stateful iterator over post-burn-in Henon x-coordinates."""

    def __init__(self, params: HenonParams):
        self.params = params
        self._x, self._y = params.burned_state()
        self.consumed = 0

    def take(self, n):
        a, b = float(self.params.a), float(self.params.b)
        x, y = self._x, self._y
        out = [0.0] * n
        for i in range(n):
            x, y = _henon_step(a, b, x, y)
            if not abs(x) < HENON_ESCAPE:
                raise DivergentOrbit(
                    f"henon orbit escaped (|x| >= {HENON_ESCAPE}) after "
                    f"{self.consumed + i + 1} values"
                )
            out[i] = x
        self._x, self._y = x, y
        self.consumed += n
        return np.array(out, dtype=np.float64)

    def bits(self, n_bits):
        return bits_from_henon(self.take(n_bits), n_bits)

    def ecus(self, n_groups):
        return make_ecus(self.bits(n_groups * GROUP_BITS))


def logistic_sequence(params: LogisticParams, n: int) -> np.ndarray:
    """Return the ``n`` logistic values that follow the burn-in."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return LogisticStream(params).take(n)


def henon_sequence(params: HenonParams, n: int) -> np.ndarray:
    """Return the ``n`` Henon x-coordinates that follow the burn-in."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return HenonStream(params).take(n)


def derive_permutation(seq, k: int) -> np.ndarray:
    """Argsort of the first ``k`` values of ``seq``.

    Ties keep index order (stable sort), so the result is always a bijection
    on ``range(k)``.
    """
    seq = np.asarray(seq, dtype=np.float64)
    if seq.shape[0] < k:
        raise InsufficientSequence(f"need {k} values, have {seq.shape[0]}")
    return np.argsort(seq[:k], kind="stable")


def invert_permutation(perm) -> np.ndarray:
    perm = np.asarray(perm)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.shape[0], dtype=perm.dtype)
    return inv


def bits_from_henon(seq, n_bits: int) -> np.ndarray:
    """Bit ``i`` is the parity of ``floor(|seq[i]| * 1e6)``."""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.shape[0] < n_bits:
        raise InsufficientSequence(f"need {n_bits} values, have {seq.shape[0]}")
    scaled = np.floor(np.abs(seq[:n_bits]) * BIT_SCALE).astype(np.int64)
    return (scaled & 1).astype(np.uint8)


@dataclass
class EcuStream:
    """11-bit ECUs grouped 63 per block, with a consumption cursor.

    ``groups[i, j]`` is the ECU for block ``i`` and zigzag position ``j + 1``.
    """

    groups: np.ndarray
    cursor: int = field(default=0)

    def __len__(self):
        return self.groups.shape[0]

    def ecu(self, group, index, k=ECU_BITS):
        """First ``k`` bits of ECU ``index`` in ``group`` (both 0-based)."""
        if group >= len(self):
            raise EcuExhausted(f"ECU group {group} requested, {len(self)} available")
        return self.groups[group, index, :k]

    def take(self, n_groups):
        """Consume the next ``n_groups`` groups as an array of shape (n, 63, 11)."""
        end = self.cursor + n_groups
        if end > len(self):
            raise EcuExhausted(f"ECU groups {self.cursor}..{end} requested, {len(self)} available")
        out = self.groups[self.cursor:end]
        self.cursor = end
        return out


def make_ecus(bits) -> EcuStream:
    bits = np.asarray(bits, dtype=np.uint8)
    n_groups = bits.shape[0] // GROUP_BITS
    groups = bits[: n_groups * GROUP_BITS].reshape(n_groups, ECUS_PER_GROUP, ECU_BITS)
    return EcuStream(groups)


# -- key files ---------------------------------------------------------------

def read_key_file(path) -> EncryptionKey:
    """Parse the 5-line key file (mu, logistic_x0, henon_a, henon_x0, henon_y0)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) != 5:
        raise InvalidKey(f"{path}: expected 5 numeric lines, found {len(lines)}")
    vals = []
    for lineno, ln in enumerate(lines, 1):
        try:
            vals.append(float(ln))
        except ValueError:
            raise InvalidKey(f"{path}:{lineno}: not a decimal number: {ln!r}") from None
    return EncryptionKey.from_values(*vals)


def format_key(key: EncryptionKey) -> str:
    # repr() of a float round-trips exactly
    return "".join(f"{v!r}\n" for v in key.values())


def _looks_periodic(values, tol=1e-9, min_distinct=64):
    return np.unique(np.round(values / tol)).shape[0] < min_distinct


def generate_key(seed=None, max_tries=1000) -> EncryptionKey:
    """Draw a key uniformly inside the chaotic parameter ranges.

    Draws whose orbits degenerate, diverge, or settle on a periodic window
    are rejected and redrawn.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        mu = rng.uniform(*LOGISTIC_MU_RANGE)
        lx0 = rng.uniform(0.0, 1.0)
        a = rng.uniform(*HENON_A_RANGE)
        hx0, hy0 = rng.uniform(-0.5, 0.5, size=2)
        if not (LOGISTIC_MU_RANGE[0] < mu < LOGISTIC_MU_RANGE[1]) or not 0.0 < lx0 < 1.0:
            continue
        try:
            key = EncryptionKey.from_values(mu, lx0, a, hx0, hy0)
            if _looks_periodic(key.logistic_stream().take(2000)):
                continue
            if _looks_periodic(key.henon_stream().take(2000)):
                continue
        except (DegenerateOrbit, DivergentOrbit, InvalidKey):
            continue
        return key
    raise RuntimeError("could not draw a chaotic key")
