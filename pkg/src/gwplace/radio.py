"""Link budget, spreading factor selection and visibility graph construction.

Received power follows a log-distance path loss model with lognormal
shadowing. Each unordered node pair gets exactly one shadowing draw, taken
from a counter-based stream keyed by ``(seed, min(id), max(id))``: the draw
for a pair does not depend on the order of evaluation, on ``n``, or on which
other pairs are evaluated.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np
from scipy.special import ndtri

from .graph import VisibilityGraph
from .topo import Topology

SF_MIN = 7
SF_MAX = 12
SPREADING_FACTORS = tuple(range(SF_MIN, SF_MAX + 1))

# Receiver sensitivity for 125 kHz LoRa, dBm
DEFAULT_SENSITIVITY = {7: -123.0, 8: -126.0, 9: -129.0, 10: -132.0, 11: -134.5, 12: -137.0}

# Rows per block when evaluating all pairs; bounds peak memory to ~_BLOCK * n floats.
_BLOCK = 256


@dataclass(frozen=True)
class PropagationParams:
    """Log-distance path loss parameters.

    ``pl0_dbm`` is the loss at reference distance ``d0`` (meters), ``gamma``
    the path loss exponent, ``shadowing_sigma_db`` the standard deviation of
    the lognormal shadowing term. ``sensitivity_dbm`` maps each spreading
    factor to the weakest receivable signal.
    """

    tx_power_dbm: float = 14.0
    pl0_dbm: float = 31.5
    d0: float = 1.0
    # urban slope; gives SF12 reach of about 1.5 km with the defaults above
    gamma: float = 3.76
    shadowing_sigma_db: float = 4.0
    sensitivity_dbm: Mapping[int, float] = field(
        default_factory=lambda: dict(DEFAULT_SENSITIVITY)
    )

    def __post_init__(self):
        if not self.d0 > 0:
            raise ValueError(f"d0 must be positive, got {self.d0}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.shadowing_sigma_db >= 0:
            raise ValueError(f"shadowing_sigma_db must be >= 0, got {self.shadowing_sigma_db}")
        sens = {int(k): float(v) for k, v in dict(self.sensitivity_dbm).items()}
        if sorted(sens) != list(SPREADING_FACTORS):
            raise ValueError(f"sensitivity_dbm needs exactly SF7..SF12, got {sorted(sens)}")
        vals = [sens[sf] for sf in SPREADING_FACTORS]
        if any(b >= a for a, b in zip(vals, vals[1:])):
            raise ValueError("sensitivities must strictly decrease with SF")
        object.__setattr__(self, "sensitivity_dbm", sens)

    def sensitivity_array(self) -> np.ndarray:
        return np.array([self.sensitivity_dbm[sf] for sf in SPREADING_FACTORS])

    def replace(self, **changes) -> "PropagationParams":
        return dataclasses.replace(self, **changes)


def params_to_config(params: PropagationParams) -> str:
    """Flat ``key = value`` text; keys are the field names."""
    sens = ",".join(f"{sf}:{params.sensitivity_dbm[sf]!r}" for sf in SPREADING_FACTORS)
    return (
        f"tx_power_dbm = {params.tx_power_dbm!r}\n"
        f"pl0_dbm = {params.pl0_dbm!r}\n"
        f"d0 = {params.d0!r}\n"
        f"gamma = {params.gamma!r}\n"
        f"shadowing_sigma_db = {params.shadowing_sigma_db!r}\n"
        f"sensitivity_dbm = {sens}\n"
    )


def parse_sensitivity(text: str) -> dict[int, float]:
    out = {}
    for item in text.split(","):
        sf, _, val = item.partition(":")
        if not _:
            raise ValueError(f"bad sensitivity entry {item!r}, expected SF:dBm")
        out[int(sf)] = float(val)
    return out


def params_from_mapping(values: Mapping[str, str], base: PropagationParams | None = None) -> PropagationParams:
    """Build params from string key/values, ignoring keys that are not fields."""
    base = base or PropagationParams()
    changes = {}
    for f in dataclasses.fields(PropagationParams):
        if f.name not in values:
            continue
        raw = values[f.name]
        if f.name == "sensitivity_dbm":
            changes[f.name] = parse_sensitivity(raw) if isinstance(raw, str) else dict(raw)
        else:
            changes[f.name] = float(raw)
    return dataclasses.replace(base, **changes)


def read_config(path: str | os.PathLike) -> dict[str, str]:
    """Parse a flat ``key = value`` file. ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            out[key.strip()] = value.strip()
    return out


def received_power(distance, shadowing_db, params: PropagationParams):
    """Received power in dBm; distances below ``d0`` are clamped to ``d0``.

    Accepts scalars or numpy arrays.
    """
    d = np.maximum(distance, params.d0)
    path_loss = params.pl0_dbm + 10.0 * params.gamma * np.log10(d / params.d0)
    p = params.tx_power_dbm - (path_loss + shadowing_db)
    return float(p) if np.ndim(p) == 0 else p


def sf_from_power(power, params: PropagationParams):
    """Smallest SF whose sensitivity is met (``>=``); 0 where no SF works."""
    power = np.asarray(power, dtype=np.float64)
    sf = np.zeros(power.shape, dtype=np.int8)
    for s in reversed(SPREADING_FACTORS):
        sf[power >= params.sensitivity_dbm[s]] = s
    return sf


def sf_for_link(distance: float, shadowing_db: float, params: PropagationParams) -> int | None:
    """Spreading factor for one link, or ``None`` when no SF reaches."""
    sf = int(sf_from_power(received_power(distance, shadowing_db, params), params))
    return sf or None


def link_cost(sf: int) -> Fraction:
    """Connection cost ``1 / 2**(12 - sf)`` as an exact fraction."""
    if sf not in SPREADING_FACTORS:
        raise ValueError(f"spreading factor must be in 7..12, got {sf}")
    return Fraction(1, 2 ** (SF_MAX - sf))


# --- counter-based shadowing ---------------------------------------------

def _splitmix64(z: np.ndarray) -> np.ndarray:
    # uint64 array arithmetic wraps modulo 2**64
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def pair_uniform(seed: int, lo, hi) -> np.ndarray:
    """Uniform draws in (0, 1) keyed by ``(seed, lo, hi)``, one per pair."""
    key = _splitmix64(np.array([int(seed) & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))
    lo = np.asarray(lo, dtype=np.uint64)
    hi = np.asarray(hi, dtype=np.uint64)
    h = _splitmix64(_splitmix64(key ^ lo) ^ hi)
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def pair_shadowing(seed: int, i, j, sigma_db: float) -> np.ndarray:
    """Symmetric Normal(0, sigma^2) shadowing for pairs ``(i, j)``."""
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    if sigma_db == 0:
        return np.zeros(np.broadcast(i, j).shape)
    u = pair_uniform(seed, np.minimum(i, j), np.maximum(i, j))
    return sigma_db * ndtri(u)


def pair_sf(topology: Topology, params: PropagationParams, seed: int, i, j) -> np.ndarray:
    """SF (0 for no link) of arbitrary node pairs, identical to the graph's."""
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    d = np.hypot(*(topology.coords[i] - topology.coords[j]).T) if i.size else np.zeros(0)
    x = pair_shadowing(seed, i, j, params.shadowing_sigma_db)
    return sf_from_power(received_power(d, x, params), params)


def build_visibility_graph(
    topology: Topology, params: PropagationParams | None = None, seed: int = 0
) -> VisibilityGraph:
    """Undirected graph of node pairs that can exchange packets.

    Every unordered pair is evaluated once per direction with the same keyed
    shadowing value, so the result is symmetric by construction.
    """
    params = params or PropagationParams()
    n = len(topology)
    coords = topology.coords
    rows, cols, sfs = [], [], []
    all_j = np.arange(n, dtype=np.int64)
    for start in range(0, n, _BLOCK):
        i = np.arange(start, min(start + _BLOCK, n), dtype=np.int64)
        # only j > i; mirrored below
        ii, jj = np.broadcast_arrays(i[:, None], all_j[None, :])
        mask = jj > ii
        ii, jj = ii[mask], jj[mask]
        if ii.size == 0:
            continue
        d = np.hypot(coords[ii, 0] - coords[jj, 0], coords[ii, 1] - coords[jj, 1])
        x = pair_shadowing(seed, ii, jj, params.shadowing_sigma_db)
        sf = sf_from_power(received_power(d, x, params), params)
        keep = sf > 0
        rows.append(ii[keep])
        cols.append(jj[keep])
        sfs.append(sf[keep])
    if rows:
        u = np.concatenate(rows)
        v = np.concatenate(cols)
        s = np.concatenate(sfs)
    else:
        u = v = np.zeros(0, dtype=np.int64)
        s = np.zeros(0, dtype=np.int8)
    return VisibilityGraph.from_edges(n, u, v, s)


def link_sfs(graph: VisibilityGraph, pairs: Iterable[tuple[int, int]]) -> list[int]:
    """SF of each listed edge; raises ``KeyError`` for a non-edge."""
    return [graph.edge_sf(a, b) for a, b in pairs]
