"""Latent vectors, seeded randomness, permutations and structured inits.

Randomness comes from the PCG64 bit generator's raw 64-bit output, whose
stream is fixed by its published algorithm. Gaussians use the Box-Muller
transform on 53-bit uniforms and permutations use a Fisher-Yates shuffle
with Lemire's unbiased bounded draws, so a seed reproduces the same latent
on any platform and numpy version.
"""

import json
import math
import struct
from pathlib import Path

import numpy as np

from . import kernels
from .errors import ConfigurationError, DimensionError

MAX_SEED = 2**64 - 1
_HEADER = struct.Struct("<Q")


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ConfigurationError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def derive_seed(seed, *keys):
    """Split ``seed`` into an independent child seed identified by ``keys``.

    Uses numpy's SeedSequence hashing with ``keys`` as the spawn key, so
    ``derive_seed(s, 0)`` and ``derive_seed(s, 1)`` are independent streams.
    """
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


def raw_words(seed, n):
    return np.random.PCG64(check_seed(seed)).random_raw(n)


def check_latent(x, even=False, min_dim=1):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError(f"latent must be one-dimensional, got shape {x.shape}")
    d = x.shape[0]
    if d < min_dim:
        raise DimensionError(f"latent dimension must be at least {min_dim}, got {d}")
    if even and d % 2:
        raise DimensionError(f"latent dimension must be even, got {d}")
    return x


def standard_normal(n, seed):
    """``n`` standard normal draws via Box-Muller on raw PCG64 words."""
    pairs = (n + 1) // 2
    words = raw_words(seed, 2 * pairs)
    # 53-bit uniforms on (0, 1]; the +1 keeps log() finite
    u = ((words >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    u1, u2 = u[0::2], u[1::2]
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:n]


def sample_standard_gaussian(dim, seed):
    """Draw a latent with i.i.d. N(0, 1) entries.

    >>> sample_standard_gaussian(4, 0).shape
    (4,)
    """
    dim = int(dim)
    if dim < 4 or dim % 2:
        raise DimensionError(f"dim must be even and >= 4, got {dim}")
    return standard_normal(dim, seed)


def make_checkerboard(dim, period, amplitude=1.0):
    """1-D block pattern: ``+amplitude`` where ``i // (period/2)`` is even."""
    dim, period = int(dim), int(period)
    if dim < 2 or dim % 2:
        raise DimensionError(f"dim must be even and positive, got {dim}")
    if period < 2 or period % 2 or dim % period:
        raise ConfigurationError(f"period must be a positive even divisor of {dim}, got {period}")
    half = period // 2
    parity = (np.arange(dim) // half) % 2
    return np.where(parity == 0, amplitude, -amplitude).astype(np.float64)


def make_checkerboard_2d(side, cell, amplitude=1.0):
    """Row-major flattening of a ``side`` x ``side`` board with square cells."""
    side, cell = int(side), int(cell)
    if side < 2 or side % 2:
        raise DimensionError(f"side must be even and positive, got {side}")
    if cell < 1 or cell > side:
        raise ConfigurationError(f"cell size must lie in [1, {side}], got {cell}")
    idx = np.arange(side) // cell
    parity = (idx[:, None] + idx[None, :]) % 2
    return np.where(parity == 0, amplitude, -amplitude).astype(np.float64).ravel()


def random_permutation(dim, seed):
    dim = int(dim)
    if dim < 1:
        raise DimensionError(f"dim must be >= 1, got {dim}")
    # rejections occur with probability < dim / 2**64 per draw
    words = raw_words(seed, dim - 1 + 64)
    perm = kernels.fisher_yates(words, dim)
    if perm is None:
        raise RuntimeError("random word buffer exhausted during shuffle")
    return perm


def apply_permutation(x, perm):
    x = np.asarray(x, dtype=np.float64)
    perm = np.asarray(perm)
    if perm.shape != x.shape:
        raise DimensionError(f"permutation length {perm.shape} does not match latent {x.shape}")
    return x[perm]


def side_of(dim):
    """Side length of a square image with ``dim`` pixels."""
    side = math.isqrt(int(dim))
    if side * side != dim:
        raise DimensionError(f"dim {dim} is not a perfect square")
    return side


# -- binary latent format ---------------------------------------------------
# <u64 little-endian D><D little-endian float64>, plus a JSON sidecar
# {dim, seed, kind} at the same path with suffix ".json".


def sidecar_path(path):
    return Path(path).with_suffix(".json")


def write_latent(path, x, seed=None, kind="custom"):
    x = check_latent(x)
    if not np.all(np.isfinite(x)):
        raise ConfigurationError("refusing to write a latent with non-finite values")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(x.shape[0]))
        fh.write(x.astype("<f8").tobytes())
    meta = {"dim": int(x.shape[0]), "seed": seed, "kind": kind}
    sidecar_path(path).write_text(json.dumps(meta, sort_keys=True) + "\n")
    return path


def read_latent(path):
    """Read a latent blob; returns ``(values, meta)``.

    ``meta`` is the sidecar dict, or ``{"dim": D}`` if no sidecar exists.
    """
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise ConfigurationError(f"{path}: truncated latent header")
    (dim,) = _HEADER.unpack_from(blob)
    body = blob[_HEADER.size:]
    if len(body) != 8 * dim:
        raise ConfigurationError(f"{path}: header says {dim} values, body holds {len(body) / 8:g}")
    x = np.frombuffer(body, dtype="<f8").astype(np.float64)
    side = sidecar_path(path)
    meta = json.loads(side.read_text()) if side.exists() else {"dim": dim}
    if meta.get("dim", dim) != dim:
        raise ConfigurationError(f"{side}: sidecar dim {meta['dim']} disagrees with blob ({dim})")
    return x, meta
