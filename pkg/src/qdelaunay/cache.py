"""On-disk cache of Delaunay profiles.

Profiles are keyed by ``(schema_version, n, epsilon, tol, M)``.  The cache
directory is ``$QDELAUNAY_CACHE`` if set, else ``$XDG_DATA_HOME/qdelaunay/profiles``
(``~/.local/share/qdelaunay/profiles`` by default).  Writes go through a
temporary file and an atomic rename; unreadable or invalid entries are
recomputed and overwritten.
"""

from __future__ import annotations

import hashlib
import logging
import os
from pathlib import Path

from .core import DimensionParams
from .delaunay import (DEFAULT_SAMPLES, DEFAULT_TOL, SCHEMA_VERSION, DelaunayProfile,
                       load_profile, save_profile, solve_delaunay)

log = logging.getLogger("qdelaunay.cache")

ENV_VAR = "QDELAUNAY_CACHE"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_DATA_HOME") or os.path.join(os.path.expanduser("~"), ".local", "share")
    return Path(base) / "qdelaunay" / "profiles"


def cache_key(n: int, epsilon: float, tol: float, M: int) -> str:
    raw = f"v{SCHEMA_VERSION}|n={n}|eps={epsilon!r}|tol={tol!r}|M={M}"
    return f"n{n}-" + hashlib.sha256(raw.encode()).hexdigest()[:24] + ".json"


class ProfileCache:
    def __init__(self, directory: str | os.PathLike | None = None, enabled: bool = True):
        self.dir = Path(directory) if directory is not None else default_cache_dir()
        self.enabled = enabled
        self.hits = 0
        self.misses = 0

    def path(self, n: int, epsilon: float, tol: float, M: int) -> Path:
        return self.dir / cache_key(n, epsilon, tol, M)

    def get(self, params: DimensionParams, epsilon: float, tol: float = DEFAULT_TOL,
            M: int = DEFAULT_SAMPLES) -> DelaunayProfile:
        epsilon = float(epsilon)
        if not self.enabled:
            return solve_delaunay(params, epsilon, tol, M)
        path = self.path(params.n, epsilon, tol, M)
        if path.exists():
            try:
                prof = load_profile(path)
                # requests within 1e-9 of eps_n resolve to the cylinder itself
                eps_ok = prof.epsilon == epsilon or (prof.is_cylinder and params.eps_n - epsilon < 1e-9)
                if eps_ok and (prof.params.n, prof.tol, prof.n_samples) == (params.n, tol, M):
                    self.hits += 1
                    log.info("cache hit: %s", path)
                    return prof
                log.warning("cache entry %s has a mismatched key; recomputing", path)
            except Exception as exc:  # corrupted entries are never trusted
                log.warning("cache entry %s unusable (%s); recomputing", path, exc)
        self.misses += 1
        log.info("cache miss: n=%d eps=%r", params.n, epsilon)
        prof = solve_delaunay(params, epsilon, tol, M)
        save_profile(prof, path)
        return prof

    def solver(self, M: int = DEFAULT_SAMPLES):
        """Adapter with the ``solver(params, eps, tol)`` signature of :func:`eps_derivative`."""
        return lambda p, e, tl: self.get(p, e, tl, M)
