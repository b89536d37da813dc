"""SIC-POVM candidates: Weyl-Heisenberg orbits, verification, and fiducial search.

Displacements are ``D[j,k] = tau^(j k) X^j Z^k`` with ``X|x> = |x+1>``,
``Z|x> = omega^x |x>``, ``omega = exp(2 pi i / N)`` and ``tau = -exp(i pi / N)``.
Orbit element ``j*N + k`` is ``D[j,k] |f>``.

The search minimizes the orbit's summed squared violation of
``|<psi_i|psi_j>|^2 = 1/(N+1)`` by steepest descent on the unit sphere
(backtracking line search, renormalizing after each step), then refines
the best point of each restart with damped Gauss-Newton on the residual
vector.  Some dimensions (N = 3 in particular) have degenerate minima that
steepest descent approaches only sublinearly; the refinement recovers
machine-precision residuals there.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import QDesignError

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10


class InvalidCandidate(QDesignError):
    pass


def default_threshold(N: int) -> float:
    """Residual regarded as a successful search in dimension N."""
    return 1e-10 if N <= 5 else 1e-8


@dataclass(frozen=True)
class SicCandidate:
    N: int
    vectors: np.ndarray              # (N^2, N), unit rows
    provenance: str = "imported"
    seed: int | None = None

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[1] != self.N:
            raise InvalidCandidate(f"expected vectors of dimension {self.N}, got shape {v.shape}")
        if v.shape[0] != self.N**2:
            raise InvalidCandidate(f"expected {self.N**2} vectors, got {v.shape[0]}")
        norms = np.linalg.norm(v, axis=1)
        if np.abs(norms - 1).max() > 1e-12:
            raise InvalidCandidate("vectors must have unit norm")
        object.__setattr__(self, "vectors", v)

    def projectors(self) -> np.ndarray:
        v = self.vectors
        return v[:, :, None] * v[:, None, :].conj()

    def overlaps(self) -> np.ndarray:
        """Matrix of ``Tr(P_i P_j) = |<psi_i|psi_j>|^2``."""
        return np.abs(self.vectors.conj() @ self.vectors.T) ** 2

    def to_json(self) -> dict:
        data = {
            "N": self.N,
            "provenance": self.provenance,
            "vectors": [[[float(z.real), float(z.imag)] for z in v] for v in self.vectors],
        }
        if self.seed is not None:
            data["seed"] = self.seed
        return data

    @classmethod
    def from_json(cls, data: dict) -> "SicCandidate":
        vecs = np.array([[complex(re, im) for re, im in v] for v in data["vectors"]])
        return cls(int(data["N"]), vecs, data.get("provenance", "imported"), data.get("seed"))


@dataclass(frozen=True)
class Fiducial:
    N: int
    vector: np.ndarray
    residual: float
    seed: int | None = None
    restart: int | None = None

    def orbit(self) -> SicCandidate:
        return wh_orbit(self)


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 50
    max_iterations: int = 5000
    seed: int = 0
    initial_step: float = 0.1
    armijo: float = 1e-4
    ftol: float = 1e-26
    gtol: float = 1e-28
    stall_window: int = 200
    stall_ratio: float = 0.9
    polish_iterations: int = 60
    target: float | None = None
    early_stop: bool = True
    jobs: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise QDesignError("restarts must be >= 1")


def clock_shift(N: int) -> tuple[np.ndarray, np.ndarray]:
    omega = np.exp(2j * np.pi / N)
    Z = np.diag(omega ** np.arange(N))
    X = np.roll(np.eye(N), 1, axis=0)          # X|x> = |x+1>
    return X, Z


def wh_displacements(N: int) -> np.ndarray:
    """All N^2 displacement operators, index ``j*N + k``."""
    if N < 2:
        raise QDesignError("dimension must be >= 2")
    X, Z = clock_shift(N)
    tau = -np.exp(1j * np.pi / N)
    out = np.empty((N * N, N, N), dtype=complex)
    Xj = np.eye(N)
    for j in range(N):
        XZ = Xj.astype(complex)
        for k in range(N):
            out[j * N + k] = tau ** (j * k) * XZ
            XZ = XZ @ Z
        Xj = Xj @ X
    return out


def wh_orbit(f) -> SicCandidate:
    if isinstance(f, Fiducial):
        vec, seed = f.vector, f.seed
        prov = "search" if f.seed is not None else "fiducial"
    else:
        vec, seed, prov = np.asarray(f, dtype=complex), None, "fiducial"
    vec = vec / np.linalg.norm(vec)
    D = wh_displacements(vec.shape[0])
    return SicCandidate(vec.shape[0], D @ vec, prov, seed)


def frame_potential(c: SicCandidate) -> float:
    """Sum over pairs i < j of ``(|<psi_i|psi_j>|^2 - 1/(N+1))^2``."""
    G = c.overlaps()
    iu = np.triu_indices(len(G), k=1)
    return float(np.sum((G[iu] - 1.0 / (c.N + 1)) ** 2))


def orbit_potential(f: np.ndarray) -> float:
    """``frame_potential(wh_orbit(f))`` via Weyl-Heisenberg covariance."""
    f = np.asarray(f, dtype=complex)
    return kernels.wh_potential_grad(f / np.linalg.norm(f))[0]


# -- verification ------------------------------------------------------------

@dataclass
class SicReport:
    N: int
    overlap: float
    resolution: float
    gram_rank: int
    tol: float
    witness: tuple[int, int] | None = None

    @property
    def informationally_complete(self) -> bool:
        return self.gram_rank == self.N**2

    @property
    def passed(self) -> bool:
        return (
            self.overlap <= self.tol
            and self.resolution <= self.tol
            and self.informationally_complete
        )


def verify_sic(c: SicCandidate, tol: float = DEFAULT_TOL) -> SicReport:
    N = c.N
    G = c.overlaps()
    dev = np.abs(G - 1.0 / (N + 1))
    np.fill_diagonal(dev, 0.0)
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    resolution = float(np.abs(c.projectors().sum(axis=0) / N - np.eye(N)).max())
    sv = np.linalg.svd(G, compute_uv=False)
    rank = int(np.sum(sv > tol))
    return SicReport(N, float(dev.max()), resolution, rank, tol, (int(i), int(j)))


def tetrahedron_bloch() -> np.ndarray:
    return np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / np.sqrt(3)


def bloch_to_vector(n) -> np.ndarray:
    """Qubit state with Bloch vector n, first component real nonnegative."""
    x, y, z = n
    theta = np.arccos(np.clip(z, -1, 1))
    phi = np.arctan2(y, x)
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def sic_dim2_exact() -> SicCandidate:
    vecs = np.array([bloch_to_vector(n) for n in tetrahedron_bloch()])
    return SicCandidate(2, vecs, "exact")


# -- search ------------------------------------------------------------------

def _tangent(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    return g - np.vdot(f, g).real * f


def _descend(f: np.ndarray, cfg: SearchConfig):
    F, G = kernels.wh_potential_grad(f)
    t = cfg.initial_step
    checkpoint = F
    for it in range(cfg.max_iterations):
        Gt = _tangent(f, G)
        g2 = float(np.vdot(Gt, Gt).real)
        if F < cfg.ftol or g2 < cfg.gtol:
            break
        while True:
            trial = f - t * Gt
            trial /= np.linalg.norm(trial)
            Fn, Gn = kernels.wh_potential_grad(trial)
            if Fn <= F - cfg.armijo * t * g2 or t < 1e-18:
                break
            t *= 0.5
        if Fn > F:
            break
        f, F, G = trial, Fn, Gn
        t *= 2.0
        if (it + 1) % cfg.stall_window == 0:
            if F > cfg.stall_ratio * checkpoint:
                break
            checkpoint = F
    return f, F


def _residual_jacobian(f: np.ndarray):
    """Residuals ``|c_d|^2 - 1/(N+1)`` for d != 0 and their real Jacobian."""
    N = f.shape[0]
    c, Df, Dhf = kernels.wh_overlaps(f)
    c, Df, Dhf = c.reshape(-1)[1:], Df.reshape(N * N, N)[1:], Dhf.reshape(N * N, N)[1:]
    r = np.abs(c) ** 2 - 1.0 / (N + 1)
    g = 2.0 * (c.conj()[:, None] * Df + c[:, None] * Dhf)
    g = g - (g @ f.conj()).real[:, None] * f[None, :]
    # d r = Re(<g, df>) = g.real . df.real + g.imag . df.imag
    J = np.hstack([g.real, g.imag])
    return r, J


def _polish(f: np.ndarray, F: float, cfg: SearchConfig):
    N = f.shape[0]
    for _ in range(cfg.polish_iterations):
        if F < cfg.ftol:
            break
        r, J = _residual_jacobian(f)
        du = np.linalg.lstsq(J, -r, rcond=1e-12)[0]
        step = du[:N] + 1j * du[N:]
        scale = 1.0
        improved = False
        while scale > 1e-6:
            trial = f + scale * step
            trial /= np.linalg.norm(trial)
            Fn = kernels.wh_potential_grad(trial)[0]
            if Fn < F:
                f, F, improved = trial, Fn, True
                break
            scale *= 0.5
        if not improved:
            break
    return f, F


def _canonical(f: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(f) > 1e-12))
    return f * (abs(f[k]) / f[k])


def _restart(N: int, cfg: SearchConfig, index: int):
    rng = np.random.default_rng([cfg.seed, index])
    f = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    f /= np.linalg.norm(f)
    f, F = _descend(f, cfg)
    f, F = _polish(f, F, cfg)
    return index, _canonical(f), float(F)


def _run_restart(args):
    return _restart(*args)


def search_fiducial(N: int, cfg: SearchConfig | None = None) -> Fiducial:
    """Multi-start search for a Weyl-Heisenberg SIC fiducial.

    Restart ``i`` draws its complex-Gaussian start from a generator seeded by
    ``(cfg.seed, i)``.  With ``early_stop`` the result is the lowest-index
    restart whose residual is below the target; otherwise, or if none
    reaches it, the minimum residual with lowest index on ties.  Either way
    the outcome does not depend on ``cfg.jobs``.
    """
    if N < 2:
        raise QDesignError("dimension must be >= 2")
    cfg = cfg or SearchConfig()
    target = cfg.target if cfg.target is not None else default_threshold(N)
    results = []
    jobs = max(1, cfg.jobs)
    pool = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        for start in range(0, cfg.restarts, jobs):
            batch = [(N, cfg, i) for i in range(start, min(start + jobs, cfg.restarts))]
            out = list(pool.map(_run_restart, batch)) if pool else [_restart(*b) for b in batch]
            results.extend(out)
            hits = [r for r in results if r[2] < target]
            if cfg.early_stop and hits:
                first = min(h[0] for h in hits)
                results = [r for r in results if r[0] <= first]
                break
    finally:
        if pool:
            pool.shutdown()
    index, vec, F = min(results, key=lambda r: (r[2], r[0]))
    log.info("N=%d: best residual %.3e at restart %d of %d", N, F, index, len(results))
    return Fiducial(N, vec, F, cfg.seed, index)
