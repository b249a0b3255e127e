"""Spherical functions, the spherical Fourier transform pair with the
complex-case polynomial Plancherel density, and the radial Laplacian.

Spherical functions are evaluated through the complex-case closed form

    phi_lam(exp H) = (pi(rho)/pi(i lam)) * sum_w det(w) e^{i<w lam, H>}
                                          / sum_w det(w) e^{<w rho, H>},

an alternating sum over the Weyl group divided by the Weyl denominator
prod 2 sinh<alpha,H>, normalized so phi_lam(0) = 1.  Points within 1e-4 of
a singular set (lam on a root hyperplane, H on a wall) are handled by
6-point polynomial extrapolation along a fixed generic direction.

Transforms are plain trapezoid sums over tensor grids, reorganized per Weyl
element into axis-by-axis contractions so rank-2 grids stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (ConfigError, InconclusiveIntegralError,
                     UnsupportedConfigurationError)
from .geometry import (TAIL_TOL, RadialFunction, RadialGrid, _tensor_nodes,
                       _trapezoid_weights, density_delta, phi0,
                       weyl_denominator)
from .root_system import RootSystem, pi_many, weyl_group

SINGULAR_EPS = 1e-4
_EXTRAP_K = 6


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform tensor grid over [-L, L]^rank in the spectral variable."""

    rs: RootSystem
    box_radius: float
    points_per_axis: int
    axis: np.ndarray = field(repr=False, default=None)
    nodes: np.ndarray = field(repr=False, default=None)
    weights: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        m = self.points_per_axis
        if m < 3 or m % 2 == 0:
            raise ConfigError("points_per_axis must be odd and >= 3")
        if self.box_radius <= 0:
            raise ConfigError("box_radius must be positive")
        axis = np.linspace(-self.box_radius, self.box_radius, m)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "nodes", _tensor_nodes(axis, self.rs.rank))
        object.__setattr__(self, "weights", _trapezoid_weights(axis, self.rs.rank))

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.rs.rank

    def shell_mask(self) -> np.ndarray:
        edge = np.isclose(np.abs(self.nodes), self.box_radius)
        return np.any(edge, axis=1)


@dataclass(frozen=True)
class SpectralFunction:
    grid: SpectralGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).ravel()
        if v.shape[0] != self.grid.n_nodes:
            raise ConfigError("values length does not match grid")
        object.__setattr__(self, "values", v)

    def tensor(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)


def plancherel_density(rs: RootSystem, lam: np.ndarray) -> np.ndarray:
    """pi(lam)^2, the inversion weight for complex groups."""
    return pi_many(rs, np.asarray(lam, dtype=float)) ** 2


def _generic_direction(rank: int) -> np.ndarray:
    golden = (1 + 5 ** 0.5) / 2
    u = np.array([golden ** (-k) for k in range(rank)])
    return u / np.linalg.norm(u)


@lru_cache(maxsize=8)
def _extrap_weights() -> np.ndarray:
    # Lagrange weights extrapolating samples at offsets {1..K} to 0
    k = np.arange(1, _EXTRAP_K + 1, dtype=float)
    w = np.empty(_EXTRAP_K)
    for i, ki in enumerate(k):
        others = k[k != ki]
        w[i] = np.prod(-others) / np.prod(ki - others)
    return w


def _min_abs_pairing(rs: RootSystem, pts: np.ndarray) -> np.ndarray:
    return np.min(np.abs(np.atleast_2d(pts) @ rs.roots_c.T), axis=1)


def _near_singular(rs: RootSystem, pts: np.ndarray) -> np.ndarray:
    """Points where the alternating-sum evaluation cancels too hard.

    Cancellation severity scales with the product of all root pairings, so
    both a single tiny pairing and a compound of small ones are flagged."""
    pts = np.atleast_2d(pts)
    pair = np.abs(pts @ rs.roots_c.T)
    norm = np.maximum(1.0, np.linalg.norm(pts, axis=1)) ** rs.n_positive
    return (np.min(pair, axis=1) < SINGULAR_EPS) \
        | (np.prod(pair, axis=1) < 1e-6 * norm)


def _w_fold(rs: RootSystem, tensor: np.ndarray, axis: np.ndarray,
            pts: np.ndarray) -> np.ndarray:
    """sum_w det(w) sum_x tensor(x) exp(i <p, w x>) for each row p of pts.

    The inner sum runs over the tensor grid with 1D nodes ``axis``; it is
    folded one coordinate axis at a time, so the cost per Weyl element is
    O(M * n^rank) with small constants instead of forming an M x n^rank
    phase matrix.
    """
    W = weyl_group(rs)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    n = axis.shape[0]
    out = np.zeros(pts.shape[0], dtype=complex)
    for mat, sign in zip(W.matrices, W.signs):
        mu = pts @ mat            # row p -> w^T p, so <p, w x> = <w^T p, x>
        E = np.exp(1j * np.multiply.outer(mu[:, 0], axis))
        T = E @ tensor.reshape(n, -1).astype(complex)   # (M, n^{rank-1})
        for k in range(1, rs.rank):
            E = np.exp(1j * np.multiply.outer(mu[:, k], axis))
            rest = T.shape[1] // n
            if rest == 1:
                T = np.sum(E * T.reshape(-1, n), axis=1, keepdims=True)
            else:
                T = np.einsum("ji,jir->jr", E,
                              T.reshape(T.shape[0], n, rest))
        out += sign * T.ravel()
    return out


def _phi_direct(rs: RootSystem, lam: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Closed-form evaluation on generic points; lam (M,r), H (N,r) -> (M,N)."""
    W = weyl_group(rs)
    lam = np.atleast_2d(lam)
    H = np.atleast_2d(H)
    num = np.zeros((lam.shape[0], H.shape[0]), dtype=complex)
    for mat, sign in zip(W.matrices, W.signs):
        num += sign * np.exp(1j * (lam @ mat.T) @ H.T)
    den = weyl_denominator(rs, H)
    n_pos = rs.n_positive
    pi_rho = float(np.prod(rs.pairings(rs.rho_c)))
    pi_ilam = (1j ** n_pos) * pi_many(rs, lam)
    return (pi_rho / pi_ilam)[:, None] * num / den[None, :]


def phi_lambda(rs: RootSystem, lam: np.ndarray, H: np.ndarray) -> complex:
    """Spherical function phi_lam(exp H); exact 1 at H = 0."""
    lam = np.asarray(lam, dtype=float).reshape(rs.rank)
    H = np.asarray(H, dtype=float).reshape(rs.rank)
    if np.linalg.norm(H) < 1e-14:
        return 1.0 + 0.0j
    lam_sing = bool(_near_singular(rs, lam)[0])
    H_sing = bool(_near_singular(rs, H)[0])
    if np.linalg.norm(lam) < 1e-14:
        return complex(phi0(rs, H))
    if not lam_sing and not H_sing:
        return complex(_phi_direct(rs, lam, H)[0, 0])
    # removable singularity: polynomial extrapolation along a generic ray
    u = _generic_direction(rs.rank)
    scale = max(np.linalg.norm(lam), np.linalg.norm(H), 1.0)
    tau = 0.05 / scale
    ks = np.arange(1, _EXTRAP_K + 1)
    lam_path = lam[None, :] + (tau * ks)[:, None] * u[None, :] if lam_sing \
        else np.repeat(lam[None, :], _EXTRAP_K, axis=0)
    H_path = H[None, :] + (tau * ks)[:, None] * u[None, :] if H_sing \
        else np.repeat(H[None, :], _EXTRAP_K, axis=0)
    vals = np.array([_phi_direct(rs, lam_path[i], H_path[i])[0, 0]
                     for i in range(_EXTRAP_K)])
    return complex(_extrap_weights() @ vals)


def phi_lambda_many(rs: RootSystem, lam: np.ndarray, H_pts: np.ndarray) -> np.ndarray:
    """phi_lam at many H for one lam, with singular points patched."""
    lam = np.asarray(lam, dtype=float).reshape(rs.rank)
    H_pts = np.atleast_2d(np.asarray(H_pts, dtype=float))
    if np.linalg.norm(lam) < 1e-14:
        return phi0(rs, H_pts).astype(complex)
    out = np.empty(H_pts.shape[0], dtype=complex)
    ok = ~_near_singular(rs, H_pts)
    if np.linalg.norm(lam) >= 1e-14 and _near_singular(rs, lam)[0]:
        ok[:] = False
    if np.any(ok):
        out[ok] = _phi_direct(rs, lam, H_pts[ok])[0]
    for i in np.nonzero(~ok)[0]:
        out[i] = phi_lambda(rs, lam, H_pts[i])
    return out


# ---------------------------------------------------------------------------
# transform pair
# ---------------------------------------------------------------------------

def _forward_core(rs: RootSystem, f: RadialFunction, pts: np.ndarray) -> np.ndarray:
    """Trapezoid spherical transform of f at arbitrary spectral points.

    Uses Hf = pi(rho) S(lam) / (i^m pi(lam) |W| 4^m) with
    S(lam) = sum_w det(w) sum_H  wts f D e^{i<w lam, H>},  m = |Sigma+|.
    Callers must keep pts away from root hyperplanes.
    """
    grid = f.grid
    T = (grid.weights * f.values * weyl_denominator(rs, grid.nodes)).reshape(grid.shape)
    S = _w_fold(rs, T, grid.axis, pts)
    n_pos = rs.n_positive
    pi_rho = float(np.prod(rs.pairings(rs.rho_c)))
    denom = (1j ** n_pos) * pi_many(rs, np.atleast_2d(pts)) \
        * weyl_group(rs).order * 4.0 ** n_pos
    return pi_rho * S / denom


def _inverse_core(rs: RootSystem, g: SpectralFunction, pts: np.ndarray,
                  constant: float) -> np.ndarray:
    """Inverse transform at arbitrary flat-part points off the walls."""
    grid = g.grid
    lam_pi = pi_many(rs, grid.nodes)
    T = (grid.weights * g.values * lam_pi).reshape(grid.shape)
    S = _w_fold(rs, T, grid.axis, pts)
    n_pos = rs.n_positive
    pi_rho = float(np.prod(rs.pairings(rs.rho_c)))
    den = weyl_denominator(rs, np.atleast_2d(pts))
    return constant * pi_rho * S / ((1j ** n_pos) * den)


def _patched(rs: RootSystem, pts: np.ndarray, core, box_scale: float,
             exact_origin) -> np.ndarray:
    """Evaluate ``core`` on pts, patching hyperplane points by extrapolation."""
    pts = np.atleast_2d(pts)
    out = np.empty(pts.shape[0], dtype=complex)
    sing = _near_singular(rs, pts)
    origin = np.linalg.norm(pts, axis=1) < 1e-14
    regular = ~sing & ~origin
    if np.any(regular):
        out[regular] = core(pts[regular])
    out[origin] = exact_origin()
    todo = np.nonzero(sing & ~origin)[0]
    if todo.size:
        u = _generic_direction(rs.rank)
        tau = 0.05 / max(box_scale, 1.0)
        ks = np.arange(1, _EXTRAP_K + 1)
        shifted = (pts[todo][:, None, :]
                   + (tau * ks)[None, :, None] * u[None, None, :])
        vals = core(shifted.reshape(-1, rs.rank)).reshape(todo.size, _EXTRAP_K)
        out[todo] = vals @ _extrap_weights()
    return out


def forward_transform(rs: RootSystem, f: RadialFunction, grid: SpectralGrid,
                      tail_tol: float = TAIL_TOL,
                      tail_floor: float = 0.0) -> SpectralFunction:
    """Spherical Fourier transform Hf(lam) = int_{a+} delta f phi_lam dH.

    ``tail_floor`` is an absolute mass below which the tail check is waived
    (for functions that are negligible relative to some reference flow)."""
    rgrid = f.grid
    if rgrid.rs is not rs or grid.rs is not rs:
        raise ConfigError("grids belong to a different root system")
    bound = rgrid.weights * density_delta(rs, rgrid.nodes) * np.abs(f.values) \
        * phi0(rs, rgrid.nodes)
    total, shell = float(bound.sum()), float(bound[rgrid.shell_mask()].sum())
    if total > tail_floor and shell > tail_tol * total:
        raise InconclusiveIntegralError(
            f"radial tail mass {shell:.3e} exceeds {tail_tol:.1e} of {total:.3e}",
            tail_bound=shell, accumulated=total)

    def origin():
        w = rgrid.weights * density_delta(rs, rgrid.nodes) * f.values \
            * phi0(rs, rgrid.nodes)
        return complex(w.sum() / weyl_group(rs).order)

    vals = _patched(rs, grid.nodes, lambda p: _forward_core(rs, f, p),
                    box_scale=rgrid.box_radius, exact_origin=origin)
    return SpectralFunction(grid, vals)


def inverse_transform(rs: RootSystem, g: SpectralFunction, grid: RadialGrid,
                      tail_tol: float = TAIL_TOL,
                      tail_floor: float = 0.0) -> RadialFunction:
    """Inverse transform f(H) = C_rs int Hf(lam) phi_lam(H) pi(lam)^2 dlam."""
    sgrid = g.grid
    if sgrid.rs is not rs or grid.rs is not rs:
        raise ConfigError("grids belong to a different root system")
    bound = sgrid.weights * np.abs(g.values) * plancherel_density(rs, sgrid.nodes)
    total, shell = float(bound.sum()), float(bound[sgrid.shell_mask()].sum())
    if total > tail_floor and shell > tail_tol * total:
        raise InconclusiveIntegralError(
            f"spectral tail mass {shell:.3e} exceeds {tail_tol:.1e} of {total:.3e}",
            tail_bound=shell, accumulated=total)
    C = plancherel_constant(rs)

    def origin():
        w = sgrid.weights * g.values * plancherel_density(rs, sgrid.nodes)
        return complex(C * w.sum())

    vals = _patched(rs, grid.nodes, lambda p: _inverse_core(rs, g, p, C),
                    box_scale=sgrid.box_radius, exact_origin=origin)
    return RadialFunction(grid, vals)


_REFERENCE_GRIDS = {1: dict(R=11.0, n=441, L=11.0, m=441),
                    2: dict(R=10.0, n=161, L=12.0, m=161)}


@lru_cache(maxsize=8)
def _plancherel_constant_cached(family: str, rank: int) -> float:
    from .root_system import build_root_system
    rs = build_root_system(family, rank)
    if rank not in _REFERENCE_GRIDS:
        raise UnsupportedConfigurationError(
            "transform calibration grids are defined for rank <= 2")
    ref = _REFERENCE_GRIDS[rank]
    rgrid = RadialGrid(rs, ref["R"], ref["n"])
    sgrid = SpectralGrid(rs, ref["L"], ref["m"])
    f = RadialFunction(rgrid, np.exp(-np.sum(rgrid.nodes ** 2, axis=1)))
    Hf = forward_transform(rs, f, sgrid, tail_tol=1e-6)
    w = sgrid.weights * Hf.values * plancherel_density(rs, sgrid.nodes)
    raw_at_zero = complex(w.sum())   # inverse with constant 1 at H = 0
    return float(1.0 / raw_at_zero.real)


def plancherel_constant(rs: RootSystem) -> float:
    """Frozen calibration constant making inverse(forward(.)) the identity.

    Determined once per root system by a reference-Gaussian round trip
    pinned at the origin, where phi_lam = 1 exactly.
    """
    return _plancherel_constant_cached(rs.family, rs.rank)


def parseval_pair(rs: RootSystem, f: RadialFunction, grid: SpectralGrid) -> tuple:
    """(int_{a+} delta |f|^2, C int |Hf|^2 pi^2) for consistency checks."""
    from .geometry import integrate_biinvariant
    lhs = integrate_biinvariant(rs, RadialFunction(f.grid, np.abs(f.values) ** 2))
    Hf = forward_transform(rs, f, grid)
    rhs = plancherel_constant(rs) * float(np.sum(
        grid.weights * np.abs(Hf.values) ** 2 * plancherel_density(rs, grid.nodes)))
    return float(lhs.real), rhs


# ---------------------------------------------------------------------------
# radial Laplacian
# ---------------------------------------------------------------------------

def radial_laplacian_apply(rs: RootSystem, f: RadialFunction) -> RadialFunction:
    """Second-order finite-difference radial part of the Laplace-Beltrami
    operator, Delta_flat + sum_{alpha>0} 2 coth<alpha,H> d_alpha.

    Output values are valid on interior chamber nodes at least 2h from every
    root wall and from the box boundary; elsewhere they are NaN.
    """
    grid = f.grid
    if grid.points_per_axis < 9:
        raise ConfigError("grid too coarse for finite differences (need n >= 9)")
    h = grid.spacing
    rank = grid.rs.rank
    F = f.tensor()
    lap = np.zeros_like(F)
    grads = []
    for ax in range(rank):
        plus = np.roll(F, -1, axis=ax)
        minus = np.roll(F, 1, axis=ax)
        lap += (plus - 2.0 * F + minus) / h ** 2
        grads.append((plus - minus) / (2.0 * h))
    grad = np.stack([g.ravel() for g in grads], axis=-1)   # (N, rank)
    pair = grid.nodes @ rs.roots_c.T                       # (N, n_roots)
    valid = grid.interior_chamber_mask(2)
    coth = np.zeros_like(pair)
    coth[valid] = 1.0 / np.tanh(pair[valid])
    first_order = 2.0 * np.sum(coth * (grad @ rs.roots_c.T), axis=1)
    out = lap.ravel() + first_order
    out[~valid] = np.nan
    return RadialFunction(grid, out)
