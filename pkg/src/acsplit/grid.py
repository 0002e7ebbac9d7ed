"""Periodic grid bookkeeping, discrete Fourier transforms, the heat semigroup,
and the Fourier-side quadratic forms shared by both Allen-Cahn models.

Conventions
-----------
The domain is the 2*pi-periodic torus [-pi, pi]^d with d in {1, 2, 3} and N
uniform nodes per axis, x_j = -pi + 2*pi*j/N.  Wavenumbers are the integers
k in {-N/2, ..., N/2 - 1} per axis.  Spectral coefficients are normalized so

    u_hat[k] = N^{-d} * sum_j u(x_j) exp(-i k . x_j),

which makes u_hat[0] the spatial mean and gives the Parseval identity

    w * sum_j |u(x_j)|^2 = (2*pi)^d * sum_k |u_hat[k]|^2,   w = (2*pi/N)^d.

Fields are plain numpy arrays whose d leading axes are the spatial axes; any
trailing axes (vector components, matrix entries) ride along untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TorusGrid",
    "forward_transform",
    "inverse_transform",
    "heat_propagate",
    "dissipation_quadratic",
    "dirichlet_energy",
]


@dataclass(frozen=True)
class TorusGrid:
    """Uniform periodic grid on [-pi, pi]^d.

    Attributes
    ----------
    d : spatial dimension, 1 to 3
    n : points per axis, even, >= 4
    """

    d: int
    n: int
    # cached derived arrays; computed in __post_init__
    _k1: np.ndarray = field(init=False, repr=False, compare=False)
    _k2: np.ndarray = field(init=False, repr=False, compare=False)
    _k2r: np.ndarray = field(init=False, repr=False, compare=False)
    _phase: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2, or 3, got {self.d}")
        if self.n < 4 or self.n % 2 != 0:
            raise ValueError(f"points per axis must be even and >= 4, got {self.n}")
        k1 = (np.fft.fftfreq(self.n) * self.n).astype(np.float64)
        shape = self.shape
        k2 = np.zeros(shape)
        for ax in range(self.d):
            sl = [None] * self.d
            sl[ax] = slice(None)
            k2 = k2 + k1[tuple(sl)] ** 2
        # half-spectrum |k|^2 for the real-input transforms used by the heat
        # step: the last spatial axis carries frequencies 0..n/2 only
        k1r = np.arange(self.n // 2 + 1, dtype=np.float64)
        per_axis = [k1] * (self.d - 1) + [k1r]
        k2r = np.zeros(shape[: self.d - 1] + (self.n // 2 + 1,))
        for ax in range(self.d):
            sl = [None] * self.d
            sl[ax] = slice(None)
            k2r = k2r + per_axis[ax][tuple(sl)] ** 2
        # (-1)^k per axis: the phase factor between numpy's j=0-at-origin DFT
        # and coefficients anchored at x_0 = -pi
        ph1 = np.where(k1.astype(np.int64) % 2 == 0, 1.0, -1.0)
        phase = np.ones(shape)
        for ax in range(self.d):
            sl = [None] * self.d
            sl[ax] = slice(None)
            phase = phase * ph1[tuple(sl)]
        object.__setattr__(self, "_k1", k1)
        object.__setattr__(self, "_k2", k2)
        object.__setattr__(self, "_k2r", k2r)
        object.__setattr__(self, "_phase", phase)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def spatial_axes(self) -> tuple[int, ...]:
        return tuple(range(self.d))

    @property
    def cell_volume(self) -> float:
        """Quadrature weight per node; integral of 1 equals (2*pi)^d."""
        return (2.0 * np.pi / self.n) ** self.d

    @property
    def volume(self) -> float:
        return (2.0 * np.pi) ** self.d

    @property
    def nodes(self) -> np.ndarray:
        """1D node coordinates -pi + 2*pi*j/n, shared by every axis."""
        return -np.pi + 2.0 * np.pi * np.arange(self.n) / self.n

    def meshes(self) -> tuple[np.ndarray, ...]:
        """d coordinate arrays of shape self.shape ('ij' indexing)."""
        return tuple(np.meshgrid(*([self.nodes] * self.d), indexing="ij"))

    @property
    def wavenumbers_squared(self) -> np.ndarray:
        """|k|^2 on the full wavenumber lattice, shape self.shape."""
        return self._k2

    def _broadcast(self, mult: np.ndarray, field_ndim: int) -> np.ndarray:
        """Reshape a spectral multiplier to broadcast over trailing axes."""
        return mult.reshape(mult.shape + (1,) * (field_ndim - self.d))


def _check_field(grid: TorusGrid, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    if values.shape[: grid.d] != grid.shape:
        raise ValueError(
            f"field shape {values.shape} does not start with grid shape {grid.shape}"
        )
    return values


def forward_transform(grid: TorusGrid, values: np.ndarray) -> np.ndarray:
    """Normalized DFT coefficients u_hat[k] = N^{-d} sum_j u(x_j) e^{-ik.x_j}.

    Trailing (non-spatial) axes are transformed independently.  Raises on
    non-finite input.
    """
    values = _check_field(grid, values)
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite values in field")
    coeffs = np.fft.fftn(values, axes=grid.spatial_axes) / grid.n**grid.d
    return coeffs * grid._broadcast(grid._phase, coeffs.ndim)


def inverse_transform(grid: TorusGrid, coeffs: np.ndarray) -> np.ndarray:
    """Inverse of forward_transform; returns the real part of the node values."""
    coeffs = _check_field(grid, coeffs)
    shifted = coeffs * grid._broadcast(grid._phase, coeffs.ndim)
    values = np.fft.ifftn(shifted, axes=grid.spatial_axes) * grid.n**grid.d
    return values.real


def heat_propagate(grid: TorusGrid, values: np.ndarray, t: float) -> np.ndarray:
    """Heat semigroup e^{t*Laplacian}: multiplier e^{-t|k|^2} per coefficient.

    Applied componentwise over any trailing axes.  The k = 0 multiplier is
    exactly 1, so the spatial mean is preserved.  Requires t >= 0.
    """
    if t < 0:
        raise ValueError(f"heat propagation time must be >= 0, got {t}")
    values = _check_field(grid, values)
    if t == 0:
        return np.array(values, copy=True)
    coeffs = np.fft.rfftn(values, axes=grid.spatial_axes)
    mult = grid._broadcast(np.exp(-t * grid._k2r), coeffs.ndim)
    return np.fft.irfftn(coeffs * mult, s=grid.shape, axes=grid.spatial_axes)


def dissipation_quadratic(grid: TorusGrid, coeffs: np.ndarray, tau: float) -> float:
    """Quadratic form (2*pi)^d sum_k (1 - e^{-tau|k|^2}) |u_hat[k]|^2.

    `coeffs` must be the coefficients of the PRE-half-step field u: with
    u_tilde = e^{(tau/2) Laplacian} u this equals the nonnegative form
    integral of <(e^{-tau*Laplacian} - 1) u_tilde, u_tilde>, without ever
    evaluating the growing symbol e^{+tau|k|^2}.  Trailing axes are summed
    (componentwise scalar forms add).  Uses expm1 so that small tau suffers
    no cancellation.
    """
    if tau <= 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    coeffs = _check_field(grid, coeffs)
    mult = grid._broadcast(-np.expm1(-tau * grid._k2), coeffs.ndim)
    total = np.sum(mult * (coeffs.real**2 + coeffs.imag**2))
    return float(grid.volume * total)


def dirichlet_energy(grid: TorusGrid, coeffs: np.ndarray) -> float:
    """Gradient energy (1/2) * (2*pi)^d * sum_k |k|^2 |u_hat[k]|^2.

    Equals (1/2) * integral |grad u|^2 for the trigonometric interpolant.
    Trailing axes are summed.
    """
    coeffs = _check_field(grid, coeffs)
    mult = grid._broadcast(grid._k2, coeffs.ndim)
    total = np.sum(mult * (coeffs.real**2 + coeffs.imag**2))
    return float(0.5 * grid.volume * total)
