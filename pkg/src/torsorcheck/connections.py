"""Canonical unitary connections, their curvature, and the induced family/slice forms.

Connection forms live in the automorphy frame on the universal cover: a
connection is d + theta with theta a (1,0)-covector field on C^g, and
compatibility with the bundle's factor a(lam, z) forces the increment

    theta(z + lam) - theta(z) = - d_z log a(lam, .) = - pi * H(dz, lam).

For the metric weight exp(-pi H(z, z)) the compatible holomorphic-structure
connection is theta(z) = -pi H(dz, z); its curvature coefficient matrix (read
against dz_j ^ dzbar_k) is the constant -pi H.  Scaling by i/(2 pi) anchors
the curvature class: its cycle integrals reproduce the integer pairing matrix
E on lattice pairs, which pins every sign convention in the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundles import (
    AHDatum,
    addition_map,
    build_family,
    first_projection,
    parameter_section,
    pullback,
    pullback_frame_log,
    slice_embedding,
    TorusHomomorphism,
)
from .grids import GridFunction, dbar_fd, wirtinger_at
from .torus import InvariantForm, TorusPoint

#: scale making cycle integrals of the curvature class integral
CHERN_NORMALIZATION = 1j / (2.0 * np.pi)


class ConnectionForm:
    """A (1,0)-form-valued map on the cover, attached to a bundle datum.

    ``theta`` is vectorized: lifts of shape (..., g) map to covectors of the
    same shape.  ``kind`` records whether the map is a closed formula or
    grid-backed data.
    """

    def __init__(self, datum: AHDatum, theta, kind: str = "analytic"):
        self.datum = datum
        self.theta = theta
        self.kind = kind

    def __call__(self, z) -> np.ndarray:
        return np.asarray(self.theta(np.asarray(z, dtype=complex)), dtype=complex)

    def automorphy_defect(self, lam, z) -> np.ndarray:
        """Deviation of theta(z+lam) - theta(z) from -pi H(dz, lam)."""
        lam = np.asarray(lam, dtype=complex)
        expected = -np.pi * (self.datum.hermitian @ np.conj(lam))
        return self(np.asarray(z, dtype=complex) + lam) - self(z) - expected


def canonical_connection(datum: AHDatum) -> ConnectionForm:
    """The unitary connection with translation-invariant curvature."""
    h = datum.hermitian

    def theta(z):
        return -np.pi * (np.conj(z) @ h.T)

    return ConnectionForm(datum, theta)


def pullback_connection(f: TorusHomomorphism, conn: ConnectionForm,
                        frame: str = "normal") -> ConnectionForm:
    """Pullback along z -> M z + t, expressed on the pulled-back datum.

    ``frame="normal"`` lands in the normal-form frame of the pulled-back
    datum (adds the derivative of the frame-change log); ``frame="restricted"``
    keeps the raw pullback of the covector.
    """
    if frame not in ("normal", "restricted"):
        raise ValueError(f"unknown frame {frame!r}")
    datum_pull = pullback(f, conn.datum)
    _, dlog_row = pullback_frame_log(f, conn.datum)
    correction = dlog_row if frame == "normal" else np.zeros_like(dlog_row)

    def theta(z):
        return conn.theta(f.apply(z)) @ f.matrix + correction

    return ConnectionForm(datum_pull, theta, kind=conn.kind)


def family_connection(datum: AHDatum) -> ConnectionForm:
    """Connection on (p1* dual L) tensor (addition* L) induced by the canonical one."""
    fam_datum = build_family(datum)
    prod = fam_datum.torus
    p1 = first_projection(prod)
    alpha = addition_map(prod)
    theta_dual = canonical_connection(datum.dual())
    theta_base = canonical_connection(datum)

    def theta(u):
        u = np.asarray(u, dtype=complex)
        part_p1 = theta_dual.theta(u @ p1.matrix.T) @ p1.matrix
        part_add = theta_base.theta(u @ alpha.matrix.T) @ alpha.matrix
        return part_p1 + part_add

    return ConnectionForm(fam_datum, theta)


def slice_connection(family_conn: ConnectionForm, x: TorusPoint,
                     frame: str = "restricted") -> ConnectionForm:
    """Restriction of the family connection to the slice A x {x}.

    The default frame is the restriction of the product automorphy frame; the
    slice datum's normal frame differs by the nonvanishing factor
    exp(pi H_family((z, 0), (0, x))) and is available with ``frame="normal"``.
    Either way the restriction is flat: the covector is constant in z.
    """
    f = slice_embedding(x, family_conn.datum.torus)
    return pullback_connection(f, family_conn, frame=frame)


@dataclass
class CurvatureForm:
    """Grid of curvature coefficient matrices K[..., j, k] = d theta_j / dzbar_k."""

    connection: ConnectionForm
    grid: GridFunction

    def constant_matrix(self) -> np.ndarray:
        return self.grid.mean()

    def max_variation(self) -> float:
        return self.grid.max_variation()


def curvature(conn: ConnectionForm, resolution: int) -> CurvatureForm:
    """Curvature by central differences of the sampled covector field.

    The covector is not periodic on the torus; its constant period increments
    (the automorphy shifts) are measured from evaluations and fed to the
    seam-aware stencil, so the differences are exact (to rounding) whenever
    the covector is affine in (z, zbar).
    """
    torus = conn.datum.torus
    gf = GridFunction.sample(torus, resolution, conn.theta, measure_jumps=True)
    return CurvatureForm(conn, dbar_fd(gf))


def curvature_at(conn: ConnectionForm, coords, h: float) -> np.ndarray:
    """Pointwise curvature matrices from direct stencil evaluation.

    ``coords`` are lattice coordinates (..., 2g); the result has shape
    (..., g, g).  Suited to product tori where a full grid is out of reach.
    """
    torus = conn.datum.torus
    _, dzbar = wirtinger_at(torus, conn.theta, coords, h)
    return dzbar


def chern_form(datum: AHDatum) -> InvariantForm:
    """The invariant (1,1) representative of the bundle's integral class.

    Coefficients are i/(2 pi) times the analytic curvature -pi H; with the
    package's pairing conventions its cycle integrals equal Im H on lattice
    pairs, an integer matrix.
    """
    coeff = CHERN_NORMALIZATION * (-np.pi) * datum.hermitian
    return InvariantForm(datum.torus, (1, 1), coeff)


def check_eq_i(family_conn: ConnectionForm, y: TorusPoint, resolution: int) -> float:
    """Max deviation of the restricted family curvature from the invariant class.

    Restricts the family curvature along x -> (y, x), recomputing it by
    seam-aware differences over the x-grid, scales by the Chern normalization
    and compares against the class of the underlying bundle (read off the
    lower-right block of the family pairing).  Translation invariance makes
    the result independent of y.
    """
    base = y.torus
    g = base.genus
    prod = family_conn.datum.torus
    f = parameter_section(y, prod)

    def pulled(x_lifts):
        return family_conn.theta(f.apply(x_lifts)) @ f.matrix

    gf = GridFunction.sample(base, resolution, pulled, measure_jumps=True)
    restricted = CHERN_NORMALIZATION * dbar_fd(gf).values
    target = CHERN_NORMALIZATION * (-np.pi) * family_conn.datum.hermitian[g:, g:]
    return float(np.max(np.abs(restricted - target)))
