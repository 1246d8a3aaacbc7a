"""
Riemann tensor and the curvature quantities derived from it.

R_ijk^l = ∂_iΓ^l_jk − ∂_jΓ^l_ik + Γ^p_jkΓ^l_ip − Γ^p_ikΓ^l_jp and
R_ijkl = g_lm R_ijk^m, so that R_1221 = K·det g on a surface.
Rc_jk = g^{il}R_ijkl, s = g^{jk}Rc_jk.
"""

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..constants import M_MAX, SYMMETRY_DEFECT_WARN
from ..tensor.algebra import contract_norm_sq, inverse_components, raise_slot
from ..tensor.grid import TensorField
from ..tensor.spectral import gradient_components
from ..utils.validators import SymmetryDefect, ValenceOverflow
from .tensor_calculus import christoffel, nabla_sequence

logger = logging.getLogger(__name__)

RM_SYMMETRIES = ((0, 1, -1), (2, 3, -1))
ROUNDOFF_FACTOR = 1e4


@dataclass(eq=False)
class CurvatureBundle:
    gamma: TensorField
    rm: TensorField
    rc: TensorField
    s: np.ndarray
    norm_rm_sq: np.ndarray
    symmetry_defect: float = 0.0
    rcheck: TensorField = None
    deriv_norms: list = field(default_factory=list)

    @property
    def gauss(self):
        return 0.5 * self.s

    @property
    def deriv_sup(self):
        """sup over nodes of |∇ᵏRm| for each computed k."""
        return [float(np.max(norm)) for norm in self.deriv_norms]

    @property
    def sup_rm(self):
        return float(np.sqrt(np.max(self.norm_rm_sq)))


def _raw_riemann(g, gamma):
    gam = gamma.components
    dgam = gradient_components(gam, g.chart)  # dgam[a, l, j, k] = ∂_a Γ^l_jk
    upper = (
        np.einsum("iljkXY->ijklXY", dgam)
        - np.einsum("jlikXY->ijklXY", dgam)
        + np.einsum("pjkXY,lipXY->ijklXY", gam, gam)
        - np.einsum("pikXY,ljpXY->ijklXY", gam, gam)
    )
    return np.einsum("lmXY,ijkmXY->ijklXY", g.components(), upper)


def surface_riemann(K, g):
    """R_ijkl = K(g_il g_jk − g_ik g_jl), exact Riemann symmetries in storage."""
    gc = g.components()
    return K * (
        np.einsum("ilXY,jkXY->ijklXY", gc, gc) - np.einsum("ikXY,jlXY->ijklXY", gc, gc)
    )


def _ricci(rm, ginv):
    return np.einsum("ilXY,ijklXY->jkXY", ginv, rm)


def _roundoff_floor(g, size):
    """Norm of spectral second-derivative round-off on a tensor of ``size`` entries."""
    k_max = np.pi / min(g.chart.h1, g.chart.h2)
    scale = float(np.max(np.abs(g.as_array())))
    return ROUNDOFF_FACTOR * np.finfo(float).eps * scale * k_max**2 * np.sqrt(size)


def riemann(g, symmetrize=True, m_max=0):
    """Curvature bundle of ``g`` with Rm, Rc and s populated.

    With ``symmetrize`` the assembled tensor is projected onto the surface form
    K(g_il g_jk − g_ik g_jl) and the relative size of the correction is kept as
    ``symmetry_defect``. ``m_max`` > 0 also fills pointwise |∇ᵏRm|.
    """
    gamma = christoffel(g)
    ginv = inverse_components(g)
    raw = _raw_riemann(g, gamma)
    raw_s = np.einsum("jkXY,jkXY->XY", ginv, _ricci(raw, ginv))
    defect = 0.0
    if symmetrize:
        rm_comps = surface_riemann(0.5 * raw_s, g)
        raw_norm = float(np.linalg.norm(raw))
        # below the round-off floor the assembled tensor carries no curvature
        if raw_norm > _roundoff_floor(g, raw.size):
            defect = float(np.linalg.norm(raw - rm_comps)) / raw_norm
        if defect > SYMMETRY_DEFECT_WARN:
            logger.warning("Riemann symmetrization defect %.3e exceeds %.1e", defect, SYMMETRY_DEFECT_WARN)
            warnings.warn(
                f"curvature symmetrization defect {defect:.3e}; grid may be under-resolved",
                SymmetryDefect,
                stacklevel=2,
            )
        rm = TensorField(rm_comps, g.chart, 4, symmetries=RM_SYMMETRIES)
    else:
        rm = TensorField(raw, g.chart, 4)
    rc_comps = _ricci(rm.components, ginv)
    if symmetrize:
        rc_comps = 0.5 * (rc_comps + np.swapaxes(rc_comps, 0, 1))
    rc = TensorField(rc_comps, g.chart, 2)
    s = np.einsum("jkXY,jkXY->XY", ginv, rc_comps)
    bundle = CurvatureBundle(
        gamma=gamma,
        rm=rm,
        rc=rc,
        s=s,
        norm_rm_sq=contract_norm_sq(rm.components, g, ginv),
        symmetry_defect=defect,
    )
    if m_max:
        bundle.deriv_norms = derivative_norms(g, m_max, bundle)
    logger.debug("curvature: sup|Rm| = %.6g, defect = %.2e", bundle.sup_rm, defect)
    return bundle


def curvature_bundle(g, m_max=M_MAX):
    """Fully populated bundle: Rm, Rc, s, Ř and |∇ᵏRm| for k <= m_max."""
    bundle = riemann(g, m_max=m_max)
    bundle.rcheck = rcheck(bundle, g)
    return bundle


def rcheck(b, g):
    """Ř_ij = R_ipqr R_j^{pqr}."""
    ginv = inverse_components(g)
    raised = b.rm.components
    for slot in (1, 2, 3):
        raised = raise_slot(raised, ginv, slot)
    comps = np.einsum("ipqrXY,jpqrXY->ijXY", b.rm.components, raised)
    comps = 0.5 * (comps + np.swapaxes(comps, 0, 1))
    return TensorField(comps, g.chart, 2, symmetries=((0, 1, 1),))


def ricci(b):
    return b.rc


def scalar_curvature(b):
    return b.s


def gauss_curvature(g):
    return riemann(g).gauss


def derivative_norms(g, m_max, bundle=None):
    """Pointwise |∇ᵏRm|_g for k = 0..m_max."""
    if m_max > M_MAX:
        raise ValenceOverflow(f"m = {m_max} exceeds m_max = {M_MAX}")
    if bundle is None:
        bundle = riemann(g)
    ginv = inverse_components(g)
    sequence = nabla_sequence(bundle.rm, g, m_max, bundle.gamma)
    return [np.sqrt(contract_norm_sq(comps, g, ginv)) for comps in sequence]


def nabla_k_rm(g, k, bundle=None):
    """∇ᵏRm as a TensorField of valence 4 + k."""
    if bundle is None:
        bundle = riemann(g)
    comps = nabla_sequence(bundle.rm, g, k, bundle.gamma)[-1]
    return TensorField(comps, g.chart, 4 + k)


def f_m(g, m, bundle=None):
    """Σ_{j=1..m} |∇ʲRm|^{2/(2+j)} pointwise, and its sup."""
    if m > M_MAX:
        raise ValenceOverflow(f"m = {m} exceeds m_max = {M_MAX}")
    norms = bundle.deriv_norms if bundle is not None and len(bundle.deriv_norms) > m else None
    if norms is None:
        norms = derivative_norms(g, m, bundle)
    values = np.zeros(g.chart.shape)
    for j in range(1, m + 1):
        values += np.power(norms[j], 2.0 / (2.0 + j))
    return values, float(np.max(values))


def first_bianchi_defect(rm):
    """Relative size of R_ijkl + R_jkil + R_kijl."""
    comps = rm.components
    cyclic = comps + np.einsum("jkilXY->ijklXY", comps) + np.einsum("kijlXY->ijklXY", comps)
    scale = float(np.linalg.norm(comps))
    return float(np.linalg.norm(cyclic)) / scale if scale > 0 else 0.0
