from .tensor_calculus import christoffel, covariant_derivative, rough_laplacian, bilaplacian, hessian
from .bundle import (
    CurvatureBundle, riemann, curvature_bundle, rcheck, ricci, scalar_curvature,
    gauss_curvature, nabla_k_rm, derivative_norms, f_m,
)

__all__ = [
    'christoffel', 'covariant_derivative', 'rough_laplacian', 'bilaplacian', 'hessian',
    'CurvatureBundle', 'riemann', 'curvature_bundle', 'rcheck', 'ricci', 'scalar_curvature',
    'gauss_curvature', 'nabla_k_rm', 'derivative_norms', 'f_m',
]
