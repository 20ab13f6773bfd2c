"""Gagliardo 1/2-seminorm machinery for edge traces.

The seminorm of a trace v on a straight edge is the double integral of
|v(x) - v(y)|^2 / |x - y|^2 over the edge.  It is invariant under the
arclength parametrization scale, so every routine here works on traces
re-parametrized to [0, 1].  Two facts drive the implementation:

* For an affine trace the difference quotient is the constant slope, so
  the seminorm squared equals the squared endpoint difference exactly.
* For a polynomial trace the difference quotient (v(s) - v(t)) / (s - t)
  is itself a bivariate polynomial, so evaluating it through its
  coefficients removes the 0/0 ambiguity on the diagonal and tensor
  Gauss quadrature is exact.
"""
from __future__ import annotations

import numpy as np

from .quadrature import gauss01


def half_sq_affine(va: float, vb: float) -> float:
    """Seminorm squared of the affine trace with endpoint values va, vb."""
    return (vb - va) ** 2


def half_inner_affine(ua, ub, va, vb) -> float:
    """1/2-seminorm inner product of two affine traces on one edge."""
    return (ub - ua) * (vb - va)


def _diffquot_values(coeffs: np.ndarray, s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Evaluate (v(s_i) - v(t_j)) / (s_i - t_j) on the tensor grid.

    Uses the divided-difference expansion
    (s^k - t^k)/(s - t) = sum_{m<k} s^m t^(k-1-m), valid on the diagonal.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    deg = len(coeffs) - 1
    ns, nt = len(s), len(t)
    if deg < 1:
        return np.zeros((ns, nt))
    spow = np.vander(s, deg, increasing=True).T  # spow[m] = s**m, m < deg
    tpow = np.vander(t, deg, increasing=True).T
    out = np.zeros((ns, nt))
    for k in range(1, deg + 1):
        ck = coeffs[k]
        if ck == 0.0:
            continue
        block = np.zeros((ns, nt))
        for m in range(k):
            block += np.outer(spow[m], tpow[k - 1 - m])
        out += ck * block
    return out


def half_inner_poly(coeffs_u, coeffs_v, n_quad: int = 24) -> float:
    """1/2-seminorm inner product of two polynomial traces on one edge.

    Coefficients are ascending-order in the unit parametrization of the
    edge.  Exact (up to roundoff) whenever 2*n_quad - 1 covers twice the
    trace degree, since the integrand is polynomial.
    """
    s, w = gauss01(n_quad)
    qu = _diffquot_values(coeffs_u, s, s)
    if coeffs_v is coeffs_u:
        qv = qu
    else:
        qv = _diffquot_values(coeffs_v, s, s)
    return float(w @ (qu * qv) @ w)


def half_sq_poly(coeffs, n_quad: int = 24) -> float:
    return half_inner_poly(coeffs, coeffs, n_quad)


def rescale_trace(coeffs, length: float) -> np.ndarray:
    """Re-parametrize trace coefficients from [0, length] to [0, 1]."""
    coeffs = np.asarray(coeffs, dtype=float)
    return coeffs * length ** np.arange(len(coeffs))


def cross_edge_half_inner(
    edge_u: np.ndarray,
    coeffs_u,
    edge_v: np.ndarray,
    coeffs_v,
    n_quad: int = 24,
) -> float:
    """Double integral of (u(x)-v(y))^2 / |x-y|^2 over two distinct edges.

    `edge_*` are (2, 2) endpoint arrays; traces are polynomials in the
    unit parametrization of their own edge.  Used for the cross terms of
    the 1/2-seminorm on a whole polygon boundary; the integrand is
    bounded there because Gauss nodes stay away from shared corners.
    """
    s, ws = gauss01(n_quad)
    la = float(np.linalg.norm(edge_u[1] - edge_u[0]))
    lb = float(np.linalg.norm(edge_v[1] - edge_v[0]))
    pa = edge_u[0] + np.outer(s, edge_u[1] - edge_u[0])
    pb = edge_v[0] + np.outer(s, edge_v[1] - edge_v[0])
    ua = np.polynomial.polynomial.polyval(s, np.asarray(coeffs_u, dtype=float))
    vb = np.polynomial.polynomial.polyval(s, np.asarray(coeffs_v, dtype=float))
    diff = ua[:, None] - vb[None, :]
    dist2 = ((pa[:, None, :] - pb[None, :, :]) ** 2).sum(axis=2)
    integrand = diff * diff / dist2
    return float(la * lb * (ws @ integrand @ ws))


def boundary_half_sq(verts: np.ndarray, edge_coeffs: list, n_quad: int = 24) -> float:
    """1/2-seminorm squared of a piecewise-polynomial trace on the whole
    polygon boundary (all edge pairs, not just the broken diagonal sum).

    `edge_coeffs[i]` holds ascending coefficients of the trace on edge i
    in that edge's unit parametrization.
    """
    n = len(verts)
    edges = [np.array([verts[i], verts[(i + 1) % n]]) for i in range(n)]
    total = 0.0
    for i in range(n):
        total += half_sq_poly(edge_coeffs[i], n_quad)
        for j in range(n):
            if j != i:
                total += cross_edge_half_inner(
                    edges[i], edge_coeffs[i], edges[j], edge_coeffs[j], n_quad
                )
    return total


def broken_half_sq(edge_coeffs: list, n_quad: int = 24) -> float:
    """Sum of per-edge 1/2-seminorms squared (the broken variant)."""
    return sum(half_sq_poly(c, n_quad) for c in edge_coeffs)
