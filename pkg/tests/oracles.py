"""Quadrature oracles, independent of the package's own density code.

Everything here goes through scipy.stats / scipy.integrate so that agreement
with the engine is a genuine cross-check of two separate implementations.
"""

import math

import numpy as np
from scipy import integrate, stats


def tail_prob_1d(y, n, p0, tau, eta0=0.0, sigma2_eta=1.0):
    """P(eta >= tau | y/n) for the one-indication reduced model with the
    effect prior pinned at N(eta0, sigma2_eta). Adaptive quadrature."""
    theta0 = math.log(p0 / (1 - p0))
    sd = math.sqrt(sigma2_eta)

    def unnorm(eta):
        p1 = 1.0 / (1.0 + np.exp(-(theta0 + eta)))
        return stats.binom.pmf(y, n, p1) * stats.norm.pdf(eta, eta0, sd)

    z, _ = integrate.quad(unnorm, -10, 10, limit=200)
    num, _ = integrate.quad(unnorm, tau, 10, limit=200)
    return num / z


def reduced_probs_2d(
    y1, n1, yh, nh, yl, nl, p0, tau1, tau2,
    eta0=0.0, sigma2_eta=1.0, gamma0=0.0, sigma2_gamma=1.0,
    grid=400,
):
    """The three final-analysis probabilities for the one-indication
    fixed-hyper model, by tensor-grid quadrature over (eta, log gamma).

    Each tail probability integrates over a region whose grid is aligned to
    the event boundary (for the eta - gamma event via the substitution
    v = eta - gamma, Jacobian 1), so there is no mask-discretization error.

    Returns (P(eta >= tau1), P(eta - gamma >= tau1), P(gamma >= tau2)).
    """
    theta0 = math.log(p0 / (1 - p0))
    lo_e, hi_e = -8.0, 8.0
    lo_u, hi_u = -8.0, 5.0

    def density(eta, u):
        gamma = np.exp(u)
        p1 = 1.0 / (1.0 + np.exp(-(theta0 + eta)))
        p2 = 1.0 / (1.0 + np.exp(-(theta0 + eta - gamma)))
        return (
            stats.binom.pmf(y1, n1, p1)
            * stats.binom.pmf(yh, nh, p1)
            * stats.binom.pmf(yl, nl, p2)
            * stats.norm.pdf(eta, eta0, math.sqrt(sigma2_eta))
            * stats.norm.pdf(u, gamma0, math.sqrt(sigma2_gamma))
        )

    def mass_eta_u(e_lo, e_hi, u_lo, u_hi):
        eg = np.linspace(e_lo, e_hi, grid)
        ug = np.linspace(u_lo, u_hi, grid)
        e, u = np.meshgrid(eg, ug, indexing="ij")
        return np.trapezoid(np.trapezoid(density(e, u), ug, axis=1), eg)

    def mass_v_u(v_lo, v_hi, u_lo, u_hi):
        # v = eta - exp(u); d(eta)/d(v) = 1
        vg = np.linspace(v_lo, v_hi, grid)
        ug = np.linspace(u_lo, u_hi, grid)
        v, u = np.meshgrid(vg, ug, indexing="ij")
        return np.trapezoid(np.trapezoid(density(v + np.exp(u), u), ug, axis=1), vg)

    total = mass_eta_u(lo_e, hi_e, lo_u, hi_u)
    p_high = mass_eta_u(tau1, hi_e, lo_u, hi_u) / total
    p_low = mass_v_u(tau1, hi_e, lo_u, hi_u) / total
    p_gap = mass_eta_u(lo_e, hi_e, math.log(tau2), hi_u) / total
    return p_high, p_low, p_gap
