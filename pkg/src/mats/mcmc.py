"""Metropolis-within-Gibbs sampler for the hierarchical binomial-logit model.

The four hyper-parameters (eta0, sigma2_eta, gamma0, sigma2_gamma) have exact
conjugate full conditionals and are Gibbs-updated; the per-indication effects
eta_j and log(gamma_j) move by coordinate-wise Gaussian random-walk
Metropolis. Working on log(gamma_j) makes its prior exactly normal, so the
log-scale Jacobian is absorbed into the N(gamma0, sigma2_gamma) target.

Proposal scales adapt toward a target acceptance rate during burn-in only
(Robbins-Monro-style batch updates) and are frozen afterwards, preserving the
stationary law. The chain core is numba-compiled; numba maintains bit-stream
parity with numpy Generators, so runs are reproducible from a single seed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from numba import njit

from .model import PROB_FLOOR, ModelConfig, ModelState, TrialData

_INIT_SCALE = 0.5


@dataclass(frozen=True)
class McmcSettings:
    """Chain-length and tuning knobs. n_iterations counts post-burn-in
    iterations; every thin-th of those is stored."""

    n_iterations: int = 4000
    burn_in: int = 2000
    thin: int = 1
    adapt_window: int = 50
    target_accept: float = 0.44
    seed: int = 0

    def __post_init__(self):
        if self.n_iterations < 1:
            raise ValueError("n_iterations must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.adapt_window < 1:
            raise ValueError("adapt_window must be >= 1")
        if not (0.0 < self.target_accept < 1.0):
            raise ValueError("target_accept must lie in (0, 1)")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.n_iterations < 1000:
            warnings.warn(
                f"n_iterations={self.n_iterations} is below 1000; fine for smoke tests, "
                "not for decision-grade runs",
                stacklevel=2,
            )


@dataclass(frozen=True)
class FixedHypers:
    """Pinned hyper-parameter values for reduced-model runs (the Gibbs layer
    is skipped entirely). Used by oracle-comparison tests."""

    eta0: float = 0.0
    sigma2_eta: float = 1.0
    gamma0: float = 0.0
    sigma2_gamma: float = 1.0

    def __post_init__(self):
        if self.sigma2_eta <= 0 or self.sigma2_gamma <= 0:
            raise ValueError("pinned variances must be > 0")


# ---------------------------------------------------------------------------
# jitted kernels (shared by the chain and the public update operations)


@njit(cache=True)
def _site_loglik(theta0, eta, u, y1, n1, yh2, nh2, yl2, nl2):
    """Coefficient-free binomial log-likelihood for one indication.

    Normalizing constants cancel in Metropolis ratios, so they are omitted
    here (model.log_joint keeps them). Returns (loglik, clamp_count).
    """
    clamps = 0
    th1 = theta0 + eta
    p1 = 1.0 / (1.0 + math.exp(-th1)) if th1 >= 0 else math.exp(th1) / (1.0 + math.exp(th1))
    if p1 < PROB_FLOOR:
        p1 = PROB_FLOOR
        clamps += 1
    elif p1 > 1.0 - PROB_FLOOR:
        p1 = 1.0 - PROB_FLOOR
        clamps += 1
    th2 = th1 - math.exp(u)
    p2 = 1.0 / (1.0 + math.exp(-th2)) if th2 >= 0 else math.exp(th2) / (1.0 + math.exp(th2))
    if p2 < PROB_FLOOR:
        p2 = PROB_FLOOR
        clamps += 1
    elif p2 > 1.0 - PROB_FLOOR:
        p2 = 1.0 - PROB_FLOOR
        clamps += 1
    ll = (
        y1 * math.log(p1)
        + (n1 - y1) * math.log1p(-p1)
        + yh2 * math.log(p1)
        + (nh2 - yh2) * math.log1p(-p1)
        + yl2 * math.log(p2)
        + (nl2 - yl2) * math.log1p(-p2)
    )
    return ll, clamps


@njit(cache=True)
def _init_loglik(theta0, eta, u, y1, n1, yh2, nh2, yl2, nl2, ll):
    clamps = 0
    for j in range(eta.shape[0]):
        llj, c = _site_loglik(theta0[j], eta[j], u[j], y1[j], n1[j], yh2[j], nh2[j], yl2[j], nl2[j])
        ll[j] = llj
        clamps += c
    return clamps


@njit(cache=True)
def _mh_sweep(rng, theta0, y1, n1, yh2, nh2, yl2, nl2, eta, u, ll,
              eta0, sig2e, gamma0, sig2g, scale_e, scale_u, acc_e, acc_u):
    """One full coordinate sweep: every eta_j, then every u_j = log gamma_j.

    Mutates eta, u, ll and the acceptance counters in place; returns the
    probability-clamp count. Each coordinate's full conditional combines its
    indication's likelihood with the normal prior (exact for u because
    log gamma_j ~ N(gamma0, sigma2_gamma)).
    """
    clamps = 0
    J = eta.shape[0]
    for j in range(J):
        z = rng.standard_normal()
        prop = eta[j] + scale_e[j] * z
        llp, c = _site_loglik(theta0[j], prop, u[j], y1[j], n1[j], yh2[j], nh2[j], yl2[j], nl2[j])
        clamps += c
        dlog = (llp - ll[j]) - ((prop - eta0) ** 2 - (eta[j] - eta0) ** 2) / (2.0 * sig2e)
        if math.log(rng.random()) < dlog:
            eta[j] = prop
            ll[j] = llp
            acc_e[j] += 1
    for j in range(J):
        z = rng.standard_normal()
        prop = u[j] + scale_u[j] * z
        llp, c = _site_loglik(theta0[j], eta[j], prop, y1[j], n1[j], yh2[j], nh2[j], yl2[j], nl2[j])
        clamps += c
        dlog = (llp - ll[j]) - ((prop - gamma0) ** 2 - (u[j] - gamma0) ** 2) / (2.0 * sig2g)
        if math.log(rng.random()) < dlog:
            u[j] = prop
            ll[j] = llp
            acc_u[j] += 1
    return clamps


@njit(cache=True)
def _gibbs_hypers(rng, eta, u, sig2e, sig2g,
                  mu_e0, s2_e0, alpha_e, beta_e, mu_g0, s2_g0, alpha_g, beta_g):
    """Exact conjugate draws of (eta0, sigma2_eta, gamma0, sigma2_gamma).

    eta0 | eta, sigma2_eta is normal-normal; sigma2_eta | eta, eta0 is
    InvGamma(alpha + J/2, beta + sum((eta_j - eta0)^2)/2); the gamma pair is
    identical on u = log gamma. Location is drawn before its scale.
    """
    J = eta.shape[0]

    s = 0.0
    for j in range(J):
        s += eta[j]
    prec = 1.0 / s2_e0 + J / sig2e
    mean = (mu_e0 / s2_e0 + s / sig2e) / prec
    eta0 = mean + rng.standard_normal() / math.sqrt(prec)
    ss = 0.0
    for j in range(J):
        ss += (eta[j] - eta0) ** 2
    sig2e_new = (beta_e + 0.5 * ss) / rng.gamma(alpha_e + 0.5 * J, 1.0)

    s = 0.0
    for j in range(J):
        s += u[j]
    prec = 1.0 / s2_g0 + J / sig2g
    mean = (mu_g0 / s2_g0 + s / sig2g) / prec
    gamma0 = mean + rng.standard_normal() / math.sqrt(prec)
    ss = 0.0
    for j in range(J):
        ss += (u[j] - gamma0) ** 2
    sig2g_new = (beta_g + 0.5 * ss) / rng.gamma(alpha_g + 0.5 * J, 1.0)

    return eta0, sig2e_new, gamma0, sig2g_new


@njit(cache=True)
def _run_chain(rng, theta0, y1, n1, yh2, nh2, yl2, nl2,
               mu_e0, s2_e0, alpha_e, beta_e, mu_g0, s2_g0, alpha_g, beta_g,
               eta, u, eta0, sig2e, gamma0, sig2g,
               n_burn, n_iter, thin, adapt_window, target, update_hypers):
    J = eta.shape[0]
    n_kept = n_iter // thin
    out = np.empty((n_kept, 2 * J + 4))
    scale_e = np.full(J, _INIT_SCALE)
    scale_u = np.full(J, _INIT_SCALE)
    acc_e = np.zeros(J, dtype=np.int64)
    acc_u = np.zeros(J, dtype=np.int64)
    win_e = np.zeros(J, dtype=np.int64)
    win_u = np.zeros(J, dtype=np.int64)
    ll = np.empty(J)
    clamps = _init_loglik(theta0, eta, u, y1, n1, yh2, nh2, yl2, nl2, ll)

    kept = 0
    batch = 0
    for it in range(n_burn + n_iter):
        burnin = it < n_burn
        if burnin:
            clamps += _mh_sweep(rng, theta0, y1, n1, yh2, nh2, yl2, nl2, eta, u, ll,
                                eta0, sig2e, gamma0, sig2g, scale_e, scale_u, win_e, win_u)
        else:
            clamps += _mh_sweep(rng, theta0, y1, n1, yh2, nh2, yl2, nl2, eta, u, ll,
                                eta0, sig2e, gamma0, sig2g, scale_e, scale_u, acc_e, acc_u)
        if update_hypers:
            eta0, sig2e, gamma0, sig2g = _gibbs_hypers(
                rng, eta, u, sig2e, sig2g,
                mu_e0, s2_e0, alpha_e, beta_e, mu_g0, s2_g0, alpha_g, beta_g)
        if burnin:
            if (it + 1) % adapt_window == 0:
                batch += 1
                step = min(0.5, 1.0 / math.sqrt(batch))
                for j in range(J):
                    scale_e[j] *= math.exp(step * (win_e[j] / adapt_window - target))
                    scale_u[j] *= math.exp(step * (win_u[j] / adapt_window - target))
                    win_e[j] = 0
                    win_u[j] = 0
        else:
            k = it - n_burn
            if (k + 1) % thin == 0:
                for j in range(J):
                    out[kept, j] = eta[j]
                    out[kept, J + j] = math.exp(u[j])
                out[kept, 2 * J] = eta0
                out[kept, 2 * J + 1] = sig2e
                out[kept, 2 * J + 2] = gamma0
                out[kept, 2 * J + 3] = sig2g
                kept += 1
    return out, acc_e, acc_u, scale_e, scale_u, clamps


# ---------------------------------------------------------------------------
# diagnostics


def split_rhat(x: np.ndarray) -> float:
    """Potential scale reduction factor from the two halves of one chain."""
    x = np.asarray(x, dtype=float)
    n2 = x.size // 2
    if n2 < 2:
        return float("nan")
    halves = np.stack([x[:n2], x[x.size - n2:]])
    w = halves.var(axis=1, ddof=1).mean()
    b = n2 * halves.mean(axis=1).var(ddof=1)
    if w == 0.0:
        return 1.0 if b == 0.0 else float("inf")
    var_plus = (n2 - 1) / n2 * w + b / n2
    return float(math.sqrt(var_plus / w))


def effective_sample_size(x: np.ndarray) -> float:
    """ESS via the initial-positive-sequence autocorrelation estimator."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 4:
        return float(n)
    centered = x - x.mean()
    if not np.any(centered):
        return 0.0
    m = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(centered, m)
    acov = np.fft.irfft(f * np.conjugate(f), m)[:n] / n
    rho = acov / acov[0]
    tau = -1.0
    k = 0
    while 2 * k + 1 < n:
        pair = rho[2 * k] + rho[2 * k + 1]
        if pair <= 0.0:
            break
        tau += 2.0 * pair
        k += 1
    tau = max(tau, 1.0 / n)
    return float(min(n, n / tau))


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class PosteriorDraws:
    """Stored posterior sample: one row per kept iteration, plus acceptance
    fractions and convergence diagnostics. Arrays are read-only."""

    eta: np.ndarray  # (n_draws, J)
    gamma: np.ndarray  # (n_draws, J)
    eta0: np.ndarray
    sigma2_eta: np.ndarray
    gamma0: np.ndarray
    sigma2_gamma: np.ndarray
    acceptance_rates: dict
    diagnostics: dict
    settings: McmcSettings

    @property
    def n_draws(self) -> int:
        return self.eta.shape[0]

    @property
    def n_indications(self) -> int:
        return self.eta.shape[1]

    @property
    def converged(self) -> bool:
        return bool(self.diagnostics.get("converged", False))

    def parameters(self):
        """Yield (name, draws) for every scalar parameter. Names use 1-based
        indication indices to match the trial's numbering."""
        for j in range(self.n_indications):
            yield f"eta[{j + 1}]", self.eta[:, j]
        for j in range(self.n_indications):
            yield f"gamma[{j + 1}]", self.gamma[:, j]
        yield "eta0", self.eta0
        yield "sigma2_eta", self.sigma2_eta
        yield "gamma0", self.gamma0
        yield "sigma2_gamma", self.sigma2_gamma

    def to_csv(self, path) -> None:
        """Flat draw dump: header row, one line per kept iteration."""
        names = [name for name, _ in self.parameters()]
        cols = np.column_stack([col for _, col in self.parameters()])
        with open(path, "w") as fh:
            fh.write(",".join(names) + "\n")
            np.savetxt(fh, cols, delimiter=",", fmt="%.17g")


def _check_dimensions(data: TrialData, config: ModelConfig) -> None:
    if data.n_indications != config.n_indications:
        raise ValueError(
            f"data has {data.n_indications} indications but the design expects {config.n_indications}"
        )


def sample_posterior(
    data: TrialData,
    config: ModelConfig,
    settings: McmcSettings,
    fixed_hypers: Optional[FixedHypers] = None,
) -> PosteriorDraws:
    """Draw from the posterior of the full hierarchy given observed counts.

    Deterministic given the seed: identical inputs produce bit-identical
    draws. With `fixed_hypers` the hyper-parameter layer is pinned (no Gibbs
    updates), which reduces the model to independent per-indication
    (eta_j, gamma_j) posteriors for oracle comparison.
    """
    _check_dimensions(data, config)
    h = config.hyper
    j = config.n_indications
    y1, n1, yh2, nh2, yl2, nl2 = data.arrays()
    theta0 = config.theta0()

    if fixed_hypers is None:
        eta0 = h.mu_eta0
        sig2e = h.beta_eta / (h.alpha_eta - 1.0) if h.alpha_eta > 1.0 else h.beta_eta
        gamma0 = h.mu_gamma0
        sig2g = h.beta_gamma / (h.alpha_gamma - 1.0) if h.alpha_gamma > 1.0 else h.beta_gamma
        update_hypers = True
    else:
        eta0 = fixed_hypers.eta0
        sig2e = fixed_hypers.sigma2_eta
        gamma0 = fixed_hypers.gamma0
        sig2g = fixed_hypers.sigma2_gamma
        update_hypers = False

    rng = np.random.default_rng(settings.seed)
    out, acc_e, acc_u, scale_e, scale_u, clamps = _run_chain(
        rng, theta0, y1, n1, yh2, nh2, yl2, nl2,
        h.mu_eta0, h.sigma2_eta0, h.alpha_eta, h.beta_eta,
        h.mu_gamma0, h.sigma2_gamma0, h.alpha_gamma, h.beta_gamma,
        np.zeros(j), np.zeros(j), eta0, sig2e, gamma0, sig2g,
        settings.burn_in, settings.n_iterations, settings.thin,
        settings.adapt_window, settings.target_accept, update_hypers,
    )

    eta = out[:, :j]
    gamma = out[:, j:2 * j]
    draws = {
        "eta": eta,
        "gamma": gamma,
        "eta0": out[:, 2 * j],
        "sigma2_eta": out[:, 2 * j + 1],
        "gamma0": out[:, 2 * j + 2],
        "sigma2_gamma": out[:, 2 * j + 3],
    }
    for arr in draws.values():
        arr.flags.writeable = False

    rhat = {}
    ess = {}
    names = [f"eta[{i + 1}]" for i in range(j)] + [f"gamma[{i + 1}]" for i in range(j)] + [
        "eta0", "sigma2_eta", "gamma0", "sigma2_gamma"]
    for name, col in zip(names, out.T):
        rhat[name] = split_rhat(col)
        ess[name] = effective_sample_size(col)
    if fixed_hypers is not None:
        # pinned hypers are stored as constant columns; exclude from R-hat
        for name in ("eta0", "sigma2_eta", "gamma0", "sigma2_gamma"):
            rhat[name] = 1.0
    converged = all(r <= 1.1 for r in rhat.values() if not math.isnan(r))

    diagnostics = {
        "rhat": rhat,
        "ess": ess,
        "converged": converged,
        "prob_clamps": int(clamps),
        "proposal_scales": {"eta": scale_e.tolist(), "log_gamma": scale_u.tolist()},
    }
    acceptance = {
        "eta": acc_e / settings.n_iterations,
        "gamma": acc_u / settings.n_iterations,
    }
    return PosteriorDraws(
        eta=eta, gamma=gamma, eta0=draws["eta0"], sigma2_eta=draws["sigma2_eta"],
        gamma0=draws["gamma0"], sigma2_gamma=draws["sigma2_gamma"],
        acceptance_rates=acceptance, diagnostics=diagnostics, settings=settings,
    )


# ---------------------------------------------------------------------------
# single-step update operations (same kernels as the chain)


def gibbs_update_hypers(state: ModelState, config: ModelConfig, rng: np.random.Generator) -> ModelState:
    """Resample the four hyper-parameters from their exact full conditionals."""
    h = config.hyper
    eta = np.array(state.eta, dtype=float)
    u = np.log(np.array(state.gamma, dtype=float))
    eta0, sig2e, gamma0, sig2g = _gibbs_hypers(
        rng, eta, u, state.sigma2_eta, state.sigma2_gamma,
        h.mu_eta0, h.sigma2_eta0, h.alpha_eta, h.beta_eta,
        h.mu_gamma0, h.sigma2_gamma0, h.alpha_gamma, h.beta_gamma,
    )
    return replace(state, eta0=eta0, sigma2_eta=sig2e, gamma0=gamma0, sigma2_gamma=sig2g)


def mh_update_effects(
    state: ModelState,
    data: TrialData,
    config: ModelConfig,
    scales,
    rng: np.random.Generator,
) -> ModelState:
    """One random-walk Metropolis sweep over all eta_j and log gamma_j.

    `scales` is a pair of per-indication proposal standard deviations
    (eta_scales, log_gamma_scales). Rejected proposals keep the current value.
    """
    _check_dimensions(data, config)
    scale_e = np.asarray(scales[0], dtype=float)
    scale_u = np.asarray(scales[1], dtype=float)
    if scale_e.shape != (config.n_indications,) or scale_u.shape != (config.n_indications,):
        raise ValueError("proposal scales must be per-indication vectors")
    if np.any(scale_e <= 0) or np.any(scale_u <= 0):
        raise ValueError("proposal scales must be positive")

    y1, n1, yh2, nh2, yl2, nl2 = data.arrays()
    theta0 = config.theta0()
    eta = np.array(state.eta, dtype=float)
    u = np.log(np.array(state.gamma, dtype=float))
    ll = np.empty(config.n_indications)
    _init_loglik(theta0, eta, u, y1, n1, yh2, nh2, yl2, nl2, ll)
    acc_e = np.zeros(config.n_indications, dtype=np.int64)
    acc_u = np.zeros(config.n_indications, dtype=np.int64)
    _mh_sweep(rng, theta0, y1, n1, yh2, nh2, yl2, nl2, eta, u, ll,
              state.eta0, state.sigma2_eta, state.gamma0, state.sigma2_gamma,
              scale_e, scale_u, acc_e, acc_u)
    return replace(state, eta=tuple(eta), gamma=tuple(np.exp(u)))
