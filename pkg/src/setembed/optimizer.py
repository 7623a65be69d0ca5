"""Stress-matching embedding of a set family into diagonal Gaussians.

For every ordered pair of distinct sets the objective compares the divergence
between their uniform distributions with ``a`` times the divergence between
their Gaussians::

    stress = sum_{i != j} (D_in[i, j] - a * D_out(G_i, G_j)) ** 2

In ``reparam`` mode each standard deviation is ``exp(tau[j] + log V_i)`` with a
single ``tau`` shared by all sets, so entropy is an increasing function of set
volume by construction. Parameters are updated with Adam at a constant
learning rate.
"""

from __future__ import annotations

import copy
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .gaussian import DiagGaussian
from .histograms import DEFAULT_EPSILON, damped_kl, discrete_js, uniform_histogram
from .mc import EVAL_STEP, MCConfig, kl_to_mixture_batch, noise_stack
from .sets import SetFamily, augment, compute_atoms

__all__ = [
    "EmbeddingConfig",
    "EmbeddingState",
    "Problem",
    "StressReport",
    "NonFiniteGradientError",
    "prepare",
    "input_divergence_matrix",
    "init_state",
    "realized_gaussian",
    "realized_sigma",
    "stress",
    "stress_and_grad",
    "output_divergence_matrix",
    "step",
    "fit",
]

INPUT_DIVERGENCES = ("damped_kl", "js")
OUTPUT_DIVERGENCES = ("kl", "mc_js")
_COUPLED = {"kl": "damped_kl", "mc_js": "js"}


class NonFiniteGradientError(FloatingPointError):
    def __init__(self, pair, names=None):
        self.pair = pair
        label = pair if names is None else (names[pair[0]], names[pair[1]])
        super().__init__(f"non-finite gradient from pair {label}")


@dataclass(frozen=True)
class EmbeddingConfig:
    """Hyperparameters of one embedding run.

    ``input_divergence=None`` couples it to the output divergence
    (``kl`` with ``damped_kl``, ``mc_js`` with ``js``). ``fixed_scale=None``
    learns ``a``; a number pins it. ``pair_samples=None`` sums over all
    ordered pairs, an integer draws that many ordered pairs per step.
    """

    dim: int = 2
    output_divergence: str = "mc_js"
    input_divergence: str | None = None
    epsilon: float = DEFAULT_EPSILON
    learning_rate: float = 0.03
    iterations: int = 2000
    sigma_mode: str = "reparam"
    fixed_scale: float | None = None
    pair_samples: int | None = None
    augment: object = "none"
    mc: MCConfig = field(default_factory=MCConfig)
    seed: int = 0

    def __post_init__(self):
        if self.output_divergence not in OUTPUT_DIVERGENCES:
            raise ValueError(f"output_divergence must be one of {OUTPUT_DIVERGENCES}")
        if self.input_divergence is not None and self.input_divergence not in INPUT_DIVERGENCES:
            raise ValueError(f"input_divergence must be one of {INPUT_DIVERGENCES}")
        if self.sigma_mode not in ("reparam", "init_only"):
            raise ValueError("sigma_mode must be 'reparam' or 'init_only'")
        for name in ("dim", "iterations"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")
        for name in ("epsilon", "learning_rate"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.fixed_scale is not None and not self.fixed_scale > 0:
            raise ValueError("fixed_scale must be positive")
        if self.pair_samples is not None and int(self.pair_samples) < 1:
            raise ValueError("pair_samples must be a positive integer")

    @property
    def resolved_input_divergence(self) -> str:
        return self.input_divergence or _COUPLED[self.output_divergence]

    @classmethod
    def for_divergence(cls, name: str, **kw) -> "EmbeddingConfig":
        """``"kl"`` or ``"js"`` with the matching input divergence."""
        out = {"kl": "kl", "js": "mc_js"}[name]
        return cls(output_divergence=out, **kw)


@dataclass
class EmbeddingState:
    means: np.ndarray  # (n, d)
    tau: np.ndarray  # (d,)
    log_sigma_free: np.ndarray  # (n, d), init_only mode
    log_a: float
    log_volume: np.ndarray  # (n,)
    adam_moments: dict = field(default_factory=dict)
    step: int = 0

    def copy(self) -> "EmbeddingState":
        return copy.deepcopy(self)


@dataclass(frozen=True, eq=False)
class Problem:
    """Everything fixed during optimization: the family and its input divergences."""

    family: SetFamily
    d_in: np.ndarray  # (n, n), zero diagonal
    pairs: np.ndarray  # (P, 2) ordered pairs i != j


@dataclass
class StressReport:
    """``stress`` is the per-iteration training objective (current noise and
    pair sample); ``initial_stress`` and ``final_stress`` are full-pair
    evaluations before and after optimization."""

    stress: list[float]
    initial_stress: float
    final_stress: float
    d_in: np.ndarray
    d_out: np.ndarray
    scale: float
    wall_clock: float
    names: list[str]
    state: EmbeddingState | None = None


def input_divergence_matrix(family: SetFamily, kind: str = "js", epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    partition = compute_atoms(family)
    hist = [uniform_histogram(s, partition, family.universe) for s in family.sets]
    n = len(hist)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if kind == "damped_kl":
                d[i, j] = damped_kl(hist[i], hist[j], epsilon)
            elif kind == "js":
                d[i, j] = discrete_js(hist[i], hist[j])
            else:
                raise ValueError(f"unknown input divergence {kind!r}")
    return d


def prepare(family: SetFamily, config: EmbeddingConfig) -> Problem:
    family = augment(family, config.augment)
    d_in = input_divergence_matrix(family, config.resolved_input_divergence, config.epsilon)
    n = len(family)
    pairs = np.array([(i, j) for i in range(n) for j in range(n) if i != j], dtype=int).reshape(-1, 2)
    return Problem(family, d_in, pairs)


def init_state(family: SetFamily, partition, config: EmbeddingConfig) -> EmbeddingState:
    """Small random means; every sigma starts at the set's volume."""
    del partition  # volumes come from the family's own measure
    vol = family.volumes()
    if np.any(vol <= 0):
        empty = [s.name for s, v in zip(family.sets, vol) if v <= 0]
        raise ValueError(f"cannot embed empty sets: {empty}")
    rng = np.random.default_rng(config.seed)
    n, d = len(family), config.dim
    log_v = np.log(vol)
    return EmbeddingState(
        means=0.1 * rng.standard_normal((n, d)),
        tau=np.zeros(d),
        log_sigma_free=np.repeat(log_v[:, None], d, axis=1),
        log_a=0.0 if config.fixed_scale is None else float(np.log(config.fixed_scale)),
        log_volume=log_v,
    )


def _log_sigma(state: EmbeddingState, config: EmbeddingConfig) -> np.ndarray:
    if config.sigma_mode == "reparam":
        return state.tau[None, :] + state.log_volume[:, None]
    return state.log_sigma_free


def realized_sigma(state: EmbeddingState, config: EmbeddingConfig) -> np.ndarray:
    return np.exp(_log_sigma(state, config))


def realized_gaussian(state: EmbeddingState, set_index: int, config: EmbeddingConfig) -> DiagGaussian:
    return DiagGaussian(state.means[set_index].copy(), realized_sigma(state, config)[set_index])


def _noise_step(state: EmbeddingState, config: EmbeddingConfig) -> int:
    return state.step if config.mc.resample_each_step else 0


def _sampled_pairs(problem: Problem, config: EmbeddingConfig, step_index: int) -> np.ndarray:
    pairs = problem.pairs
    if config.pair_samples is None or config.pair_samples >= len(pairs):
        return pairs
    rng = np.random.default_rng([config.seed, step_index, 0x5041495253])
    pick = np.sort(rng.choice(len(pairs), size=config.pair_samples, replace=False))
    return pairs[pick]


def _kl_out(mu, log_s, pairs, grad):
    i, j = pairs[:, 0], pairs[:, 1]
    dm = mu[i] - mu[j]
    ratio = np.exp(2.0 * (log_s[i] - log_s[j]))  # sigma_i^2 / sigma_j^2
    q = dm * dm * np.exp(-2.0 * log_s[j])
    d_out = np.sum(log_s[j] - log_s[i] + 0.5 * (ratio + q), axis=1) - 0.5 * mu.shape[1]
    if not grad:
        return d_out, None
    g_mu_i = dm * np.exp(-2.0 * log_s[j])
    g_ls_i = ratio - 1.0
    g_ls_j = 1.0 - ratio - q
    return d_out, (g_mu_i, g_ls_i, -g_mu_i, g_ls_j)


def _js_out(mu, log_s, pairs, n, config, step_index, grad, sample_count):
    """MC JS for each pair; half-terms i->j use noise id i*n+j."""
    i, j = pairs[:, 0], pairs[:, 1]
    # half-terms needed: forward (i->j) and backward (j->i) for every pair
    halves = np.concatenate([pairs, pairs[:, ::-1]])
    hid = halves[:, 0] * n + halves[:, 1]
    uniq, inv = np.unique(hid, return_inverse=True)
    hf, ho = uniq // n, uniq % n
    z = noise_stack(config.mc.seed, step_index, uniq.tolist(), sample_count, mu.shape[1])
    sig = np.exp(log_s)
    res = kl_to_mixture_batch(mu[hf], sig[hf], mu[ho], sig[ho], z, config.mc.self_term, grad=grad)
    vals = res[0] if grad else res
    P = len(pairs)
    fwd, bwd = inv[:P], inv[P:]
    d_out = 0.5 * vals[fwd] + 0.5 * vals[bwd]
    if not grad:
        return d_out, None
    return d_out, (res[1], hf, ho, fwd, bwd, sig, i, j)


def stress_and_grad(
    state: EmbeddingState, problem: Problem, config: EmbeddingConfig, grad: bool = True, evaluation: bool = False
):
    """Stress at the current step's noise and pair sample, with gradients.

    Gradients are returned as a dict keyed like the trainable parameters
    (``means``, ``tau`` or ``log_sigma_free``, ``log_a``). With
    ``evaluation=True`` all pairs are used and MC terms take
    ``eval_sample_count`` samples from the reserved evaluation stream.
    """
    n = len(problem.family)
    if evaluation:
        step_index, sample_count, pairs = EVAL_STEP, config.mc.eval_sample_count, problem.pairs
    else:
        step_index, sample_count = _noise_step(state, config), config.mc.sample_count
        pairs = _sampled_pairs(problem, config, state.step)
    mu = state.means
    log_s = _log_sigma(state, config)
    a = float(np.exp(state.log_a))
    if len(pairs) == 0:
        return 0.0, _zero_grads(state, config) if grad else None

    if config.output_divergence == "kl":
        d_out, extra = _kl_out(mu, log_s, pairs, grad)
    else:
        d_out, extra = _js_out(mu, log_s, pairs, n, config, step_index, grad, sample_count)
    d_in = problem.d_in[pairs[:, 0], pairs[:, 1]]
    resid = d_in - a * d_out
    value = float(np.sum(resid * resid))
    if not grad:
        return value, None

    g_dout = -2.0 * a * resid  # (P,)
    g_mu = np.zeros_like(mu)
    g_ls = np.zeros_like(log_s)
    if config.output_divergence == "kl":
        g_mu_i, g_ls_i, g_mu_j, g_ls_j = extra
        contrib = [g_dout[:, None] * g for g in (g_mu_i, g_ls_i, g_mu_j, g_ls_j)]
        _check_finite(contrib, pairs, problem)
        np.add.at(g_mu, pairs[:, 0], contrib[0])
        np.add.at(g_ls, pairs[:, 0], contrib[1])
        np.add.at(g_mu, pairs[:, 1], contrib[2])
        np.add.at(g_ls, pairs[:, 1], contrib[3])
    else:
        (g_mu_f, g_s_f, g_mu_o, g_s_o), hf, ho, fwd, bwd, sig, _, _ = extra
        g_half = np.zeros(len(hf))
        np.add.at(g_half, fwd, 0.5 * g_dout)
        np.add.at(g_half, bwd, 0.5 * g_dout)
        contrib = [
            g_half[:, None] * g_mu_f,
            g_half[:, None] * g_s_f * sig[hf],
            g_half[:, None] * g_mu_o,
            g_half[:, None] * g_s_o * sig[ho],
        ]
        _check_finite(contrib, np.stack([hf, ho], axis=1), problem)
        np.add.at(g_mu, hf, contrib[0])
        np.add.at(g_ls, hf, contrib[1])
        np.add.at(g_mu, ho, contrib[2])
        np.add.at(g_ls, ho, contrib[3])

    grads = {"means": g_mu}
    if config.sigma_mode == "reparam":
        grads["tau"] = g_ls.sum(axis=0)
    else:
        grads["log_sigma_free"] = g_ls
    if config.fixed_scale is None:
        grads["log_a"] = np.array(float(np.sum(g_dout * d_out)))
    return value, grads


def _zero_grads(state, config):
    grads = {"means": np.zeros_like(state.means)}
    if config.sigma_mode == "reparam":
        grads["tau"] = np.zeros_like(state.tau)
    else:
        grads["log_sigma_free"] = np.zeros_like(state.log_sigma_free)
    if config.fixed_scale is None:
        grads["log_a"] = np.array(0.0)
    return grads


def _check_finite(contrib, pairs, problem):
    bad = np.zeros(len(pairs), dtype=bool)
    for c in contrib:
        bad |= ~np.all(np.isfinite(c), axis=1)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise NonFiniteGradientError((int(pairs[k, 0]), int(pairs[k, 1])), problem.family.names)


def stress(state: EmbeddingState, problem: Problem, config: EmbeddingConfig, evaluation: bool = False) -> float:
    return stress_and_grad(state, problem, config, grad=False, evaluation=evaluation)[0]


def output_divergence_matrix(state: EmbeddingState, problem: Problem, config: EmbeddingConfig) -> np.ndarray:
    """All ordered-pair output divergences, MC terms at evaluation precision."""
    n = len(problem.family)
    out = np.zeros((n, n))
    if not len(problem.pairs):
        return out
    log_s = _log_sigma(state, config)
    if config.output_divergence == "kl":
        d, _ = _kl_out(state.means, log_s, problem.pairs, False)
    else:
        d, _ = _js_out(
            state.means, log_s, problem.pairs, n, config, EVAL_STEP, False, config.mc.eval_sample_count
        )
    out[problem.pairs[:, 0], problem.pairs[:, 1]] = d
    return out


BETA1, BETA2, ADAM_EPS = 0.9, 0.999, 1e-8


def _get_param(state, name):
    return np.asarray(state.log_a) if name == "log_a" else getattr(state, name)


def _set_param(state, name, value):
    if name == "log_a":
        state.log_a = float(value)
    else:
        setattr(state, name, value)


def step(state: EmbeddingState, problem: Problem, config: EmbeddingConfig):
    """One Adam update; returns ``(new_state, stress_before_update)``."""
    value, grads = stress_and_grad(state, problem, config)
    new = state.copy()
    t = new.step + 1
    bc1 = 1.0 - BETA1**t
    bc2 = 1.0 - BETA2**t
    for name, g in grads.items():
        m, v = new.adam_moments.get(name, (np.zeros_like(g), np.zeros_like(g)))
        m = BETA1 * m + (1.0 - BETA1) * g
        v = BETA2 * v + (1.0 - BETA2) * (g * g)
        new.adam_moments[name] = (m, v)
        update = config.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + ADAM_EPS)
        _set_param(new, name, _get_param(new, name) - update)
    new.step = t
    return new, value


def fit(family: SetFamily, config: EmbeddingConfig = EmbeddingConfig(), problem: Problem | None = None):
    """Augment, build input divergences, initialize and run the Adam loop.

    Returns the realized Gaussians (one per set of the possibly augmented
    family, in family order) and a :class:`StressReport`.
    """
    t0 = time.perf_counter()
    problem = problem or prepare(family, config)
    fam = problem.family
    state = init_state(fam, None, config)
    initial = stress(state, problem, config, evaluation=True)
    trace = []
    if len(problem.pairs):
        for _ in range(config.iterations):
            state, value = step(state, problem, config)
            trace.append(value)
    final = stress(state, problem, config, evaluation=True)
    report = StressReport(
        stress=trace,
        initial_stress=initial,
        final_stress=final,
        d_in=problem.d_in,
        d_out=output_divergence_matrix(state, problem, config),
        scale=float(np.exp(state.log_a)),
        wall_clock=time.perf_counter() - t0,
        names=fam.names,
        state=state,
    )
    embeddings = [realized_gaussian(state, i, config) for i in range(len(fam))]
    return embeddings, report


def with_seed(config: EmbeddingConfig, seed: int) -> EmbeddingConfig:
    """Same config with ``seed`` driving both initialization and MC noise."""
    return replace(config, seed=seed, mc=replace(config.mc, seed=seed))
