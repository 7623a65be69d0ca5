"""Monte-Carlo Jensen-Shannon divergence between diagonal Gaussians.

Samples are reparameterized as ``x = mu + sigma * z`` with standard-normal
noise ``z``, so that for fixed noise the estimate is a smooth deterministic
function of the Gaussian parameters and has an exact pathwise gradient.

Noise is addressed by ``(seed, step, pair_id)`` through a Philox counter-based
generator: the key is the seed and the counter holds pair id and step, so any
block can be regenerated independently of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import DiagGaussian

__all__ = [
    "MCConfig",
    "NoiseBlock",
    "noise_block",
    "noise_stack",
    "mc_kl_to_mixture",
    "mc_js",
    "mc_js_gradient",
    "kl_to_mixture_batch",
    "EVAL_STEP",
]

LOG2 = float(np.log(2.0))
_MASK64 = (1 << 64) - 1
# counter word reserved for evaluation noise, never reached by a training step
EVAL_STEP = _MASK64


@dataclass(frozen=True)
class MCConfig:
    """``self_term`` picks how E[log G_from] is evaluated: ``"sampled"`` uses
    the same samples as the mixture term (exactly zero for identical inputs),
    ``"analytic"`` uses the closed-form ``-sum log sigma - d/2``. Both have the
    same gradient for fixed noise.

    ``eval_sample_count`` is used only when reporting divergences of a
    finished embedding, where a single draw of ``sample_count`` samples is too
    noisy to rank close pairs.
    """

    sample_count: int = 128
    seed: int = 0
    resample_each_step: bool = True
    self_term: str = "sampled"
    eval_sample_count: int = 16384

    def __post_init__(self):
        if int(self.sample_count) < 1 or int(self.eval_sample_count) < 1:
            raise ValueError("sample counts must be >= 1")
        if self.self_term not in ("sampled", "analytic"):
            raise ValueError(f"unknown self_term {self.self_term!r}")


@dataclass(frozen=True, eq=False)
class NoiseBlock:
    z: np.ndarray  # (K, d)

    @property
    def sample_count(self) -> int:
        return self.z.shape[0]


def _generator(seed: int, step: int, pair_id: int) -> np.random.Generator:
    counter = np.array([0, 0, int(pair_id), int(step)], dtype=np.uint64)
    bitgen = np.random.Philox(key=int(seed) & _MASK64, counter=counter)
    return np.random.Generator(bitgen)


def noise_block(seed: int, step: int, pair_id: int, sample_count: int, dim: int) -> NoiseBlock:
    return NoiseBlock(_generator(seed, step, pair_id).standard_normal((sample_count, dim)))


def noise_stack(seed: int, step: int, pair_ids, sample_count: int, dim: int) -> np.ndarray:
    """Noise for several pair ids stacked as ``(len(pair_ids), K, d)``."""
    out = np.empty((len(pair_ids), sample_count, dim))
    for k, pid in enumerate(pair_ids):
        out[k] = _generator(seed, step, pid).standard_normal((sample_count, dim))
    return out


def kl_to_mixture_batch(mu_f, s_f, mu_o, s_o, z, self_term="sampled", grad=False):
    """Batched estimate of KL(G_f : (G_f + G_o) / 2).

    Parameter arrays are ``(P, d)``, ``z`` is ``(P, K, d)``. Returns the ``(P,)``
    estimates, and with ``grad=True`` also the gradients with respect to
    ``(mu_f, s_f, mu_o, s_o)``, each ``(P, d)``.
    """
    mu_f, s_f, mu_o, s_o = (np.asarray(a, dtype=float)[:, None, :] for a in (mu_f, s_f, mu_o, s_o))
    x = mu_f + s_f * z
    u_f = (x - mu_f) / s_f
    u_o = (x - mu_o) / s_o
    l_f = np.sum(-np.log(s_f) - 0.5 * u_f * u_f, axis=-1)
    l_o = np.sum(-np.log(s_o) - 0.5 * u_o * u_o, axis=-1)
    r = l_o - l_f
    if self_term == "sampled":
        val = np.mean(LOG2 - np.logaddexp(0.0, r), axis=-1)
    else:
        d = z.shape[-1]
        lse = np.logaddexp(l_f, l_o)
        val = -np.sum(np.log(s_f[:, 0, :]), axis=-1) - 0.5 * d + LOG2 - np.mean(lse, axis=-1)
    if not grad:
        return val
    # responsibility of the other component at each sample
    w = 0.5 * (1.0 + np.tanh(0.5 * r))[..., None]
    t = u_o / s_o  # (x - mu_o) / s_o^2
    g_mu_f = np.mean(w * t, axis=1)
    g_s_f = np.mean(w * (t * z - 1.0 / s_f), axis=1)
    g_mu_o = -g_mu_f
    g_s_o = np.mean(w * (1.0 - u_o * u_o) / s_o, axis=1)
    return val, (g_mu_f, g_s_f, g_mu_o, g_s_o)


def _check(g_from: DiagGaussian, g_other: DiagGaussian, noise: NoiseBlock):
    if g_from.dim != g_other.dim:
        raise ValueError(f"dimension mismatch: {g_from.dim} vs {g_other.dim}")
    if noise.z.ndim != 2 or noise.z.shape[1] != g_from.dim:
        raise ValueError(f"noise of shape {noise.z.shape} does not fit dimension {g_from.dim}")


def mc_kl_to_mixture(g_from: DiagGaussian, g_other: DiagGaussian, noise: NoiseBlock, self_term="sampled") -> float:
    """Estimate KL(g_from : (g_from + g_other) / 2) from samples of g_from."""
    _check(g_from, g_other, noise)
    val = kl_to_mixture_batch(
        g_from.mean[None], g_from.sigma[None], g_other.mean[None], g_other.sigma[None], noise.z[None], self_term
    )
    return float(val[0])


def mc_js(g1: DiagGaussian, g2: DiagGaussian, noise1: NoiseBlock, noise2: NoiseBlock, self_term="sampled") -> float:
    """Half the sum of the two estimated KL-to-midpoint terms.

    ``noise1`` drives samples from ``g1``, ``noise2`` from ``g2``; swapping both
    the Gaussians and the noise blocks gives the identical value.
    """
    a = mc_kl_to_mixture(g1, g2, noise1, self_term)
    b = mc_kl_to_mixture(g2, g1, noise2, self_term)
    return 0.5 * a + 0.5 * b


def mc_js_gradient(g1: DiagGaussian, g2: DiagGaussian, noise1: NoiseBlock, noise2: NoiseBlock):
    """Pathwise gradient of :func:`mc_js` with the noise held fixed.

    Returns ``(d_mu1, d_sigma1, d_mu2, d_sigma2)``.
    """
    _check(g1, g2, noise1)
    _check(g2, g1, noise2)
    m1, s1, m2, s2 = g1.mean[None], g1.sigma[None], g2.mean[None], g2.sigma[None]
    _, (a_mu_f, a_s_f, a_mu_o, a_s_o) = kl_to_mixture_batch(m1, s1, m2, s2, noise1.z[None], grad=True)
    _, (b_mu_f, b_s_f, b_mu_o, b_s_o) = kl_to_mixture_batch(m2, s2, m1, s1, noise2.z[None], grad=True)
    d_mu1 = 0.5 * (a_mu_f[0] + b_mu_o[0])
    d_s1 = 0.5 * (a_s_f[0] + b_s_o[0])
    d_mu2 = 0.5 * (b_mu_f[0] + a_mu_o[0])
    d_s2 = 0.5 * (b_s_f[0] + a_s_o[0])
    return d_mu1, d_s1, d_mu2, d_s2
