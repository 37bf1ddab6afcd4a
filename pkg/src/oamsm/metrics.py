"""Analytic and Monte Carlo performance metrics.

Mutual-information (discrete-input, continuous-output) capacity of the
spatially modulated link, conventional-array baselines on the same
geometry, the analytic antenna-detection probability and its bit-level
conversion, the modulation bit error probability, the composed average bit
error probability, and transmitter energy efficiency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelTensor, build_channel_tensor
from .config import SystemConfig
from .errors import ConfigError
from .numerics import Constellation, integrate, marcum_q1, ncx2_pdf, q_function

__all__ = [
    "PowerModel",
    "CapacityEstimate",
    "dcmc_capacity",
    "mimo_channel_matrix",
    "mimo_capacity_baseline",
    "antenna_detection_prob",
    "antenna_detection_prob_avg",
    "gray_gamma",
    "AntennaErrorSummary",
    "antenna_abep",
    "mod_bep",
    "abep",
    "energy_efficiency",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class PowerModel:
    """Transmitter power draw: per-antenna circuit power plus a load slope."""

    circuit_power_w: float
    slope: float
    n_active: int = 1

    def __post_init__(self):
        if self.circuit_power_w < 0.0:
            raise ConfigError(f"circuit power must be >= 0, got {self.circuit_power_w!r}")
        if self.slope < 0.0:
            raise ConfigError(f"power slope must be >= 0, got {self.slope!r}")
        if not isinstance(self.n_active, int) or self.n_active < 1:
            raise ConfigError(f"n_active must be a positive integer, got {self.n_active!r}")


@dataclass(frozen=True)
class CapacityEstimate:
    """Capacity in bits per channel use with its Monte Carlo standard error."""

    value: float
    std_error: float
    samples: int


def _signal_table(tensor: ChannelTensor, rho: float) -> np.ndarray:
    """Noise-free received value at each pair's first antenna for every
    (m, l, p) hypothesis; shape (M, n_inputs)."""
    cfg = tensor.config
    points = np.asarray(cfg.constellation().points)
    # entries[m, l, j, 0] -> axes (j, m, l, p) flattened over inputs.
    h = tensor.entries[:, :, :, 0]  # (m, l, j)
    s = math.sqrt(rho) * h[:, :, :, None] * points[None, None, None, :]
    # (m, l, j, p) -> (j, m*l*p) with input index ordered as (m, l, p).
    s = np.transpose(s, (2, 0, 1, 3))
    return s.reshape(s.shape[0], -1)


_CAP_CHUNK = 2048


def _capacity_from_signals(
    signals: np.ndarray, noise_var: float, samples: int, seed: int, stream: int
) -> CapacityEstimate:
    """Mutual information of a uniform discrete input observed per receive
    branch, averaged over branches, by Monte Carlo over the noise.

    ``signals[b, i]`` is the clean observation of input i at branch b.  The
    same noise draws serve every (branch, input) term, a common-random-
    numbers scheme that removes inter-term jitter from the estimate.
    """
    n_branches, n_inputs = signals.shape
    log2_inputs = math.log2(n_inputs)
    per_draw = np.empty(samples)
    done = 0
    chunk_index = 0
    while done < samples:
        n = min(_CAP_CHUNK, samples - done)
        ss = np.random.SeedSequence(entropy=(int(seed) & (2**64 - 1), stream, chunk_index))
        rng = np.random.Generator(np.random.Philox(ss))
        w = math.sqrt(noise_var / 2.0) * (
            rng.standard_normal(n) + 1j * rng.standard_normal(n)
        )
        acc = np.zeros(n)
        for b in range(n_branches):
            s = signals[b]
            diff = s[:, None] - s[None, :]  # (i, j)
            # ln F = -(|d|^2 + 2 Re(d conj(w))) / noise_var, log-sum-exp over j.
            for i in range(n_inputs):
                d = diff[i]
                ln_f = -(np.abs(d)[:, None] ** 2 + 2.0 * (d[:, None] * w[None, :].conj()).real) / noise_var
                m = np.max(ln_f, axis=0)
                acc += m + np.log(np.sum(np.exp(ln_f - m[None, :]), axis=0))
        per_draw[done : done + n] = log2_inputs - acc / (n_branches * n_inputs * _LN2)
        done += n
        chunk_index += 1
    value = float(np.mean(per_draw))
    stderr = float(np.std(per_draw, ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return CapacityEstimate(value=max(0.0, value), std_error=stderr, samples=samples)


def dcmc_capacity(
    tensor: ChannelTensor, rho: float, noise_var: float, samples: int, seed: int
) -> CapacityEstimate:
    """Capacity of the spatially modulated link in bits per channel use.

    The receiver statistic is the first antenna of each pair; the reported
    value averages the per-pair mutual information over all pairs, keeping
    it between 0 and log2(M * L * P).  ``rho = 0`` returns exactly zero
    (every likelihood ratio is 1).
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples!r}")
    if rho < 0.0:
        raise ValueError(f"rho must be >= 0, got {rho!r}")
    if rho == 0.0:
        return CapacityEstimate(value=0.0, std_error=0.0, samples=samples)
    signals = _signal_table(tensor, rho)
    return _capacity_from_signals(signals, noise_var, samples, seed, stream=0xCA9)


def mimo_channel_matrix(config: SystemConfig) -> np.ndarray:
    """Line-of-sight response matrix of the conventional-array baseline.

    M receive antennas sit at the first-antenna positions of the receive
    pairs; entry (j, m) is wavelength/(4 pi d_mj) * exp(-i k d_mj) with no
    ring gain, i.e. plain free-space attenuation on the same geometry.
    """
    cfg = config
    lam = cfg.wavelength_m
    k = 2.0 * math.pi / lam
    xi = cfg.element_spacing_m
    ring = cfg.ring_radius_m
    z = cfg.distance_m
    M = cfg.tx_antennas
    idx = np.arange(M)
    dx = (idx[:, None] - idx[None, :]) * xi
    d = np.sqrt(z**2 + dx**2 + ring**2)
    return lam / (4.0 * math.pi * d) * np.exp(-1j * k * d)


def mimo_capacity_baseline(
    config: SystemConfig,
    rho_total: float,
    noise_var: float,
    mode: str = "logdet",
    samples: int = 20000,
    seed: int = 0,
) -> CapacityEstimate:
    """Capacity of the M x M conventional array at total-power parity.

    ``logdet`` evaluates log2 det(I + rho_total/(M sigma^2) H H*) for the
    deterministic line-of-sight channel (exact, no sampling).  ``dcmc_psk``
    estimates the mutual information with independent uniform PSK inputs on
    each antenna by Monte Carlo, upper-bounded by M log2 P.
    """
    if rho_total < 0.0:
        raise ValueError(f"rho_total must be >= 0, got {rho_total!r}")
    H = mimo_channel_matrix(config)
    M = config.tx_antennas
    if mode == "logdet":
        if rho_total == 0.0:
            return CapacityEstimate(0.0, 0.0, 0)
        gram = np.eye(M) + (rho_total / (M * noise_var)) * (H @ H.conj().T)
        sign, logdet = np.linalg.slogdet(gram)
        return CapacityEstimate(float(logdet / _LN2), 0.0, 0)
    if mode != "dcmc_psk":
        raise ConfigError(f"mimo capacity mode must be logdet|dcmc_psk, got {mode!r}")
    if rho_total == 0.0:
        return CapacityEstimate(0.0, 0.0, samples)
    const = config.constellation()
    points = np.asarray(const.points)
    P = points.size
    n_inputs = P**M
    if n_inputs > 4096:
        raise ConfigError(f"dcmc_psk baseline limited to P^M <= 4096 inputs, got {n_inputs}")
    grids = np.meshgrid(*([points] * M), indexing="ij")
    x = np.stack([g.ravel() for g in grids], axis=1)  # (n_inputs, M)
    s = math.sqrt(rho_total / M) * x @ H.T  # (n_inputs, M) received vectors
    log2_inputs = M * const.bits_per_symbol
    per_draw = np.empty(samples)
    done = 0
    chunk_index = 0
    while done < samples:
        n = min(512, samples - done)
        ss = np.random.SeedSequence(entropy=(int(seed) & (2**64 - 1), 0x313, chunk_index))
        rng = np.random.Generator(np.random.Philox(ss))
        w = math.sqrt(noise_var / 2.0) * (
            rng.standard_normal((n, M)) + 1j * rng.standard_normal((n, M))
        )
        acc = np.zeros(n)
        for i in range(n_inputs):
            d = s[i][None, :] - s  # (j, M)
            ln_f = -(
                np.sum(np.abs(d) ** 2, axis=1)[:, None]
                + 2.0 * np.einsum("jm,nm->jn", d, w.conj()).real
            ) / noise_var
            m = np.max(ln_f, axis=0)
            acc += m + np.log(np.sum(np.exp(ln_f - m[None, :]), axis=0))
        per_draw[done : done + n] = log2_inputs - acc / (n_inputs * _LN2)
        done += n
        chunk_index += 1
    value = float(np.mean(per_draw))
    stderr = float(np.std(per_draw, ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return CapacityEstimate(value=max(0.0, value), std_error=stderr, samples=samples)


def _noncentralities(
    tensor: ChannelTensor, m: int, l: int, x: complex, rho: float, noise_var: float, mode: str
) -> np.ndarray:
    """Detection-statistic noncentralities at every pair's first antenna.

    The statistic |y|^2 / sigma0^2 with sigma0^2 = noise_var / 2 follows the
    two-degree noncentral chi-square law.  Mode ``consistent`` uses
    rho |h x|^2 / sigma0^2, the value implied by the transmit model; mode
    ``printed`` uses |rho h x|^2 / sigma0^2, a circulated variant kept for
    faithful reproduction.
    """
    sigma0_sq = noise_var / 2.0
    h_row = tensor.entries[m - 1, tensor.state_index(l), :, 0]
    amp_sq = np.abs(h_row * x) ** 2
    if mode == "consistent":
        return rho * amp_sq / sigma0_sq
    if mode == "printed":
        return rho**2 * amp_sq / sigma0_sq
    raise ConfigError(f"noncentrality mode must be consistent|printed, got {mode!r}")


def antenna_detection_prob(
    tensor: ChannelTensor,
    m: int,
    l: int,
    x: complex,
    rho: float,
    noise_var: float,
    mode: str = "consistent",
    tol: float = 1e-9,
) -> float:
    """Probability that the strongest-pair rule picks the true antenna.

    Integrates the density of the true pair's power statistic against the
    product of the other pairs' CDFs.  The upper limit is truncated where
    the true statistic's survival drops below ~1e-17, far under ``tol``.
    """
    lam = _noncentralities(tensor, m, l, x, rho, noise_var, mode)
    M = lam.size
    if M == 1:
        return 1.0
    lam_m = float(lam[m - 1])
    others = np.delete(lam, m - 1)
    sqrt_others = np.sqrt(others)
    g_hi = (math.sqrt(max(lam_m, np.max(others))) + 9.0) ** 2 + 45.0

    def integrand(g):
        g = np.asarray(g, dtype=float)
        vals = ncx2_pdf(g, lam_m)
        root = np.sqrt(g)
        for a in sqrt_others:
            vals = vals * (1.0 - marcum_q1(float(a), root))
        return vals

    value = integrate(integrand, 0.0, g_hi, tol=tol)
    return float(min(max(value, 0.0), 1.0))


def antenna_detection_prob_avg(
    tensor: ChannelTensor, rho: float, noise_var: float, mode: str = "consistent", tol: float = 1e-9
) -> float:
    """Detection probability marginalized uniformly over (m, l, p).

    All constellation points are unit modulus, so the average over p is
    implicit; (m, l) are enumerated.
    """
    cfg = tensor.config
    points = np.asarray(cfg.constellation().points)
    if not np.allclose(np.abs(points), 1.0, atol=1e-12):
        raise ConfigError("antenna detection average assumes unit-modulus constellations")
    total = 0.0
    count = 0
    for m in range(1, cfg.tx_antennas + 1):
        for l in tensor.states:
            total += antenna_detection_prob(tensor, m, l, 1.0 + 0.0j, rho, noise_var, mode, tol)
            count += 1
    return total / count


def gray_gamma(n: int) -> float:
    """Average bit multiplicity of uniformly mislabeled n-bit words.

    gamma_0 = 0 and gamma_n = gamma_{n-1} + (2^{n-1} - gamma_{n-1}) / (2^n - 1).
    """
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    gamma = 0.0
    for i in range(1, n + 1):
        gamma = gamma + (2.0 ** (i - 1) - gamma) / (2.0**i - 1.0)
    return gamma


@dataclass(frozen=True)
class AntennaErrorSummary:
    """Antenna-index stage errors: symbol level, bit level, bit success."""

    symbol_error: float
    bit_error: float
    bit_success: float


def antenna_abep(
    tensor: ChannelTensor, rho: float, noise_var: float, mode: str = "consistent"
) -> AntennaErrorSummary:
    """Bit error probability of the antenna-index bits.

    The stage symbol error is 1 minus the averaged detection probability;
    the bit conversion weights it by gamma_{log2 M} / log2 M.  A single
    antenna carries no index bits, so M = 1 is pinned to zero error.
    """
    M = tensor.config.tx_antennas
    if M == 1:
        return AntennaErrorSummary(symbol_error=0.0, bit_error=0.0, bit_success=1.0)
    p_correct = antenna_detection_prob_avg(tensor, rho, noise_var, mode)
    e_symbol = 1.0 - p_correct
    nbits = M.bit_length() - 1
    e_bit = e_symbol * gray_gamma(nbits) / nbits
    return AntennaErrorSummary(symbol_error=e_symbol, bit_error=e_bit, bit_success=1.0 - e_bit)


def mod_bep(
    h: complex,
    rho: float,
    noise_var: float,
    constellation: Constellation,
    distance_mode: str = "euclidean",
) -> float:
    """Bit error probability of the constellation bits on a scalar channel.

    Pairwise union form: (1 / (P log2 P)) * sum over ordered pairs of the
    label Hamming distance times Q(sqrt(rho |h|^2 dist^2 / (2 sigma^2))).
    ``euclidean`` uses |x_p - x_q| for dist (matches a maximum-likelihood
    scalar detector); ``printed`` uses 2 Re[x_p (x_p - x_q)*], a circulated
    variant kept selectable for faithful reproduction.
    """
    if distance_mode not in ("printed", "euclidean"):
        raise ConfigError(f"distance_mode must be printed|euclidean, got {distance_mode!r}")
    if abs(h) <= 0.0:
        raise ValueError("mod_bep requires |h| > 0")
    P = constellation.order
    if P == 1:
        return 0.0
    nbits = constellation.bits_per_symbol
    points = constellation.points
    labels = constellation.bit_labels
    scale = rho * abs(h) ** 2 / (2.0 * noise_var)
    total = 0.0
    for p in range(P):
        for q in range(P):
            if p == q:
                continue
            hamming = sum(c1 != c2 for c1, c2 in zip(labels[p], labels[q]))
            if distance_mode == "euclidean":
                dist_sq = abs(points[p] - points[q]) ** 2
            else:
                dist_sq = (2.0 * (points[p] * np.conj(points[p] - points[q])).real) ** 2
            total += hamming * q_function(math.sqrt(scale * dist_sq))
    return total / (P * nbits)


def abep(
    config: SystemConfig,
    rho: float,
    tensor: ChannelTensor | None = None,
    tol: float = 1e-9,
) -> float:
    """Average bit error probability of the full demodulation chain.

    Composes the antenna-index stage with the constellation stage as
    1 - (1 - e_ant)(1 - e_mod); the state stage is error-free under the
    pair-angle constraint once the antenna index is right.  Channel-
    dependent terms are averaged uniformly over (m, l, p).
    """
    cfg = config.resolved()
    if tensor is None:
        tensor = build_channel_tensor(cfg)
    noise_var = cfg.noise_power_w
    ant = antenna_abep(tensor, rho, noise_var, cfg.noncentrality_mode)
    const = cfg.constellation()
    if const.order == 1:
        e_mod = 0.0
    else:
        total = 0.0
        count = 0
        for m in range(1, cfg.tx_antennas + 1):
            for l in tensor.states:
                h = tensor.response(m, l, m, 1)
                total += mod_bep(h, rho, noise_var, const, cfg.distance_mode)
                count += 1
        e_mod = total / count
    return 1.0 - (1.0 - ant.bit_error) * (1.0 - e_mod)


def energy_efficiency(
    capacity_bits: float,
    bandwidth_hz: float,
    rho: float,
    model: PowerModel,
    system: str,
) -> float:
    """Delivered bits per joule of transmitter power.

    ``oam_sm`` keeps a single antenna active: denominator
    circuit_power + slope * rho.  ``mimo`` activates ``model.n_active``
    chains sharing the same total transmit power: denominator
    n_active * circuit_power + slope * rho.
    """
    if system not in ("oam_sm", "mimo"):
        raise ConfigError(f"system must be oam_sm|mimo, got {system!r}")
    if rho < 0.0:
        raise ValueError(f"rho must be >= 0, got {rho!r}")
    if system == "oam_sm":
        denom = model.circuit_power_w + model.slope * rho
    else:
        denom = model.n_active * model.circuit_power_w + model.slope * rho
    if denom <= 0.0:
        raise ConfigError(f"power denominator must be > 0, got {denom!r}")
    return bandwidth_hz * capacity_bits / denom
