"""Physical-layer SNR model with embedded jamming noise.

The quality of a channel is judged by

    SNR = G / (G_ase + G_nli + G_jam)

where G is the channel's launch power spectral density and the denominator
accumulates amplifier noise (ASE), Kerr nonlinear interference from
co-propagating channels (Gaussian-noise approximation), and the extra
nonlinear interference caused by a high-power jamming signal.

Everything is evaluated in SI units (W, Hz, m, s).  The constructor of
:class:`PhyParams` converts the conventional engineering units (dB/km,
ps^2/km, 1/(W km)) once and caches the two derived coefficients

    phi = 3 * gamma^2 / (2 * pi * alpha * |beta2|)
    rho = pi^2 * |beta2| / (2 * alpha)

used by the nonlinear terms.  Only frequency differences matter for the
interference integrals, so the grid origin is an arbitrary constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .spectrum import SlotBlock

__all__ = [
    "PhyModelError",
    "PhyParams",
    "Channel",
    "Modulation",
    "MODULATIONS",
    "db_to_linear",
    "linear_to_db",
    "slot_center_frequency",
    "channel_for_block",
    "g0_ase",
    "ase_psd",
    "nli_secure_psd",
    "jamming_psd",
    "inband_jamming_psd",
    "snr",
    "qot_verdict",
]


class PhyModelError(ValueError):
    """Raised when inputs violate the model's validity domain.

    Overlapping co-channel spectra make the interference logarithm
    undefined; hitting this from the simulator signals an RSA
    bookkeeping bug, not a physical outcome.
    """


def db_to_linear(x_db: float) -> float:
    """Convert a decibel ratio to a linear ratio."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    """Convert a positive linear ratio to decibels."""
    if x <= 0.0:
        raise ValueError(f"cannot express non-positive ratio {x!r} in dB")
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class PhyParams:
    """Fibre, amplifier and transmitter constants plus derived coefficients.

    ``tx_power_dbm`` is the launch power of one channel (the whole slot
    block), so wider channels spread the same power more thinly.  The
    remaining fields keep their customary units and are converted to SI
    internally.
    """

    tx_power_dbm: float = 0.0
    slot_width_hz: float = 12.5e9
    attenuation_db_per_km: float = 0.2
    span_length_km: float = 100.0
    gamma_nl_per_w_km: float = 1.22
    beta2_abs_ps2_per_km: float = 16.0
    light_frequency_hz: float = 1.93e14
    noise_figure_db: float = 6.0
    planck_js: float = 6.62607015e-34
    base_frequency_hz: float = 0.0

    def __post_init__(self) -> None:
        positive = {
            "slot_width_hz": self.slot_width_hz,
            "attenuation_db_per_km": self.attenuation_db_per_km,
            "span_length_km": self.span_length_km,
            "gamma_nl_per_w_km": self.gamma_nl_per_w_km,
            "beta2_abs_ps2_per_km": self.beta2_abs_ps2_per_km,
            "light_frequency_hz": self.light_frequency_hz,
            "noise_figure_db": self.noise_figure_db,
            "planck_js": self.planck_js,
        }
        for name, value in positive.items():
            if value <= 0.0:
                raise ValueError(f"PhyParams.{name} must be positive, got {value!r}")

    @property
    def tx_power_w(self) -> float:
        return 1e-3 * db_to_linear(self.tx_power_dbm)

    @property
    def alpha_per_m(self) -> float:
        """Power attenuation in nepers per metre."""
        return self.attenuation_db_per_km * math.log(10.0) / 10.0 / 1e3

    @property
    def beta2_s2_per_m(self) -> float:
        return self.beta2_abs_ps2_per_km * 1e-24 / 1e3

    @property
    def gamma_per_w_m(self) -> float:
        return self.gamma_nl_per_w_km / 1e3

    @property
    def phi(self) -> float:
        return 3.0 * self.gamma_per_w_m**2 / (
            2.0 * math.pi * self.alpha_per_m * self.beta2_s2_per_m
        )

    @property
    def rho(self) -> float:
        return math.pi**2 * self.beta2_s2_per_m / (2.0 * self.alpha_per_m)


@dataclass(frozen=True)
class Channel:
    """A spectral occupant: centre frequency, bandwidth and launch PSD."""

    center_frequency_hz: float
    bandwidth_hz: float
    psd_w_per_hz: float
    is_jammer: bool = False

    def overlap_hz(self, other: "Channel") -> float:
        """Width of the spectral intersection with ``other`` (0 if disjoint)."""
        lo = max(
            self.center_frequency_hz - self.bandwidth_hz / 2.0,
            other.center_frequency_hz - other.bandwidth_hz / 2.0,
        )
        hi = min(
            self.center_frequency_hz + self.bandwidth_hz / 2.0,
            other.center_frequency_hz + other.bandwidth_hz / 2.0,
        )
        return max(0.0, hi - lo)


@dataclass(frozen=True)
class Modulation:
    name: str
    bits_per_symbol: int
    snr_threshold_db: float

    @property
    def snr_threshold_linear(self) -> float:
        return db_to_linear(self.snr_threshold_db)


#: Supported formats, ordered by spectral efficiency.
MODULATIONS: tuple[Modulation, ...] = (
    Modulation("BPSK", 1, 9.0),
    Modulation("QPSK", 2, 9.0),
    Modulation("8QAM", 3, 12.0),
    Modulation("16QAM", 4, 15.0),
    Modulation("32QAM", 5, 18.0),
    Modulation("64QAM", 6, 21.0),
)


def slot_center_frequency(block: SlotBlock, params: PhyParams) -> float:
    """Centre frequency of a slot block relative to the grid origin."""
    return params.base_frequency_hz + (block.start + block.width / 2.0) * params.slot_width_hz


def channel_for_block(
    block: SlotBlock,
    params: PhyParams,
    power_w: float | None = None,
    is_jammer: bool = False,
) -> Channel:
    """Build the :class:`Channel` occupying ``block`` at the given power.

    Defaults to the transmitter launch power; the PSD is power divided by
    the block bandwidth.
    """
    bandwidth = block.width * params.slot_width_hz
    if power_w is None:
        power_w = params.tx_power_w
    return Channel(
        center_frequency_hz=slot_center_frequency(block, params),
        bandwidth_hz=bandwidth,
        psd_w_per_hz=power_w / bandwidth,
        is_jammer=is_jammer,
    )


def g0_ase(params: PhyParams) -> float:
    """Per-span ASE noise PSD, (e^{alpha L} - 1) F h nu."""
    gain = math.exp(params.alpha_per_m * 1e3 * params.span_length_km)
    return (gain - 1.0) * db_to_linear(params.noise_figure_db) * params.planck_js * params.light_frequency_hz


def ase_psd(route, params: PhyParams) -> float:
    """ASE noise PSD accumulated over every span of ``route``."""
    if not route.links:
        raise ValueError("route has no links")
    return route.total_spans * g0_ase(params)


def _interference_log(target: Channel, other: Channel) -> float:
    """GN-model cross-channel term ln((f + B/2) / (f - B/2)).

    ``f`` is the centre-frequency spacing and ``B`` the interferer's
    bandwidth.  Requires the target centre to lie outside the
    interferer's band, which holds for any non-overlapping layout.
    """
    spacing = abs(target.center_frequency_hz - other.center_frequency_hz)
    half = other.bandwidth_hz / 2.0
    if spacing - half <= 0.0:
        raise PhyModelError(
            "co-channel spectra overlap the interference integral "
            f"(spacing {spacing:.3e} Hz, half-bandwidth {half:.3e} Hz)"
        )
    return math.log((spacing + half) / (spacing - half))


def nli_secure_psd(
    target: Channel,
    per_link_cochannels,
    params: PhyParams,
) -> float:
    """Nonlinear-interference PSD from legitimate co-propagating traffic.

    ``per_link_cochannels`` is a sequence of ``(span_count, channels)``
    pairs, one per route link, listing the channels sharing that link.
    Each link contributes ``span_count * phi * G * (self-term + cross
    terms)``; jammer channels must not appear here (their effect is
    computed by :func:`jamming_psd`).
    """
    g = target.psd_w_per_hz
    self_term = g * g * math.asinh(params.rho * target.bandwidth_hz**2)
    total = 0.0
    for span_count, channels in per_link_cochannels:
        cross = 0.0
        for other in channels:
            if other.is_jammer:
                raise PhyModelError("jammer channel passed to nli_secure_psd")
            if other is target or other == target:
                continue
            cross += other.psd_w_per_hz**2 * _interference_log(target, other)
        total += span_count * params.phi * g * (self_term + cross)
    return total


def jamming_psd(
    target: Channel,
    per_link_jammed,
    epsilon_w: float,
    params: PhyParams,
) -> float:
    """Excess NLI PSD caused by jammed channels spectrally near the target.

    Implements the out-of-band interaction: each jammed channel of
    bandwidth ``B`` contributes ``(eps^2 + 2 eps P) / B^2`` in place of
    the squared PSD of a legitimate channel, which is exactly the NLI of
    a channel at power ``P + eps`` minus the NLI of one at power ``P``.
    Overlapping (in-band) victims are outside this formula's domain and
    are handled by :func:`inband_jamming_psd`.
    """
    if epsilon_w < 0.0:
        raise ValueError(f"epsilon_w must be non-negative, got {epsilon_w!r}")
    p = params.tx_power_w
    excess = epsilon_w * epsilon_w + 2.0 * epsilon_w * p
    g = target.psd_w_per_hz
    total = 0.0
    for span_count, channels in per_link_jammed:
        cross = 0.0
        for jam in channels:
            if jam == target:
                continue
            if target.overlap_hz(jam) > 0.0:
                raise PhyModelError("target overlaps a jammed channel; use inband_jamming_psd")
            cross += (excess / jam.bandwidth_hz**2) * _interference_log(target, jam)
        total += span_count * params.phi * g * cross
    return total


def inband_jamming_psd(target: Channel, jammer: Channel, epsilon_w: float) -> float:
    """Direct noise PSD seen by a victim overlapping the jammed range.

    The jammer's excess PSD (epsilon spread over the jammed bandwidth)
    falls inside the victim's band over the overlap only, so the
    equivalent flat noise PSD is scaled by the overlapped fraction of the
    victim's bandwidth.  Injected power rides along with the signal, so
    this term is added once per traversal of the attacked fibre rather
    than once per span.  Zero when the spectra are disjoint or epsilon
    is zero, keeping the no-extra-power case identical to no attack.
    """
    overlap = target.overlap_hz(jammer)
    if overlap <= 0.0 or epsilon_w <= 0.0:
        return 0.0
    excess_psd = epsilon_w / jammer.bandwidth_hz
    return excess_psd * (overlap / target.bandwidth_hz)


def snr(
    target: Channel,
    route,
    per_link_state,
    jammer_epsilon_w: float | None,
    params: PhyParams,
) -> float:
    """Linear SNR of ``target`` over ``route``.

    ``per_link_state`` is a sequence aligned with ``route.links`` whose
    elements list every channel co-propagating on that link, jammer
    channels included (flagged ``is_jammer``).  ``jammer_epsilon_w`` is
    the attacker's extra linear power; ``None`` means no attacker and any
    jammer-flagged channels contribute nothing.

    Jammer channels are split by geometry: non-overlapping ones go
    through the out-of-band formula, overlapping ones through the
    in-band overlap rule.
    """
    if len(per_link_state) != len(route.links):
        raise ValueError("per_link_state must align with route.links")

    secure: list[tuple[int, list[Channel]]] = []
    jammed: list[tuple[int, list[Channel]]] = []
    inband = 0.0
    eps = 0.0 if jammer_epsilon_w is None else jammer_epsilon_w
    for link, channels in zip(route.links, per_link_state):
        legit = [c for c in channels if not c.is_jammer]
        secure.append((link.span_count, legit))
        if jammer_epsilon_w is None:
            continue
        oob = []
        for jam in (c for c in channels if c.is_jammer):
            if target.overlap_hz(jam) > 0.0:
                inband += inband_jamming_psd(target, jam, eps)
            else:
                oob.append(jam)
        if oob:
            jammed.append((link.span_count, oob))

    noise = ase_psd(route, params)
    noise += nli_secure_psd(target, secure, params)
    if jammer_epsilon_w is not None and jammed:
        noise += jamming_psd(target, jammed, eps, params)
    noise += inband
    return target.psd_w_per_hz / noise


def qot_verdict(snr_linear: float, modulation: Modulation) -> bool:
    """True when the SNR meets the modulation threshold (inclusive)."""
    return linear_to_db(snr_linear) >= modulation.snr_threshold_db
