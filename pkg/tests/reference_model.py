"""Straight-line reference implementation of the SNR model.

Written independently of the package internals: plain floats, plain
loops, every constant spelled out.  Used by the test suite as the oracle
the production physics must agree with.  Channels are plain tuples
``(center_hz, bandwidth_hz, psd_w_per_hz, is_jammer)`` and a route is a
list of per-link ``(span_count, [channels])`` entries.
"""

import math

ALPHA_DB_PER_KM = 0.2
SPAN_KM = 100.0
GAMMA_PER_W_KM = 1.22
BETA2_PS2_PER_KM = 16.0
LIGHT_FREQ_HZ = 1.93e14
NOISE_FIGURE_DB = 6.0
PLANCK_JS = 6.62607015e-34
SLOT_HZ = 12.5e9
TX_POWER_W = 1e-3

_ALPHA_PER_M = ALPHA_DB_PER_KM * math.log(10.0) / 10.0 / 1000.0
_BETA2_S2_PER_M = BETA2_PS2_PER_KM * 1e-24 / 1000.0
_GAMMA_PER_W_M = GAMMA_PER_W_KM / 1000.0

PHI = 3.0 * _GAMMA_PER_W_M**2 / (2.0 * math.pi * _ALPHA_PER_M * _BETA2_S2_PER_M)
RHO = math.pi**2 * _BETA2_S2_PER_M / (2.0 * _ALPHA_PER_M)


def ref_g0_ase():
    gain = math.exp(_ALPHA_PER_M * 1000.0 * SPAN_KM)
    return (gain - 1.0) * 10.0 ** (NOISE_FIGURE_DB / 10.0) * PLANCK_JS * LIGHT_FREQ_HZ


def ref_snr(target, per_link, epsilon_w):
    """SNR of ``target`` = (center, bw, psd, is_jammer) over ``per_link``.

    ``per_link`` is a list of (span_count, channels) with the target
    excluded from every channel list.  ``epsilon_w`` is the jammer's
    extra linear power (None for no attacker).
    """
    f_t, bw_t, g_t, _ = target
    noise = 0.0
    for span_count, _channels in per_link:
        noise += span_count * ref_g0_ase()

    for span_count, channels in per_link:
        sci = g_t * g_t * math.asinh(RHO * bw_t * bw_t)
        xci = 0.0
        for (f_o, bw_o, g_o, is_jammer) in channels:
            if is_jammer:
                continue
            spacing = abs(f_t - f_o)
            xci += g_o * g_o * math.log((spacing + bw_o / 2.0) / (spacing - bw_o / 2.0))
        noise += span_count * PHI * g_t * (sci + xci)

    if epsilon_w is not None:
        excess = epsilon_w * epsilon_w + 2.0 * epsilon_w * TX_POWER_W
        for span_count, channels in per_link:
            jam = 0.0
            inband = 0.0
            for (f_o, bw_o, g_o, is_jammer) in channels:
                if not is_jammer:
                    continue
                lo = max(f_t - bw_t / 2.0, f_o - bw_o / 2.0)
                hi = min(f_t + bw_t / 2.0, f_o + bw_o / 2.0)
                overlap = hi - lo
                if overlap > 0.0:
                    if epsilon_w > 0.0:
                        inband += (epsilon_w / bw_o) * (overlap / bw_t)
                else:
                    spacing = abs(f_t - f_o)
                    jam += (excess / (bw_o * bw_o)) * math.log(
                        (spacing + bw_o / 2.0) / (spacing - bw_o / 2.0)
                    )
            noise += span_count * PHI * g_t * jam + inband
    return g_t / noise
