import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eonjam.phy import (
    MODULATIONS,
    Channel,
    PhyModelError,
    PhyParams,
    ase_psd,
    channel_for_block,
    db_to_linear,
    g0_ase,
    inband_jamming_psd,
    jamming_psd,
    linear_to_db,
    nli_secure_psd,
    qot_verdict,
    slot_center_frequency,
    snr,
)
from eonjam.spectrum import SlotBlock
from eonjam.topology import load_topology

import reference_model as ref


def route_of_spans(*span_counts):
    """A chain topology whose links have the requested span counts."""
    nodes = [f"n{i}" for i in range(len(span_counts) + 1)]
    lines = ["nodes: " + " ".join(nodes)]
    for i, spans in enumerate(span_counts):
        lines.append(f"link: {nodes[i]} {nodes[i + 1]} {spans * 100}")
    topo = load_topology("\n".join(lines))
    return topo.shortest_path(nodes[0], nodes[-1])


def test_db_conversions():
    assert db_to_linear(0.0) == 1.0
    assert db_to_linear(3.0) == pytest.approx(1.9953, abs=1e-4)
    assert linear_to_db(db_to_linear(6.0)) == pytest.approx(6.0, rel=1e-12)


def test_linear_to_db_rejects_non_positive():
    with pytest.raises(ValueError):
        linear_to_db(0.0)
    with pytest.raises(ValueError):
        linear_to_db(-1.0)


@given(st.floats(min_value=-60, max_value=60))
@settings(max_examples=100)
def test_db_roundtrip_identity(x_db):
    assert linear_to_db(db_to_linear(x_db)) == pytest.approx(x_db, rel=1e-12, abs=1e-12)


def test_params_reject_non_positive():
    with pytest.raises(ValueError):
        PhyParams(slot_width_hz=0.0)
    with pytest.raises(ValueError):
        PhyParams(noise_figure_db=-1.0)


def test_derived_coefficients(params):
    assert params.phi == pytest.approx(ref.PHI, rel=1e-12)
    assert params.rho == pytest.approx(ref.RHO, rel=1e-12)
    assert params.rho * params.slot_width_hz**2 == pytest.approx(0.268, abs=5e-4)


def test_slot_center_frequency(params):
    assert slot_center_frequency(SlotBlock(0, 2), params) == pytest.approx(1.25e10)
    assert slot_center_frequency(SlotBlock(10, 4), params) == pytest.approx(1.5e11)
    spacing = abs(
        slot_center_frequency(SlotBlock(0, 2), params)
        - slot_center_frequency(SlotBlock(10, 4), params)
    )
    assert spacing == pytest.approx(1.375e11)


def test_g0_ase_value(params):
    assert g0_ase(params) == pytest.approx(ref.ref_g0_ase(), rel=1e-12)
    assert g0_ase(params) == pytest.approx(5.0402e-17, rel=1e-4)


def test_g0_ase_limits():
    assert g0_ase(PhyParams(span_length_km=1e-9)) == pytest.approx(0.0, abs=1e-25)
    tiny_noise = PhyParams(noise_figure_db=1e-12)
    full_noise = PhyParams()
    ratio = g0_ase(full_noise) / g0_ase(tiny_noise)
    assert ratio == pytest.approx(db_to_linear(6.0), rel=1e-9)


def test_ase_accumulates_spans(params):
    one = route_of_spans(1)
    assert ase_psd(one, params) == pytest.approx(g0_ase(params), rel=1e-12)
    five = route_of_spans(3, 2)
    assert ase_psd(five, params) == pytest.approx(5 * g0_ase(params), rel=1e-12)


def test_ase_split_link_invariance(params):
    assert ase_psd(route_of_spans(5), params) == pytest.approx(
        ase_psd(route_of_spans(2, 3), params), rel=1e-12
    )


def test_nli_self_term_only(params):
    target = channel_for_block(SlotBlock(0, 1), params)
    value = nli_secure_psd(target, [(1, [])], params)
    g = target.psd_w_per_hz
    expected = params.phi * g**3 * math.asinh(params.rho * target.bandwidth_hz**2)
    assert value == pytest.approx(expected, rel=1e-12)
    assert nli_secure_psd(target, [], params) == 0.0


def test_nli_symmetric_cochannels_contribute_equally(params):
    target = channel_for_block(SlotBlock(10, 2), params)
    below = channel_for_block(SlotBlock(4, 2), params)
    above = channel_for_block(SlotBlock(16, 2), params)
    both = nli_secure_psd(target, [(1, [below, above])], params)
    only_self = nli_secure_psd(target, [(1, [])], params)
    one_side = nli_secure_psd(target, [(1, [below])], params)
    assert both - one_side == pytest.approx(one_side - only_self, rel=1e-9)


def test_nli_rejects_overlap(params):
    target = channel_for_block(SlotBlock(10, 4), params)
    overlapping = channel_for_block(SlotBlock(11, 2), params)
    with pytest.raises(PhyModelError):
        nli_secure_psd(target, [(1, [overlapping])], params)


def test_nli_rejects_jammer_channel(params):
    target = channel_for_block(SlotBlock(0, 1), params)
    jam = channel_for_block(SlotBlock(50, 10), params, is_jammer=True)
    with pytest.raises(PhyModelError):
        nli_secure_psd(target, [(1, [jam])], params)


def test_jamming_zero_epsilon(params):
    target = channel_for_block(SlotBlock(0, 2), params)
    jam = channel_for_block(SlotBlock(50, 10), params, is_jammer=True)
    assert jamming_psd(target, [(3, [jam])], 0.0, params) == 0.0


def test_jamming_empty_set(params):
    target = channel_for_block(SlotBlock(0, 2), params)
    assert jamming_psd(target, [(3, [])], 1e-3, params) == 0.0


def test_jamming_equals_elevated_minus_baseline_cochannel(params):
    # One jammed channel's excess NLI must equal the secure-model NLI of
    # the same channel at power P + eps minus the one at power P.
    eps = 1e-3 * (db_to_linear(3.0) - 1.0)
    block = SlotBlock(50, 10)
    target = channel_for_block(SlotBlock(30, 2), params)
    jam = channel_for_block(block, params, power_w=params.tx_power_w + eps, is_jammer=True)
    value = jamming_psd(target, [(2, [jam])], eps, params)

    elevated = channel_for_block(block, params, power_w=params.tx_power_w + eps)
    baseline = channel_for_block(block, params)
    brute = nli_secure_psd(target, [(2, [elevated])], params) - nli_secure_psd(
        target, [(2, [baseline])], params
    )
    assert value == pytest.approx(brute, rel=1e-9)


def test_jamming_rejects_overlap(params):
    target = channel_for_block(SlotBlock(52, 2), params)
    jam = channel_for_block(SlotBlock(50, 10), params, is_jammer=True)
    with pytest.raises(PhyModelError):
        jamming_psd(target, [(1, [jam])], 1e-3, params)


def test_inband_overlap_fraction(params):
    jam = channel_for_block(SlotBlock(50, 10), params, is_jammer=True)
    eps = 2e-3
    inside = channel_for_block(SlotBlock(52, 2), params)
    assert inband_jamming_psd(inside, jam, eps) == pytest.approx(
        eps / jam.bandwidth_hz, rel=1e-12
    )
    partial = channel_for_block(SlotBlock(48, 4), params)  # 2 of 4 slots overlap
    assert inband_jamming_psd(partial, jam, eps) == pytest.approx(
        (eps / jam.bandwidth_hz) * 0.5, rel=1e-12
    )
    outside = channel_for_block(SlotBlock(40, 4), params)
    assert inband_jamming_psd(outside, jam, eps) == 0.0
    assert inband_jamming_psd(inside, jam, 0.0) == 0.0


def _per_link_with_jammer(params, span_counts, jam_blocks, eps, cochannels=()):
    state = []
    for spans in span_counts:
        channels = list(cochannels)
        channels += [
            channel_for_block(b, params, power_w=params.tx_power_w + eps, is_jammer=True)
            for b in jam_blocks
        ]
        state.append(channels)
    return state


def test_snr_jammer_none_equals_zero_epsilon(params):
    route = route_of_spans(2, 1)
    target = channel_for_block(SlotBlock(0, 2), params)
    no_jam = snr(target, route, [[], []], None, params)
    with_inert = snr(
        target,
        route,
        _per_link_with_jammer(params, (2, 1), [SlotBlock(50, 10)], 0.0),
        0.0,
        params,
    )
    assert no_jam == with_inert


def test_snr_decreases_with_spans(params):
    target = channel_for_block(SlotBlock(0, 2), params)
    short = snr(target, route_of_spans(2), [[]], None, params)
    long = snr(target, route_of_spans(4), [[]], None, params)
    assert long < short


def test_snr_strictly_decreasing_in_epsilon(params):
    route = route_of_spans(2)
    target = channel_for_block(SlotBlock(40, 2), params)
    values = []
    for eps_db in (0.0, 1.0, 3.0, 5.0):
        eps = params.tx_power_w * (db_to_linear(eps_db) - 1.0)
        state = _per_link_with_jammer(params, (2,), [SlotBlock(50, 10)], eps)
        values.append(snr(target, route, state, eps, params))
    assert values[0] > values[1] > values[2] > values[3]


def test_out_of_band_decay_with_distance(params):
    route = route_of_spans(2)
    eps = params.tx_power_w * (db_to_linear(5.0) - 1.0)
    jam_noise = []
    for start in (40, 30, 20, 10):
        target = channel_for_block(SlotBlock(start, 2), params)
        state = _per_link_with_jammer(params, (2,), [SlotBlock(50, 10)], eps)
        clean = snr(target, route, [[]], None, params)
        jammed = snr(target, route, state, eps, params)
        jam_noise.append(
            target.psd_w_per_hz / jammed - target.psd_w_per_hz / clean
        )
    assert jam_noise[0] > jam_noise[1] > jam_noise[2] > jam_noise[3] > 0


def test_qot_verdict_boundaries():
    bpsk = MODULATIONS[0]
    assert qot_verdict(db_to_linear(9.0), bpsk)
    assert not qot_verdict(db_to_linear(8.99), bpsk)
    qam64 = MODULATIONS[-1]
    assert qot_verdict(db_to_linear(21.0), qam64)


def test_modulation_table_matches_convention():
    names = [m.name for m in MODULATIONS]
    bits = [m.bits_per_symbol for m in MODULATIONS]
    thresholds = [m.snr_threshold_db for m in MODULATIONS]
    assert names == ["BPSK", "QPSK", "8QAM", "16QAM", "32QAM", "64QAM"]
    assert bits == [1, 2, 3, 4, 5, 6]
    assert thresholds == [9.0, 9.0, 12.0, 15.0, 18.0, 21.0]
    assert thresholds == sorted(thresholds)


def test_snr_matches_reference_on_desk_configuration(params):
    # Three channels on one span plus a jammer: compare against the
    # straight-line reference model end to end.
    route = route_of_spans(1)
    target = channel_for_block(SlotBlock(44, 2), params)
    neighbours = [
        channel_for_block(SlotBlock(40, 2), params),
        channel_for_block(SlotBlock(48, 1), params),
    ]
    eps = params.tx_power_w * (db_to_linear(3.0) - 1.0)
    jam = channel_for_block(
        SlotBlock(50, 10), params, power_w=params.tx_power_w + eps, is_jammer=True
    )
    value = snr(target, route, [neighbours + [jam]], eps, params)

    as_tuple = lambda c: (c.center_frequency_hz, c.bandwidth_hz, c.psd_w_per_hz, c.is_jammer)
    expected = ref.ref_snr(
        as_tuple(target),
        [(1, [as_tuple(c) for c in neighbours + [jam]])],
        eps,
    )
    assert value == pytest.approx(expected, rel=1e-9)
