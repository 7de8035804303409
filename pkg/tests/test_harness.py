from __future__ import annotations

import io
import random
from fractions import Fraction as F

from adelic_brs.adeles import AdeleVector, GammaVector, PrimeSet, reduce_mod_gamma
from adelic_brs.brs import RotationSpec, VolumeSpec, chi_A, construct_brs
from adelic_brs.exactnum import QuadReal
from adelic_brs.harness import (
    OrbitSeries,
    birkhoff_series,
    coboundary_residual,
    control_series,
    enumerate_volumes,
    envelope_check,
    integrality_failures,
    lemma_chain_check,
    orbit_counts,
    padic_property_failures,
    random_rotation,
    random_volume_spec,
    showcase_configs,
    transfer_estimate,
)

S2 = QuadReal.sqrt(2)
P2 = PrimeSet.of(2)
ROT = RotationSpec.of(AdeleVector.build(P2, [S2], {2: [0]}))


def _spec(g, eta, primes=P2):
    return VolumeSpec(GammaVector(primes, tuple(F(x) for x in g)), eta)


def test_empty_series():
    brs = construct_brs(_spec([1], -1), ROT)
    s = birkhoff_series(brs, ROT, n_max=0)
    assert s.n_max == 0 and s.max_abs == 0 and s.S(0) == 0


def test_telescoping_and_brute_force():
    brs = construct_brs(_spec([F(1, 2)], 1), RotationSpec.of(AdeleVector.build(P2, [S2], {2: [F(1, 2)]})))
    rot = RotationSpec.of(AdeleVector.build(P2, [S2], {2: [F(1, 2)]}))
    s = birkhoff_series(brs, rot, n_max=300, stride=7)
    for N in range(300):
        # brute force: evaluate chi on the unreduced orbit point with the bounding-box counter
        chi = chi_A(brs, rot.alpha.scale(N), "box")
        assert s.step_counts[N] == chi
        assert s.S(N + 1) - s.S(N) == chi - brs.volume
    assert s.S(0) == 0


def test_partition_determinism():
    rng = random.Random(2)
    rot = random_rotation(rng, 2, PrimeSet.of(2, 3))
    brs = construct_brs(random_volume_spec(rng, rot, height=12), rot)
    ref = birkhoff_series(brs, rot, n_max=400)
    for parts in (2, 8):
        other = birkhoff_series(brs, rot, n_max=400, partitions=parts)
        assert other.step_counts == ref.step_counts and other.deviations == ref.deviations
    buf1, buf2 = io.StringIO(), io.StringIO()
    ref.to_csv(buf1)
    birkhoff_series(brs, rot, n_max=400, partitions=3, workers=2).to_csv(buf2)
    assert buf1.getvalue() == buf2.getvalue()


def test_complement_telescope():
    # [0, sqrt2 - 1) and its complement [sqrt2 - 1, 1), realized as [0, 2 - sqrt2) started at -(sqrt2 - 1)
    A = construct_brs(_spec([1], -1), ROT)
    B = construct_brs(_spec([-1], 2), ROT)
    assert A.volume + B.volume == 1
    x0 = AdeleVector.build(P2, [1 - S2], {2: [0]})
    sa = birkhoff_series(A, ROT, n_max=500)
    sb = birkhoff_series(B, ROT, x0, n_max=500)
    for N in range(0, 501, 25):
        assert sa.S(N) == -sb.S(N)


def test_csv_columns():
    brs = construct_brs(_spec([1], -1), ROT)
    buf = io.StringIO()
    birkhoff_series(brs, ROT, n_max=20, stride=5).to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "N,count,N_times_V,S_N"
    assert [l.split(",")[0] for l in lines[1:]] == ["0", "5", "10", "15", "20"]


def test_lemma_chain_reports():
    rot = RotationSpec.of(AdeleVector.build(P2, [S2], {2: [F(1, 2)]}))
    rep = lemma_chain_check(_spec([F(1, 2)], 1), rot, 300)
    assert rep.ok and rep.n_checked == 301 and rep.volume == S2 / 2 + F(3, 4)
    rep = lemma_chain_check(_spec([3], -4), ROT, 200)  # integer gamma: D = I
    assert rep.ok
    whole = lemma_chain_check(_spec([0], 2), ROT, 20)
    assert whole.ok and whole.count_histogram == {2: 21}


def test_randomized_exact_suites():
    rng = random.Random(0)
    assert integrality_failures(PrimeSet.of(2, 3), 500, rng) == []
    assert padic_property_failures(300, rng) == []


def test_enumerate_volumes_examples():
    vl = enumerate_volumes(ROT, 1, (-1, 1))
    assert vl.volumes() == [0, S2 - 1, 1, S2, S2 + 1]
    assert all(v >= 0 for v in vl.volumes())
    ints = enumerate_volumes(ROT, 0, (-2, 3))
    assert ints.volumes() == [0, 1, 2, 3]
    buf = io.StringIO()
    vl.to_csv(buf)
    assert buf.getvalue().splitlines()[0] == "V_numeric,gamma_1,eta,V_exact_expression"


def test_enumerate_volumes_representative_invariance():
    # shifting alpha by a diagonal Gamma element leaves the volume set unchanged when eta is unrestricted
    cap = QuadReal(3)
    base = enumerate_volumes(ROT, 2, None, cap)
    q = GammaVector(P2, (F(5, 4),))
    shifted = RotationSpec.of(ROT.alpha + q.embed())
    assert enumerate_volumes(shifted, 2, None, cap).volumes() == base.volumes()


def test_control_series():
    flat = control_series(QuadReal(1), ROT, 200)
    assert all(flat.S(N) == 0 for N in range(201))
    interval = control_series(S2 - 1, ROT, 300)
    brs = construct_brs(_spec([1], -1), ROT)
    assert interval.step_counts == birkhoff_series(brs, ROT, n_max=300).step_counts


def test_transfer_estimate():
    brs = construct_brs(_spec([1], -1), ROT)
    x = AdeleVector.zero(P2, 1)
    assert transfer_estimate(brs, ROT, x, 1).exact == QuadReal(chi_A(brs, x)) - brs.volume
    whole = construct_brs(_spec([0], 1), ROT)
    assert transfer_estimate(whole, ROT, x, 50).exact == 0
    assert coboundary_residual(brs, ROT, x, 400) == 0


def test_envelope_check_flags_drift():
    drift = OrbitSeries.from_counts(QuadReal(F(1, 2)), [1] * 2000)
    env = envelope_check(drift, early=100, late=(1000, 2000))
    assert not env.ok
    brs = construct_brs(_spec([1], -1), ROT)
    assert envelope_check(birkhoff_series(brs, ROT, n_max=3000), 300, (1000, 3000)).ok


def test_showcase_configs_admissible():
    cfgs = showcase_configs()
    assert len(cfgs) == 5
    for _, rot, spec in cfgs:
        brs = construct_brs(spec, rot)
        assert 0 < brs.volume < 1 + S2


def test_orbit_counts_respects_start():
    brs = construct_brs(_spec([1], -1), ROT)
    x0 = ROT.alpha.scale(10)
    tail = orbit_counts(brs, ROT, x0, 20)
    full = orbit_counts(brs, ROT, None, 30)
    assert tail == full[10:]
    assert reduce_mod_gamma(x0)[0].in_fundamental_domain()
