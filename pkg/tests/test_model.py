import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chunkcast.model import (
    BandwidthProfile,
    ClassSpec,
    DomainError,
    ManyToOne,
    OneToOne,
    OneToSome,
    RANDOM_FAMILIES,
    cumulative_bandwidth,
    expand_classes,
    generate_adversarial,
    load_profile,
    parallel_connections,
    profile_from_dict,
    random_profile,
    save_profile,
)
from chunkcast.model import StreamConfig
from chunkcast.stream import feasibility_check


def test_profile_requires_sorted_uploads():
    with pytest.raises(DomainError):
        BandwidthProfile((1.0, 2.0))
    assert BandwidthProfile.from_unsorted([1.0, 2.0]).uploads == (2.0, 1.0)


def test_profile_rejects_null_capacity():
    with pytest.raises(DomainError):
        BandwidthProfile((0.0, 0.0))
    with pytest.raises(DomainError):
        BandwidthProfile(())
    with pytest.raises(DomainError):
        BandwidthProfile((1.0, -0.5))


def test_cumulative_bandwidth_examples():
    profile = BandwidthProfile((2.0, 1.0, 1.0))
    assert cumulative_bandwidth(profile, 2) == 3.0
    assert cumulative_bandwidth(profile, 1) == 2.0
    ones = BandwidthProfile((1.0,) * 7)
    assert cumulative_bandwidth(ones, 7) == 7.0
    with pytest.raises(DomainError):
        cumulative_bandwidth(profile, 0)
    with pytest.raises(DomainError):
        cumulative_bandwidth(profile, 4)


@given(
    st.lists(
        st.one_of(st.just(0.0), st.floats(0.001, 50.0)), min_size=1, max_size=30
    ).filter(lambda xs: max(xs) > 0)
)
@settings(max_examples=60, deadline=None)
def test_cumulative_increasing_then_constant(uploads):
    profile = BandwidthProfile.from_unsorted(uploads)
    values = [cumulative_bandwidth(profile, k) for k in range(1, profile.size + 1)]
    for k in range(1, profile.size):
        if profile.uploads[k] > 0:
            assert values[k] > values[k - 1]
        else:
            assert values[k] == values[k - 1]


def test_expand_classes_thirds_rounding():
    spec = ClassSpec(((Fraction(1, 3), 2.22), (Fraction(1, 3), 0.56), (Fraction(1, 3), 0.222)))
    profile = expand_classes(spec, 10_000)
    assert profile.size == 10_000
    assert profile.uploads.count(2.22) == 3334  # leftover seat goes to the best class
    assert profile.uploads.count(0.56) == 3333
    assert profile.uploads.count(0.222) == 3333
    assert all(a >= b for a, b in zip(profile.uploads, profile.uploads[1:]))


def test_expand_classes_full_population_fraction():
    assert expand_classes(ClassSpec(((1.0, 1.0),)), 5).uploads == (1.0,) * 5


def test_expand_classes_counts():
    spec = ClassSpec(((1, 1.6), (3, 0.8)))
    assert expand_classes(spec).uploads == (1.6, 0.8, 0.8, 0.8)
    with pytest.raises(DomainError):
        expand_classes(spec, 7)


def test_class_spec_validation():
    with pytest.raises(DomainError):
        ClassSpec(((0.5, 1.0), (0.5, 1.0)))  # uploads not strictly decreasing
    with pytest.raises(DomainError):
        ClassSpec(((0.6, 2.0), (0.6, 1.0)))  # fractions exceed 1
    with pytest.raises(DomainError):
        ClassSpec(((2, 2.0), (0.5, 1.0)))  # mixed counts and fractions
    with pytest.raises(DomainError):
        expand_classes(ClassSpec(((0.5, 2.0), (0.5, 1.0))), 1)  # N below class count


def test_one_to_some_one_matches_one_to_one():
    assert parallel_connections(OneToSome(1)) == parallel_connections(OneToOne()) == 1
    with pytest.raises(DomainError):
        OneToSome(0)
    with pytest.raises(DomainError):
        parallel_connections(ManyToOne())


def test_config_invariants():
    from chunkcast.model import InjectionConfig

    assert InjectionConfig(1).n0 == 1
    with pytest.raises(DomainError):
        InjectionConfig(0)
    with pytest.raises(DomainError):
        StreamConfig(0.0, 1)
    with pytest.raises(DomainError):
        StreamConfig(1.0, 0)


def test_generate_adversarial_examples():
    profile = generate_adversarial(10, 1, 0, 1)
    assert profile.uploads[0] == 8.0
    assert all(abs(u - 2 / 9) < 1e-12 for u in profile.uploads[1:])
    assert feasibility_check(profile, StreamConfig(1.0, 1)).feasible

    degenerate = generate_adversarial(3, 1, 0, 1)
    assert degenerate.uploads == (1.0, 1.0, 1.0)

    with pytest.raises(DomainError):
        generate_adversarial(2, 1, 0, 1)


@given(
    n_peers=st.integers(3, 40),
    n0=st.integers(1, 5),
    excess=st.floats(0, 50),
    rate=st.floats(0.1, 10),
)
@settings(max_examples=80, deadline=None)
def test_generate_adversarial_always_feasible(n_peers, n0, excess, rate):
    if n_peers <= n0 + 1:
        n_peers = n0 + 2
    profile = generate_adversarial(n_peers, n0, excess, rate)
    result = feasibility_check(profile, StreamConfig(rate, n0))
    assert result.feasible
    # total upload carries the requested spare capacity (scaled by the rate)
    assert profile.total_upload >= n_peers * rate + excess * rate - 1e-6


@pytest.mark.parametrize("family", RANDOM_FAMILIES)
def test_random_profiles_valid(family):
    rng = random.Random(5)
    for _ in range(10):
        profile = random_profile(family, rng.randint(1, 30), rng)
        assert profile.uploads[0] > 0
        assert all(a >= b for a, b in zip(profile.uploads, profile.uploads[1:]))


def test_profile_json_roundtrip(tmp_path):
    profile = BandwidthProfile((2.0, 1.0, 0.5))
    path = tmp_path / "p.json"
    save_profile(profile, path)
    assert load_profile(path) == profile


def test_profile_from_dict_variants():
    assert profile_from_dict({"uploads": [1.0, 3.0, 2.0]}).uploads == (3.0, 2.0, 1.0)
    classes = {"classes": [{"size": 0.5, "upload": 2.0}, {"size": 0.5, "upload": 1.0}], "N": 4}
    assert profile_from_dict(classes).uploads == (2.0, 2.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        profile_from_dict({"bogus": []})


def test_fraction_profiles_stay_exact():
    profile = BandwidthProfile((Fraction(8, 5), Fraction(4, 5)))
    assert profile.total_upload == Fraction(12, 5)
    assert profile.mean_upload == Fraction(6, 5)
    as_fr = BandwidthProfile((1.6, 0.8)).as_fractions()
    assert as_fr.uploads == (Fraction(8, 5), Fraction(4, 5))
