from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from forgetmaps.weights import (
    INFINITY,
    BadSubsetError,
    NotARefinementError,
    NotFourPointsError,
    NotHyperbolicError,
    Stability,
    SymmetryPartition,
    WeightSystem,
    WeightSystemError,
    admissible_partitions,
    check_half_int,
    check_int,
    commensurability_index,
    contract,
    dual,
    finest_partition,
    is_cocompact,
    is_integral,
    orbifold_weight,
    orbifold_weight_sym,
    stability_class,
)

W = WeightSystem.from_numerators
SP = SymmetryPartition


@st.composite
def weight_systems(draw, min_k=4, max_k=8, max_entry=12):
    k = draw(st.integers(min_k, max_k))
    nums = draw(st.lists(st.integers(1, max_entry), min_size=k, max_size=k))
    if sum(nums) % 2:
        nums[0] += 1
    den = sum(nums) // 2
    assume(den >= 2 and all(0 < n < den for n in nums))
    return W(nums, den)


def test_validation():
    with pytest.raises(WeightSystemError):
        W((1, 1, 1), 2)  # too few points
    with pytest.raises(WeightSystemError):
        W((1, 1, 1, 2), 4)  # sums to 5/4
    with pytest.raises(WeightSystemError):
        W((4, 1, 1, 2), 4)  # weight 1 not below 1
    mu = W((3, 3, 3, 3, 3, 1), 8)
    assert mu.k == 6 and mu.dimension == 3 and mu.lcd == 8
    assert mu.numerators() == (3, 3, 3, 3, 3, 1)


def test_orbifold_weight_examples():
    mu = W((3, 3, 3, 3, 3, 1), 8)
    assert orbifold_weight(mu, 1, 2) == 4
    assert orbifold_weight(mu, 1, 6) == 2
    assert orbifold_weight(W((3, 3, 3, 7), 8), 1, 4) == -4
    assert orbifold_weight(W((2, 2, 2, 3, 3), 6), 4, 5) is INFINITY
    with pytest.raises(WeightSystemError):
        orbifold_weight(mu, 1, 7)
    with pytest.raises(WeightSystemError):
        orbifold_weight(mu, 2, 2)


def test_orbifold_weight_sym_examples():
    mu = W((2, 2, 2, 1, 5), 6)
    sigma = SP.from_blocks(5, [(1, 2, 3)])
    assert orbifold_weight_sym(mu, sigma, 1, 2) == 6
    assert orbifold_weight_sym(mu, sigma, 1, 4) == 2
    trivial = SP.singletons(5)
    for i in range(1, 6):
        for j in range(i + 1, 6):
            assert orbifold_weight_sym(mu, trivial, i, j) == orbifold_weight(mu, i, j)


@given(weight_systems())
def test_orbifold_weight_symmetric_and_signs(mu):
    for i in range(1, mu.k + 1):
        for j in range(i + 1, mu.k + 1):
            value = orbifold_weight(mu, i, j)
            assert value == orbifold_weight(mu, j, i)
            pair_sum = mu[i] + mu[j]
            if pair_sum == 1:
                assert value is INFINITY
            elif pair_sum > 1:
                assert value < 0
            else:
                assert value > 0


def test_check_int_examples():
    assert check_int(W((3, 3, 3, 3, 3, 1), 8))
    assert check_int(W((2, 2, 2, 2, 2), 5))
    assert not check_int(W((1, 1, 2, 2, 2, 2), 5))


def test_check_half_int_examples():
    mu = W((3, 3, 3, 3, 6, 2), 10)
    assert check_half_int(mu, SP.from_blocks(6, [(1, 2, 3, 4)]))
    assert not check_half_int(mu, SP.singletons(6))
    assert check_half_int(W((3, 3, 3, 3, 3, 1), 8), SP.singletons(6))
    with pytest.raises(WeightSystemError):
        check_half_int(mu, SP.from_blocks(6, [(4, 5)]))  # unequal weights in a block


def test_is_cocompact_examples():
    assert is_cocompact(W((3, 3, 3, 3, 3, 1), 8))
    assert not is_cocompact(W((2, 2, 3, 3, 1, 1), 6))  # 2+3+1 = 6
    assert not is_cocompact(W((2, 2, 2, 3, 3), 6))  # 2+2+2 = 6


@given(weight_systems(), st.randoms())
def test_is_cocompact_permutation_invariant(mu, rng):
    weights = list(mu.weights)
    rng.shuffle(weights)
    assert is_cocompact(WeightSystem(tuple(weights))) == is_cocompact(mu)


@given(weight_systems(min_k=4, max_k=4))
def test_is_cocompact_dual_invariant(mu):
    assert is_cocompact(dual(mu)) == is_cocompact(mu)


def test_stability_examples():
    mu = W((3, 3, 3, 3, 3, 1), 8)
    assert stability_class(mu, [(5, 6)]) is Stability.STABLE
    assert stability_class(mu, [(1, 2, 3)]) is Stability.UNSTABLE
    nu = W((2, 2, 3, 3, 1, 1), 6)
    assert stability_class(nu, [(1, 4, 5)]) is Stability.STRICTLY_SEMISTABLE
    # two complementary groups, each summing to exactly 1
    assert stability_class(nu, [(1, 4, 5), (2, 3, 6)]) is Stability.STRICTLY_SEMISTABLE
    # one group above 1 makes the pattern unstable no matter what else coalesces
    assert stability_class(nu, [(1, 4, 5), (2, 3)]) is Stability.STRICTLY_SEMISTABLE
    assert stability_class(nu, [(2, 3, 4), (5, 6)]) is Stability.UNSTABLE


def test_contract_examples():
    mu = W((3, 3, 3, 3, 3, 1), 8)
    assert contract(mu, (5, 6)).weights == W((3, 3, 3, 3, 4), 8).weights
    with pytest.raises(NotHyperbolicError):
        contract(mu, (1, 2, 3))
    with pytest.raises(BadSubsetError):
        contract(mu, (2,))
    with pytest.raises(BadSubsetError):
        contract(W((1, 1, 1, 1), 2), (1, 2))  # would leave three points
    lam = W((2, 2, 2, 2, 2), 5)
    assert contract(lam, (4, 5)).weights == W((2, 2, 2, 4), 5).weights


@given(weight_systems(min_k=5))
def test_contract_preserves_invariants(mu):
    for i in range(1, mu.k + 1):
        for j in range(i + 1, mu.k + 1):
            if mu[i] + mu[j] >= 1:
                continue
            child = contract(mu, (i, j))
            assert sum(child.weights) == 2
            assert all(0 < w < 1 for w in child.weights)
            assert child.k == mu.k - 1


def test_dual_examples():
    assert dual(W((3, 3, 3, 7), 8)).weights == W((5, 5, 5, 1), 8).weights
    assert dual(W((1, 3, 4, 4), 6)).weights == W((5, 3, 2, 2), 6).weights
    with pytest.raises(NotFourPointsError):
        dual(W((2, 2, 2, 2, 2), 5))


@given(weight_systems(min_k=4, max_k=4))
def test_dual_involution_and_sign_flip(mu):
    assert dual(dual(mu)) == mu
    nu = dual(mu)
    for i in range(1, 5):
        for j in range(i + 1, 5):
            a, b = orbifold_weight(mu, i, j), orbifold_weight(nu, i, j)
            if a is INFINITY:
                assert b is INFINITY
            else:
                assert b == -a


def test_finest_partition_examples():
    assert finest_partition(W((3, 3, 3, 3, 6, 2), 10)) == SP.from_blocks(6, [(1, 2, 3, 4)])
    assert finest_partition(W((3, 3, 3, 3, 3, 1), 8)) == SP.singletons(6)
    assert finest_partition(W((2, 2, 3, 3, 1, 1), 6)) == SP.from_blocks(6, [(5, 6)])
    assert finest_partition(W((1, 1, 2, 2, 2, 2), 5)) is None


def test_admissible_partitions_examples():
    assert admissible_partitions(W((3, 3, 3, 3, 6, 2), 10)) == [
        SP.from_blocks(6, [(1, 2, 3, 4)])
    ]
    assert len(admissible_partitions(W((3, 3, 3, 3, 3, 1), 8))) == 52  # Bell(5)
    assert admissible_partitions(W((1, 1, 2, 2, 2, 2), 5)) == []


@given(weight_systems(max_k=6, max_entry=8))
@settings(max_examples=60, deadline=None)
def test_admissible_partitions_structure(mu):
    parts = admissible_partitions(mu)
    finest = finest_partition(mu)
    if finest is None:
        assert parts == []
        return
    assert finest in parts
    for p in parts:
        assert finest.refines(p)
        assert check_half_int(mu, p)


def test_commensurability_index_examples():
    s3 = SP.from_blocks(5, [(1, 2, 3)])
    assert commensurability_index(SP.singletons(5), s3) == 6
    assert commensurability_index(
        SP.from_blocks(4, [(1, 2), (3, 4)]), SP.from_blocks(4, [(1, 2, 3, 4)])
    ) == 6
    assert commensurability_index(s3, s3) == 1
    with pytest.raises(NotARefinementError):
        commensurability_index(s3, SP.from_blocks(5, [(3, 4, 5)]))


def test_partition_normalisation_and_validation():
    p = SP(((4, 2), (1, 3)))
    assert p.blocks == ((1, 3), (2, 4))
    assert p.group_order() == 4
    with pytest.raises(WeightSystemError):
        SP(((1, 2), (2, 3)))  # overlapping
    with pytest.raises(WeightSystemError):
        SP(((1, 2), (4,)))  # gap


def test_int_systems_have_integral_weights_everywhere():
    # once INT holds, even pairs with weight sum above 1 give integers
    for nums, den in [((3, 3, 3, 3, 3, 1), 8), ((2, 2, 2, 2, 2), 5), ((3, 3, 3, 7), 8)]:
        mu = W(nums, den)
        assert check_int(mu)
        for i in range(1, mu.k + 1):
            for j in range(i + 1, mu.k + 1):
                value = orbifold_weight(mu, i, j)
                assert value is INFINITY or is_integral(value)
