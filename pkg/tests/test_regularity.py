"""Regularity audit, deterministic-data generator, constant-pair
inequalities, and the constant-column J profile."""

import math
from fractions import Fraction

import numpy as np
import pytest

from bdscore.dataset import Dataset, empirical_cond_entropy
from bdscore.numerics import log_gamma_ratio
from bdscore.regularity import (
    DeterministicSpec,
    audit,
    constant_pair_inequalities,
    j_statistic_profile,
    make_deterministic_dataset,
    source_variable_names,
)
from bdscore.scores import BDeu, Jeffreys

TABLE_SPEC = DeterministicSpec(
    z_arity=4,
    f=(0, 1, 1, 0),
    g=(0, 0, 0, 1),
    z_sequence=(0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3),
)


def test_generator_reproduces_fixture(data_dir):
    want = (data_dir / "xor_and_12.csv").read_text()
    assert make_deterministic_dataset(TABLE_SPEC).to_csv_text() == want
    assert source_variable_names(TABLE_SPEC) == ["Z", "W"]


def test_generator_odd_arity_single_column():
    spec = DeterministicSpec(z_arity=3, f=(0, 1, 1), g=(0, 0, 1), z_sequence=(0, 1, 2, 2))
    ds = make_deterministic_dataset(spec)
    assert ds.names == ("X", "Z", "Y")
    assert source_variable_names(spec) == ["Z"]
    assert ds.column("Z").tolist() == [0, 1, 2, 2]
    assert ds.column("X").tolist() == [0, 1, 1, 1]
    assert ds.column("Y").tolist() == [0, 0, 1, 1]


def test_generator_constant_maps():
    spec = DeterministicSpec(z_arity=2, f=(0, 0), g=(0, 0), z_sequence=(0, 1, 0, 1))
    ds = make_deterministic_dataset(spec)
    assert ds.column("X").tolist() == [0, 0, 0, 0]
    assert ds.column("Y").tolist() == [0, 0, 0, 0]
    assert ds.arity_of("X") == 2  # declared arity floors at 2


def test_generator_declared_arities():
    spec = DeterministicSpec(z_arity=2, f=(0, 1), g=(0, 0), z_sequence=(0, 1),
                             x_arity=3, y_arity=4)
    ds = make_deterministic_dataset(spec)
    assert ds.arity_of("X") == 3 and ds.arity_of("Y") == 4


def test_spec_validation():
    with pytest.raises(ValueError):
        DeterministicSpec(z_arity=1, f=(0,), g=(0,), z_sequence=(0,))
    with pytest.raises(ValueError):
        DeterministicSpec(z_arity=2, f=(0,), g=(0, 1), z_sequence=(0,))
    with pytest.raises(ValueError):
        DeterministicSpec(z_arity=2, f=(0, 1), g=(0, 1), z_sequence=())
    with pytest.raises(ValueError):
        DeterministicSpec(z_arity=2, f=(0, 1), g=(0, 1), z_sequence=(0, 2))
    with pytest.raises(ValueError):
        DeterministicSpec(z_arity=2, f=(0, -1), g=(0, 1), z_sequence=(0,))
    with pytest.raises(ValueError):
        DeterministicSpec(z_arity=2, f=(0, 2), g=(0, 1), z_sequence=(0,), x_arity=2)


# -------------------------------------------------------------------- audit


def test_audit_on_table(xor_and):
    violations = audit(xor_and, "X", BDeu(1.0), ["Y", "Z", "W"])
    assert len(violations) == 1
    v = violations[0]
    assert [xor_and.names[i] for i in v.u.indices] == ["Z", "W"]
    assert [xor_and.names[i] for i in v.u_prime.indices] == ["Z", "W", "Y"]
    assert v.h_u == pytest.approx(0.0, abs=1e-12)
    assert v.h_u_prime == pytest.approx(0.0, abs=1e-12)
    # conditional scores are products of per-block fractions, one per
    # observed (Z, W) state
    assert v.score_u == pytest.approx(math.log(Fraction(17, 40) ** 4), abs=1e-12)
    assert v.score_u_prime == pytest.approx(math.log(Fraction(11, 24) ** 4), abs=1e-12)
    assert v.score_u < v.score_u_prime

    assert audit(xor_and, "X", Jeffreys(), ["Y", "Z", "W"]) == []
    for crit in ("aic", "bic"):
        assert audit(xor_and, "X", BDeu(1.0), ["Y", "Z", "W"], criterion=crit) == []


def test_audit_validation(xor_and):
    with pytest.raises(ValueError):
        audit(xor_and, "X", BDeu(1.0), ["X", "Y"])
    with pytest.raises(ValueError):
        audit(xor_and, "X", BDeu(1.0), ["Y"], max_parent_size=0)
    with pytest.raises(ValueError):
        audit(xor_and, "X", BDeu(1.0), ["Y"], criterion="mdl")


def random_deterministic_spec(rng):
    z_arity = int(rng.integers(2, 5))
    n = int(rng.integers(2, 30))
    f = tuple(int(v) for v in rng.integers(0, int(rng.integers(2, 4)), z_arity))
    g = tuple(int(v) for v in rng.integers(0, int(rng.integers(2, 4)), z_arity))
    z_seq = [int(v) for v in rng.integers(0, z_arity, n)]
    z_seq[min(1, n - 1)] = z_seq[0]  # force one source block of size >= 2
    return DeterministicSpec(z_arity=z_arity, f=f, g=g, z_sequence=tuple(z_seq))


def test_audit_randomized_deterministic_children():
    # any split-weight ESS prefers the padded parent set on functional
    # data with a repeated source state; flat weights never do
    rng = np.random.default_rng(113)
    for trial in range(60):
        spec = random_deterministic_spec(rng)
        ds = make_deterministic_dataset(spec)
        sources = source_variable_names(spec)
        ess = float(rng.choice([0.1, 0.5, 1.0, 2.0, 10.0]))
        split = audit(ds, "X", BDeu(ess), sources + ["Y"])
        found = any(
            [ds.names[i] for i in v.u.indices] == sources
            and set(ds.names[i] for i in v.u_prime.indices) == set(sources) | {"Y"}
            for v in split
        )
        assert found, (trial, spec)
        assert audit(ds, "X", Jeffreys(), sources + ["Y"]) == [], (trial, spec)


def test_audit_entropy_premise_is_enforced():
    # a pair whose entropy strictly drops is never reported, whatever
    # the scores do
    ds = make_deterministic_dataset(TABLE_SPEC)
    violations = audit(ds, "X", BDeu(1.0), ["Y", "Z", "W"])
    for v in violations:
        assert v.h_u <= v.h_u_prime + 1e-12
    h_z = empirical_cond_entropy(ds, "X", ["Z"], base="e")
    h_zw = empirical_cond_entropy(ds, "X", ["Z", "W"], base="e")
    assert h_z > h_zw  # so (Z,) inside (Z, W) fails the premise


# ------------------------------------------------------------- inequalities


def gaps(n, alpha, beta, ess):
    flat = (log_gamma_ratio(n, alpha * beta / 2.0) + log_gamma_ratio(n, 0.5)
            - log_gamma_ratio(n, alpha / 2.0) - log_gamma_ratio(n, beta / 2.0))
    split = (log_gamma_ratio(n, ess / (alpha * beta)) + log_gamma_ratio(n, ess)
             - log_gamma_ratio(n, ess / alpha) - log_gamma_ratio(n, ess / beta))
    return flat, split


def test_inequalities_hold_on_grid():
    for alpha in (2, 3, 4):
        for beta in (2, 3, 4):
            for ess in (0.25, 1.0, 4.0):
                for n in (0, 1, 2, 3, 7, 20, 100):
                    check = constant_pair_inequalities(n, alpha, beta, ess)
                    assert check.jeffreys_holds and check.bdeu_holds
                    flat, split = gaps(n, alpha, beta, ess)
                    assert flat >= -1e-12 and split >= -1e-12


def test_inequalities_equalities_and_strictness():
    # n = 0 and n = 1 are exact equalities; both gaps turn strictly
    # positive at n = 2
    for n in (0, 1):
        flat, split = gaps(n, 2, 3, 0.7)
        assert flat == pytest.approx(0.0, abs=1e-14)
        assert split == pytest.approx(0.0, abs=1e-14)
    flat, split = gaps(2, 2, 2, 1.0)
    assert split > 1e-3
    assert flat > 1e-3


def test_inequalities_validation():
    with pytest.raises(ValueError):
        constant_pair_inequalities(-1, 2, 2, 1.0)
    with pytest.raises(ValueError):
        constant_pair_inequalities(5, 1, 2, 1.0)
    with pytest.raises(ValueError):
        constant_pair_inequalities(5, 2, 2, 0.0)


# ------------------------------------------------------------------ profile


def test_profile_flat_is_count_invariant():
    n = 60
    base_value = j_statistic_profile(n, 0, Jeffreys())
    for ones in range(n + 1):
        assert j_statistic_profile(n, ones, Jeffreys()) == pytest.approx(
            base_value, abs=1e-12)
    want = math.log(
        math.sqrt(math.pi) * math.gamma(n + 1) / ((n + 1) * math.gamma(n + 0.5))) / n
    assert base_value == pytest.approx(want, abs=1e-12)
    assert base_value < 0.0


def test_profile_split_sign_structure():
    n = 100
    values = [j_statistic_profile(n, r, BDeu(1.0)) for r in range(n + 1)]
    positive = {r for r, v in enumerate(values) if v > 0.0}
    assert positive == {0, 1, 2, 3, n - 3, n - 2, n - 1, n}
    # symmetric in ones <-> zeros
    for r in range(n + 1):
        assert values[r] == pytest.approx(values[n - r], abs=1e-12)


def test_profile_split_matches_term_decomposition():
    def phi(m):
        return log_gamma_ratio(m, 0.25) - log_gamma_ratio(m, 0.5)

    for n in (1, 2, 5, 17):
        psi = log_gamma_ratio(n, 1.0) - log_gamma_ratio(n, 0.5)
        for r in range(n + 1):
            want = (phi(r) + phi(n - r) + psi) / n
            got = j_statistic_profile(n, r, BDeu(1.0))
            assert got == pytest.approx(want, abs=1e-12)


def test_profile_single_row_is_zero():
    for prior in (Jeffreys(), BDeu(1.0), BDeu(0.3)):
        assert j_statistic_profile(1, 0, prior) == pytest.approx(0.0, abs=1e-14)
        assert j_statistic_profile(1, 1, prior) == pytest.approx(0.0, abs=1e-14)


def test_profile_validation():
    with pytest.raises(ValueError):
        j_statistic_profile(10, 11, Jeffreys())
    with pytest.raises(ValueError):
        j_statistic_profile(10, -1, Jeffreys())
    with pytest.raises(ValueError):
        j_statistic_profile(0, 0, Jeffreys())
