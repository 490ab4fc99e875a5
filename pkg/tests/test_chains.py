import json
import math

import numpy as np
import pytest

from hhgeo.chains import (
    EQUALITY,
    FAIL,
    HYPOTHESIS_NOT_MET,
    LOEWNER,
    PASS,
    REGISTRY,
    SCALAR,
    TERMS,
    Bindings,
    ChainSpec,
    check_chain,
    compare,
    evaluate_term,
    get_chain,
    nu_limit_profile,
)
from hhgeo.errors import TermEvaluationError, UnknownIdError
from hhgeo.funcat import catalogue_fn, catalogue_map
from hhgeo.gen import GenConfig, sample_inputs
from hhgeo.linalg import diag, identity, sym_matrix

EXPECTED_IDS = {
    "mean-interp", "mean-mono", "int-superadd", "power-cmp", "hh-mr", "hh-mr123", "hh-mr222",
    "hh-mche", "sta-low", "sta-high", "sta-f-low", "sta-f-high", "geo-def", "resolvent-ineq",
    "ando-max", "psd-block", "pos-map", "norm-geo", "norm-cor", "scalar-hh", "scalar-hh-ref",
    "scalar-geo-hh", "opconvex-hh",
}

INV = catalogue_fn("inv")


def test_registry_coverage():
    assert set(REGISTRY) == EXPECTED_IDS


def test_equality_chains_have_two_terms():
    for c in REGISTRY.values():
        if c.relation == EQUALITY:
            assert len(c.terms) == 2
    with pytest.raises(ValueError):
        ChainSpec("x", EQUALITY, "", ("A#_t B", "C#_t D", "X"), "pair")


def test_spec_rejects_unknown_terms():
    with pytest.raises(ValueError):
        ChainSpec("x", LOEWNER, "", ("A#_t B", "nonsense"), "pair")


def test_unknown_chain():
    with pytest.raises(UnknownIdError) as info:
        get_chain("nope")
    assert "hh-mr" in str(info.value)


def test_arity():
    assert get_chain("hh-mr").arity == ("A", "B", "f")
    assert get_chain("mean-interp").arity == ("A", "B", "t", "s", "u")
    assert get_chain("pos-map").arity == ("A", "B", "psi")


def test_collapsed_chain_has_zero_slack():
    r = check_chain(get_chain("hh-mr"), {"A": 2 * identity(3), "B": 2 * identity(3)}, f=INV)
    assert r.verdict == PASS
    for link in r.links:
        assert link.slack == pytest.approx(0.0, abs=1e-14)
    np.testing.assert_allclose(evaluate_term("f(A#B)", Bindings(A=2 * identity(2), B=2 * identity(2), f=INV)), 0.5 * identity(2))


def test_mean_interp_commuting():
    r = check_chain(get_chain("mean-interp"), {"A": diag(1, 1), "B": diag(4, 9), "t": 0.2, "s": 0.5, "u": 0.8})
    assert r.verdict == PASS
    assert -r.links[0].slack <= 1e-12
    bd = Bindings(A=diag(1, 1), B=diag(4, 9), t=0.2, s=0.5, u=0.8)
    np.testing.assert_allclose(evaluate_term("A#_{(1-s)t+su} B", bd), diag(2, 3), rtol=1e-14)


def test_hh_mr_golden(fixtures_dir):
    golden = json.loads((fixtures_dir / "golden_hh_mr.json").read_text())
    r = check_chain(get_chain("hh-mr"), {"A": sym_matrix(golden["A"]), "B": sym_matrix(golden["B"])}, 1e-8, f=INV)
    assert r.verdict == PASS
    for i, link in enumerate(r.links):
        assert link.slack == pytest.approx(golden["slacks"][f"link_{i}"], abs=golden["oracle_abs_err"])


def test_term_examples():
    bd = Bindings(A=diag(1), B=diag(4), f=catalogue_fn("identity"))
    assert evaluate_term("int_0^1 f(A)#_t f(B) dt", bd)[0, 0] == pytest.approx(3 / math.log(4), rel=1e-13)
    assert evaluate_term("(f(A)#f(B) + f(B))/2", bd)[0, 0] == pytest.approx(3.0, rel=1e-15)
    assert evaluate_term("f(A#B)", Bindings(A=identity(2), B=identity(2), f=INV))[0, 0] == 1.0


def test_term_is_cached():
    bd = Bindings(A=diag(1, 2), B=diag(3, 4), f=INV)
    first = evaluate_term("int_0^1 f(A#_t B) dt", bd)
    assert evaluate_term("int_0^1 f(A#_t B) dt", bd) is first
    assert bd.quad_errors


def test_unknown_term():
    with pytest.raises(UnknownIdError):
        evaluate_term("nope", Bindings())


def test_term_failure_names_term():
    bd = Bindings(A=diag(1, -1), B=identity(2), f=INV)
    with pytest.raises(TermEvaluationError) as info:
        evaluate_term("f(A#B)", bd)
    assert info.value.term == "f(A#B)"


def test_hypothesis_short_circuits():
    # f = inv needs B <= A for f(A) <= f(B); this pair has A <= B
    r = check_chain(get_chain("hh-mr123"), {"A": identity(2), "B": 2 * identity(2)}, f=INV)
    assert r.verdict == HYPOTHESIS_NOT_MET
    assert r.links == [] and r.unmet == ["f(A)<=f(B)"]


def test_sta_rejects_wrong_nu_half():
    r = check_chain(get_chain("sta-low"), {"A": 2 * identity(2), "B": identity(2), "nu": 0.5}, f=INV)
    assert r.verdict == HYPOTHESIS_NOT_MET


def test_compare_conventions():
    a, b = diag(1, 2), diag(2, 1)
    link = compare(LOEWNER, a, b, "a", "b", 1e-8)
    assert link.slack == -1.0 and not link.passed and link.scale == 2.0
    assert compare(SCALAR, 1.0, 3.0, "x", "y", 0).slack == 2.0
    eq = compare(EQUALITY, a, a, "a", "a", 1e-12)
    assert eq.passed and eq.slack == 0.0


def test_failing_chain_is_reported():
    spec = ChainSpec("rev", LOEWNER, "", ("A#B", "X"), "ando")
    r = check_chain(spec, {"A": identity(2), "B": identity(2), "X": 0.5 * identity(2)})
    assert r.verdict == FAIL and r.links[0].slack == pytest.approx(-0.5)


def test_transitivity_audit():
    bd = {"A": diag(1, 2), "B": diag(2, 5)}
    r = check_chain(get_chain("hh-mr"), bd, f=INV)
    assert r.audit is not None and r.audit.passed
    assert r.audit.slack >= min(l.slack for l in r.links) - 1e-14


def test_mche_study_slack_reported():
    inputs = sample_inputs("pair", INV, GenConfig(seed=3, dim=3), 0)
    r = check_chain(get_chain("hh-mche"), inputs, f=INV)
    assert r.verdict == PASS and len(r.study) == 1
    json.dumps(r.to_dict())


def test_digest_is_json_and_replayable():
    inputs = sample_inputs("pair", None, GenConfig(seed=3, dim=3), 5, (("t", 0, 1),))
    inputs.update(seed=3, stream=5, dim=3)
    r = check_chain(get_chain("geo-def"), inputs, f=INV)
    assert r.digest == {"t": inputs["t"], "seed": 3, "stream": 5, "dim": 3, "fn": "inv"}


@pytest.mark.parametrize("chain_id", sorted(EXPECTED_IDS))
def test_every_chain_passes_on_sample_draws(chain_id):
    chain = get_chain(chain_id)
    f = catalogue_fn(chain.default_fn) if chain.default_fn else None
    met = 0
    for stream in range(30 if chain_id != "ando-max" else 600):
        dim = 2 + stream % 4
        inputs = sample_inputs(chain.inputs, f, GenConfig(seed=17, dim=dim), stream,
                               chain.scalars, {}, chain.ordered_scalars)
        psi = catalogue_map(("compression", "pinching", "trace")[stream % 3], dim) if chain.needs_map else None
        r = check_chain(chain, inputs, 1e-8, f=f, psi=psi)
        assert r.verdict != FAIL, (stream, [l.to_dict() for l in r.links])
        met += r.verdict == PASS
    assert met > 0


def test_one_dimensional_hh_mr():
    r = check_chain(get_chain("hh-mr"), {"A": sym_matrix(2.0), "B": sym_matrix(5.0)}, f=INV)
    assert r.verdict == PASS
    # scalar geometric HH ordering of 1/x along the geodesic
    lhs, mid = 1 / math.sqrt(10), (0.5 - 0.2) / math.log(2.5)
    assert r.links[0].slack == pytest.approx(mid - lhs, rel=1e-10)


def test_scalar_hh_square():
    bd = Bindings(a=1.0, b=2.0, f=catalogue_fn("square"))
    assert evaluate_term("int_a^b f(x) dx", bd) == pytest.approx(7 / 3, abs=1e-12)
    assert evaluate_term("(b-a) f((a+b)/2)", bd) == pytest.approx(2.25, abs=1e-12)
    assert evaluate_term("(b-a) (f(a)+f(b))/2", bd) == pytest.approx(2.5, abs=1e-12)


def test_norm_cor_last_term():
    bd = Bindings(A=diag(1, 2), B=diag(4, 8))
    assert evaluate_term("(sqrt(||A|| ||B||) + ||B||)/2", bd) == pytest.approx((4 + 8) / 2)
    assert get_chain("norm-cor").terms[-1] == "(sqrt(||A|| ||B||) + ||B||)/2"


def test_nu_limit_profile_shape():
    a, b = diag(2, 3), diag(1, 1.5)
    prof = nu_limit_profile(INV, a, b, [0.45, 0.49, 0.51, 0.55])
    assert set(prof) == {0.45, 0.49, 0.51, 0.55}
    # commuting inputs: all distances shrink towards the midpoint
    assert all(d49 < d45 for d49, d45 in zip(prof[0.49], prof[0.45]))
    with pytest.raises(ValueError):
        nu_limit_profile(INV, a, b, [0.5])


def test_every_term_has_unique_label():
    assert len(TERMS) == len(set(TERMS))
