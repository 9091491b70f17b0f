import json
from fractions import Fraction

import pytest
from mpmath import acos, mpf
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import claim_margins
from spherepart import jsonio
from spherepart.interval import inflated
from spherepart.verifier import (CERTIFIED, CLAIM_MAP, CLAIMS, FAILED, UNDECIDED, ProofReport,
                                 topological_order, verify_all, verify_claim)

ORACLE = {k: float(v) for k, v in claim_margins().items()}


def test_all_claims_certified():
    report = verify_all()
    assert report.certified
    assert [r.status for r in report.results] == [CERTIFIED] * 16


@pytest.mark.parametrize("cid", sorted(ORACLE, key=lambda c: int(c[1:])))
def test_margin_matches_oracle(cid):
    r = verify_all()[cid]
    # rigorous margins are lower bounds that are tight to rounding level
    assert r.margin <= ORACLE[cid] + 1e-15
    assert r.margin == pytest.approx(ORACLE[cid], abs=1e-12)


def test_tight_margins_in_expected_ranges():
    report = verify_all()
    assert 5e-5 < report["C9"].margin < 2e-4
    assert 1e-4 < report["C16"].margin < 5e-4
    assert 3e-3 < report["C3"].margin < 1e-2


def test_order_respects_dependencies():
    order = topological_order()
    pos = {c: i for i, c in enumerate(order)}
    for c in CLAIMS:
        for d in c.depends_on:
            assert pos[d] < pos[c.id]
    assert sorted(order) == sorted(CLAIM_MAP)


def test_single_claim_pulls_in_dependencies():
    report = verify_all(claims=["C9"])
    assert {r.id for r in report.results} == {"C2", "C3", "C4", "C5", "C6", "C7", "C9"}
    assert verify_claim("C9").status == CERTIFIED
    with pytest.raises(KeyError):
        verify_claim("C99")


def test_perturbed_constant_fails_and_blocks_dependents():
    report = verify_all({"tetra_upper": "11.46"})
    assert report["C3"].status == FAILED
    assert report["C4"].status == UNDECIDED
    assert report["C16"].status == UNDECIDED
    assert "C4" in report["C6"].note
    for cid in ("C1", "C2", "C5", "C7"):
        assert report[cid].status == CERTIFIED
    assert not report.certified


def test_unknown_constant_rejected():
    with pytest.raises(KeyError):
        verify_all({"nonsense": "1"})


@settings(max_examples=25)
@given(st.fractions(Fraction("11.40"), Fraction("11.50")))
def test_status_tracks_true_sign_of_c3(upper):
    # the oracle decides the truth; the verifier may say undecided, never the opposite
    r = verify_all({"tetra_upper": upper}, claims=["C3"])["C3"]
    exact_gap = mpf(upper.numerator) / upper.denominator - 6 * acos(mpf(-1) / 3)
    if r.status == CERTIFIED:
        assert exact_gap > 0
    if r.status == FAILED:
        assert exact_gap < 0
    if abs(exact_gap) > 1e-12:
        assert r.status != UNDECIDED


@pytest.mark.parametrize("width", [1e-14, 1e-10, 1e-6, 1e-4, 1e-3])
def test_inflation_never_certifies_falsely(width):
    base = verify_all()
    with inflated(width):
        wide = verify_all()
    for b, w in zip(base.results, wide.results):
        assert w.status in (CERTIFIED, UNDECIDED)
        if w.status == CERTIFIED:
            assert w.margin <= b.margin
    if width >= 1e-3:
        for cid in ("C9", "C12", "C16"):
            assert wide[cid].status == UNDECIDED


@pytest.mark.parametrize("constants", [{}, {"tetra_upper": "11.4638"}, {"tetra_upper": "11.46"}])
def test_widening_never_promotes_a_claim(constants):
    prev = None
    for width in (0.0, 1e-15, 1e-12, 1e-9, 1e-6, 1e-4, 1e-3, 1e-2):
        with inflated(width):
            report = verify_all(constants)
        status = {r.id: r.status for r in report.results}
        if prev is not None:
            for cid, st_ in status.items():
                assert not (prev[cid] != CERTIFIED and st_ == CERTIFIED), (cid, width)
        prev = status


def test_inflated_perturbation_is_still_not_certified():
    with inflated(1e-3):
        report = verify_all({"tetra_upper": "11.46"})
    assert report["C3"].status in (FAILED, UNDECIDED)


def test_workers_give_identical_reports():
    one = jsonio.dumps(verify_all(workers=1).to_json())
    four = jsonio.dumps(verify_all(workers=4).to_json())
    assert one == four


def test_report_json_shape():
    doc = json.loads(jsonio.dumps(verify_all().to_json()))
    assert doc["summary"] == "16/16 certified"
    assert doc["header"]["pi_width"] > 0
    assert "round" in doc["header"]["rounding_mode"]
    c9 = next(c for c in doc["claims"] if c["id"] == "C9")
    assert c9["depends_on"] == ["C6", "C7"]
    assert c9["status"] == "certified"


def test_report_lookup():
    report = verify_all()
    assert isinstance(report, ProofReport)
    with pytest.raises(KeyError):
        report["C0"]
