from hypothesis import given, settings, strategies as st

from cubicdyn.orbitspec import CYCLE, canonical_orbit_data, cyc, ident, transp
from cubicdyn.polylab import IntPoly, cyclotomic_split, reverse
from cubicdyn.realhomology import (
    audit_report, charpoly_inverse, charpoly_real, check_33n_identity, coxeter_quotient_holds,
    entropy_status, export_csv, growth_class, interior_sign, line_on_cubic, phi_33n, real_action_matrix,
    real_line_class, real_spectral_summary, verify_appendix_phi,
)
from cubicdyn.realization import marked_config, realizability
from cubicdyn.orbitspec import charpoly_complex

REALIZABLE = [od for od in canonical_orbit_data(16) if realizability(od).realizable]


def test_matrix_entries_are_small_integers():
    M = real_action_matrix(ident(2, 4, 5))
    assert M.size == 11
    assert all(x in (-1, 0, 1, 2, -2) for r in M.matrix for x in r)


def test_interior_signs_are_units():
    cfg = marked_config(cyc(1, 1, 8))
    assert {interior_sign(3, j, cfg) for j in range(1, 8)} <= {1, -1}


def test_line_class_is_signed_indicator():
    cfg = marked_config(ident(2, 4, 5))
    line = line_on_cubic(1, cfg, "-")
    cls = real_line_class(line, cfg)
    assert len(cls) == 11 and set(cls) <= {-1, 0, 1}


@settings(max_examples=30)
@given(st.sampled_from(REALIZABLE))
def test_reciprocity(od):
    chi_r = charpoly_real(od)
    assert chi_r == charpoly_inverse(od)
    assert reverse(chi_r) == chi_r or reverse(chi_r) == -chi_r


@settings(max_examples=30)
@given(st.sampled_from(REALIZABLE))
def test_real_radius_bounded_by_delta(od):
    s = real_spectral_summary(od)
    d = float(marked_config(od).ctx.root.mp(20))
    assert s.rho_r <= d + 1e-9


def test_2nn_differs_by_t_minus_one():
    for n in range(4, 13):
        od = cyc(2, n, n)
        q, r = charpoly_complex(od).divmod(charpoly_real(od))
        assert r.is_zero() and q == IntPoly([-1, 1])


def test_33n_identity_and_root_bound():
    for n in range(4, 21):
        assert check_33n_identity(n)
        assert phi_33n(n).degree == n + 6


def test_coxeter_quotient_is_sign_twisted():
    # the exact relation is chi_R(t)(t+1) = -chi(-t), not (t-1)chi_R = chi
    for n in range(8, 21):
        od = cyc(1, 1, n)
        assert not coxeter_quotient_holds(n)
        lhs = charpoly_real(od) * IntPoly([1, 1])
        rhs = charpoly_complex(od).compose_neg()
        assert lhs == rhs or lhs == -rhs


def test_245_real_residual():
    chi_r = charpoly_real(ident(2, 4, 5))
    split = cyclotomic_split(chi_r)
    s = IntPoly([1, 0, 0, -1, -1, -1, 0, 0, 1])
    assert split.residual.normalized() == s.compose_neg().normalized()
    assert chi_r == (IntPoly([-1, 1]) * IntPoly([1, 0, 1]) * s.compose_neg()).normalized()


def test_growth_classes():
    assert str(growth_class(cyc(1, 4, 8))) == "periodic(180)"
    assert growth_class(cyc(1, 3, 9)).kind == "polynomial"
    assert growth_class(cyc(1, 3, 9)).degree == 1
    assert growth_class(cyc(1, 1, 8)).kind == "exponential"


def test_entropy_status():
    assert entropy_status(cyc(1, 1, 8)) == "homology_maximal"
    assert entropy_status(ident(2, 4, 5)) == "homology_maximal"
    assert entropy_status(cyc(1, 1, 7)) == "no_delta"


def test_phi_audit_cyclic_and_ids():
    assert verify_appendix_phi(cyc(1, 1, 8)).status == "match"
    assert verify_appendix_phi(cyc(4, 4, 4)).status == "not_realizable"
    rep = audit_report([od for od in canonical_orbit_data(12) if od.sigma == CYCLE])
    assert not rep.findings()
    a = verify_appendix_phi(transp(1, 4, 6))
    assert a.status in ("match", "mismatch")
    assert a.to_dict()["orbit_data"] == "1,4,6:12"


def test_export_csv_header():
    text = export_csv([cyc(1, 1, 8), cyc(1, 1, 7)])
    lines = text.splitlines()
    assert lines[0] == "orbit_data,delta,rho_R,growth,status"
    assert lines[1].startswith("\"1,1,8:123\"") and lines[2].endswith("no_delta")
