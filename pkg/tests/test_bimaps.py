"""Unit tests for bilinear maps, identity residuals and families."""

import json
from fractions import Fraction

import pytest

from lcalab import (
    BilinearMap,
    FamilyError,
    MapError,
    TAGS,
    load_map,
    make_catalog,
    make_family,
    map_eval,
    map_from_dict,
    map_to_dict,
    normalize_tags,
    residual,
    verify_map,
)
from lcalab.poly import B, D, L, M, Var

from randgen import make_rng, random_fraction, random_poly


def raw_g_map(clw):
    """phi(L,L) = (d+2l)G on a CLW(m=1) algebra, built from a raw table."""
    lg, gg = clw.gen("L", 0), clw.gen("G", 0)
    return BilinearMap(clw, {(lg, lg): clw.element({gg: D + 2 * L})})


# -- evaluation ---------------------------------------------------------------

def test_map_eval_inner_on_generators():
    vir = make_catalog("vir")
    phi = make_family(vir, "inner", t=1)
    x = vir.gen_element(("L", 0))
    assert map_eval(phi, x, x) == vir.element({vir.gen("L", 0): D + 2 * L})


def test_map_eval_left_slot_rule():
    vir = make_catalog("vir")
    phi = make_family(vir, "inner", t=1)
    x = vir.gen_element(("L", 0))
    assert map_eval(phi, x * D, x) == vir.element({vir.gen("L", 0): -L * (D + 2 * L)})


def test_map_eval_zero_table():
    vir = make_catalog("vir")
    phi = BilinearMap.zero(vir)
    x = vir.gen_element(("L", 0))
    assert map_eval(phi, x, x).is_zero


def test_map_eval_mismatched_algebra():
    vir = make_catalog("vir")
    cw = make_catalog("cw", 2)
    phi = make_family(vir, "inner", t=1)
    with pytest.raises(MapError, match="mismatched"):
        map_eval(phi, cw.gen_element(("L", 0)), cw.gen_element(("L", 0)))


def test_table_rejects_spectral_coefficients():
    vir = make_catalog("vir")
    gid = vir.gen("L", 0)
    with pytest.raises(MapError, match="only d, l, b"):
        BilinearMap(vir, {(gid, gid): vir.element({gid: D + M})})


# -- residuals ------------------------------------------------------------------

def test_inner_map_def1b_residual_zero():
    vir = make_catalog("vir")
    phi = make_family(vir, "inner", t=1)
    gid = vir.gen("L", 0)
    assert residual(phi, "def1b", (gid, gid, gid)).is_zero


def test_cw_shift_lem2_residual_zero():
    cw = make_catalog("cw", 3)
    phi = make_family(cw, "cw_shift", shift=1, a=1)
    gens = cw.generators()
    assert residual(phi, "lem2", (gens[0], gens[1], gens[2], gens[0])).is_zero


def test_negative_control_def1b_obstruction():
    # The raw g-component map fails the Leibniz rule away from b = -1; its
    # residual carries the (b+1) factor seen by matching coefficients.
    gid_args = None
    for b, expected_zero in ((0, False), (-1, True)):
        clw = make_catalog("clw", 1, b)
        phi = raw_g_map(clw)
        gid = clw.gen("L", 0)
        gid_args = (gid, gid, gid)
        r = residual(phi, "def1b", gid_args)
        assert r.is_zero == expected_zero
        if not expected_zero:
            # hand expansion: l*(d + l + 2m) on G:0
            assert r.value == clw.element({clw.gen("G", 0): L * (D + L + 2 * M)})

    clw = make_catalog("clw", 1)  # symbolic b
    r = residual(raw_g_map(clw), "def1b", gid_args)
    assert r.value == clw.element({clw.gen("G", 0): (B + 1) * L * (D + L + 2 * M)})


def test_negative_control_fails_lem1_too():
    # def1b and lem1 are equivalent forms, so the bad map fails both.
    clw = make_catalog("clw", 1, 0)
    phi = raw_g_map(clw)
    assert not verify_map(phi, ["def1b"]).passed
    assert not verify_map(phi, ["lem1"]).passed
    assert verify_map(phi, ["def1a"]).passed


def test_residual_arity_and_tag_validation():
    vir = make_catalog("vir")
    phi = make_family(vir, "inner", t=1)
    gid = vir.gen("L", 0)
    with pytest.raises(MapError, match="takes 3"):
        residual(phi, "def1b", (gid, gid))
    with pytest.raises(MapError, match="unknown identity"):
        residual(phi, "jacobi", (gid, gid))
    with pytest.raises(MapError):
        normalize_tags(["def1a", "nope"])


def test_residual_linearity():
    rng = make_rng(20)
    clw = make_catalog("clw", 2, 0)
    gens = clw.generators()

    def random_map():
        table = {}
        for gi in gens:
            for gj in gens:
                terms = {}
                for gt in rng.sample(gens, k=rng.randint(0, 1)):
                    terms[gt] = random_poly(rng, max_terms=2, max_exp=1,
                                            variables=(Var.D, Var.L))
                if terms:
                    table[(gi, gj)] = clw.element(terms)
        return BilinearMap(clw, table)

    arity = {"def1a": 2, "def1b": 3, "lem1": 3, "lem2": 4}
    for _ in range(60):
        phi, psi = random_map(), random_map()
        alpha = random_fraction(rng)
        combo = alpha * phi + psi
        for tag in TAGS:
            args = tuple(rng.choice(gens) for _ in range(arity[tag]))
            lhs = residual(combo, tag, args).value
            rhs = alpha * residual(phi, tag, args).value + residual(psi, tag, args).value
            assert lhs == rhs


# -- families --------------------------------------------------------------------

def test_inner_family_table():
    vir = make_catalog("vir")
    phi = make_family(vir, "inner", t=1)
    gid = vir.gen("L", 0)
    assert phi.table == {(gid, gid): vir.element({gid: D + 2 * L})}


def test_cw_shift_zero_is_inner():
    vir = make_catalog("vir")
    assert make_family(vir, "cw_shift", shift=0, a=1) == make_family(vir, "inner", t=1)


def test_cw_shift_targets():
    cw = make_catalog("cw", 3)
    phi = make_family(cw, "cw_shift", shift=2, a=Fraction(1, 2))
    value = phi.entry(cw.gen("L", 1), cw.gen("L", 1))
    assert value == cw.element({cw.gen("L", 1): Fraction(1, 2) * (D + 2 * L)})


def test_clw_shift_mixed_family_passes_everything():
    clw = make_catalog("clw", 2, -1)
    phi = make_family(clw, "clw_shift", shift=1, a=1, g=1)
    assert verify_map(phi, TAGS).passed


def test_clw_shift_g_guard():
    with pytest.raises(FamilyError, match="b = -1"):
        make_family(make_catalog("clw", 1, 0), "clw_shift", a=1, g=1)
    with pytest.raises(FamilyError, match="b = -1"):
        make_family(make_catalog("clw", 1), "clw_shift", a=1, g=1)  # symbolic b
    # g = 0 is fine anywhere
    make_family(make_catalog("clw", 1, 0), "clw_shift", a=1, g=0)


def test_family_kind_validation():
    vir = make_catalog("vir")
    clw = make_catalog("clw", 2)
    with pytest.raises(FamilyError):
        make_family(vir, "clw_shift")
    with pytest.raises(FamilyError):
        make_family(clw, "cw_shift")
    with pytest.raises(FamilyError, match="unknown family kind"):
        make_family(vir, "outer")


def test_families_skew_coherent_symbolic():
    # make_family outputs satisfy skew-symmetry identically, b included.
    clw = make_catalog("clw", 2)
    for s in range(2):
        phi = make_family(clw, "clw_shift", shift=s, a=1, g=0)
        assert verify_map(phi, ["def1a"]).passed
    phi = make_family(clw, "inner", t=Fraction(-5, 3))
    assert verify_map(phi, ["def1a"]).passed


def test_verify_map_shift_families_cw2():
    cw = make_catalog("cw", 2)
    for s in range(2):
        phi = make_family(cw, "cw_shift", shift=s, a=1)
        report = verify_map(phi, ["def1a", "def1b"])
        assert report.passed
        assert report.checked == 4 + 8


def test_verify_zero_map_all_tags():
    clw = make_catalog("clw", 1, 0)
    report = verify_map(BilinearMap.zero(clw), TAGS)
    assert report.passed


def test_verify_report_contents():
    clw = make_catalog("clw", 1, 0)
    report = verify_map(raw_g_map(clw), TAGS)
    assert not report.passed
    data = report.to_json()
    assert data["passed"] is False
    assert any("def1b" == f["tag"] for f in data["failures"])
    # nonzero residuals carry their canonical polynomial string
    assert all("*G:0" in f["residual"] for f in data["failures"])
    assert "FAIL" in report.to_text()


# -- map files ----------------------------------------------------------------------

def test_map_round_trip():
    clw = make_catalog("clw", 2, -1)
    phi = make_family(clw, "clw_shift", shift=1, a=1, g=1)
    assert map_from_dict(map_to_dict(phi), clw) == phi


def test_map_file_round_trip(tmp_path):
    cw = make_catalog("cw", 2)
    phi = make_family(cw, "cw_shift", shift=1, a=Fraction(2, 3))
    path = tmp_path / "phi.json"
    path.write_text(json.dumps(map_to_dict(phi)))
    assert load_map(path, cw) == phi


def test_map_wrong_algebra_name():
    vir = make_catalog("vir")
    cw = make_catalog("cw", 2)
    data = map_to_dict(make_family(vir, "inner", t=1))
    with pytest.raises(MapError, match="is for algebra"):
        map_from_dict(data, cw)


def test_map_bad_entries():
    vir = make_catalog("vir")
    gid = "L:0"
    base = {"algebra": "Vir", "entries": [
        {"left": gid, "right": gid, "value": [{"gen": gid, "coeff": "d + 2*l"}]}]}
    ok = map_from_dict(base, vir)
    assert not ok.is_zero

    bad = json.loads(json.dumps(base))
    bad["entries"][0]["value"][0]["coeff"] = "d + 2*m"
    with pytest.raises(MapError, match="only d, l, b"):
        map_from_dict(bad, vir)

    bad = json.loads(json.dumps(base))
    bad["entries"][0]["left"] = "X:0"
    with pytest.raises(MapError, match="unknown family"):
        map_from_dict(bad, vir)

    bad = json.loads(json.dumps(base))
    bad["entries"].append(bad["entries"][0])
    with pytest.raises(MapError, match="duplicate"):
        map_from_dict(bad, vir)
