import numpy as np

from doctrines import fixtures
from doctrines.fincat import (Cone, FinCat, FunctorData, WindowScope,
                              check_equivalence, check_exact,
                              enumerate_pullbacks, image_factorization,
                              is_iso, is_mono, is_regular_epi, iso_classes,
                              validate_category, validate_functor,
                              validate_products)




def test_validate_triv(triv):
    assert validate_category(triv.cat).ok


def test_validate_chain(chain):
    assert validate_category(chain.cat).ok


def test_wrong_source_composite_is_caught():
    # assign g∘f an arrow with the wrong source
    cat = FinCat.build(
        ["A", "B"],
        [("idA", "A", "A"), ("idB", "B", "B"), ("f", "A", "B"), ("g", "B", "B")],
        {"A": "idA", "B": "idB"},
        {("idA", "idA"): "idA", ("idB", "idB"): "idB",
         ("f", "idA"): "f", ("idB", "f"): "f",
         ("g", "f"): "g",  # wrong: source of g is B, should be A
         ("g", "idB"): "g", ("idB", "g"): "g", ("g", "g"): "g"})
    rep = validate_category(cat)
    assert not rep.ok
    assert rep.law == "AssociativityOrTyping"
    assert rep.witness == ("g", "f")


def test_products_triv_chain(triv, chain):
    assert validate_products(triv.cat, triv.products).ok
    assert validate_products(chain.cat, chain.products).ok


def test_products_fs2_against_set_oracle(fs2):
    """Chosen mediators are the set-theoretic tuple maps."""
    assert len(fs2.products.pairing) > 0
    C = fs2.cat
    # the mediator of the cone (pr1, pr2) is the identity of the product
    for (a, b), (p, p1, p2) in fs2.products.binary.items():
        i1, i2 = C.arr_index[p1], C.arr_index[p2]
        assert fs2.products.pairing[(i1, i2)] == int(C.id_arr[C.obj_index[p]])


def test_pullback_chain_is_meet(chain):
    C = chain.cat
    m = C.arr_index["m"]
    cones = enumerate_pullbacks(C, m, m)
    assert len(cones) == 1
    u = C.obj_index["u"]
    assert cones[0].apex == u
    assert cones[0].legs == (int(C.id_arr[u]), int(C.id_arr[u]))


def test_pullback_triv_identity(triv):
    C = triv.cat
    i = int(C.id_arr[0])
    cones = enumerate_pullbacks(C, i, i)
    assert len(cones) >= 1 and cones[0].apex == 0


def test_pullback_fs2_kernel_of_collapse(fs2):
    """Pulling the map 2 -> 1 back along itself gives the 4-element product
    with the two cartesian projections."""
    C = fs2.cat
    bang = [f for f in C.hom(C.obj_index["2"], C.obj_index["1"])][0]
    cones = enumerate_pullbacks(C, int(bang), int(bang))
    assert cones, "no pullback found"
    apexes = {C.objects[c.apex] for c in cones}
    assert "4" in apexes
    four = [c for c in cones if C.objects[c.apex] == "4"][0]
    p, p1, p2 = fs2.products.binary[("2", "2")]
    assert {C.arrows[four.legs[0]], C.arrows[four.legs[1]]} == {p1, p2}


def test_pullback_cones_pairwise_isomorphic(chain, fs2):
    """Any two limiting cones over the same cospan compare by a unique iso."""
    for P in (chain, fs2):
        C = P.cat
        seen = 0
        for f in range(min(C.n_arrows, 12)):
            for g in range(min(C.n_arrows, 12)):
                if int(C.tgt[f]) != int(C.tgt[g]):
                    continue
                cones = enumerate_pullbacks(C, f, g)
                seen += len(cones)
                for c1 in cones:
                    for c2 in cones:
                        med = [int(m) for m in C.hom(c1.apex, c2.apex)
                               if int(C.comp[c2.legs[0], int(m)]) == c1.legs[0]
                               and int(C.comp[c2.legs[1], int(m)]) == c1.legs[1]]
                        assert len(med) == 1
                        assert is_iso(C, med[0])
        assert seen > 0


def test_poset_arrows_all_mono_and_regular_epis_iso(chain):
    C = chain.cat
    for f in range(C.n_arrows):
        assert is_mono(C, f)
        if is_regular_epi(C, f):
            assert is_iso(C, f)


def test_factorization_poset_trivial(chain):
    C = chain.cat
    m = C.arr_index["m"]
    fact = image_factorization(C, m)
    assert fact is not None
    assert int(C.comp[fact.mono, fact.epi]) == m


def test_factorization_unavailable():
    C = fixtures.nofact_category()
    assert validate_category(C).ok
    f = C.arr_index["f"]
    assert not is_mono(C, f)
    assert not is_regular_epi(C, f)
    assert image_factorization(C, f) is None


def test_factorization_in_relation_completion(completions):
    """The quotient arrow from equality to the full relation on the
    2-carrier factors as a regular epi followed by an identity mono."""
    P, E, X, tp, er, q = completions["fs2"]
    C = tp.cat
    src = tp.obj_of[(P.cat.obj_index["2"],
                     P.fibers[P.window.prod(2, 2)[0]].index["s9"])]
    tgt = tp.obj_of[(P.cat.obj_index["2"],
                     P.fibers[P.window.prod(2, 2)[0]].index["s15"])]
    qarr = [int(a) for a in C.hom(src, tgt)]
    assert len(qarr) == 1
    # the arrow itself is a regular epi, so it factors with the identity mono
    assert is_regular_epi(C, qarr[0])
    assert is_mono(C, int(C.id_arr[tgt]))
    fact = image_factorization(C, qarr[0])
    assert fact is not None
    assert is_regular_epi(C, fact.epi) and is_mono(C, fact.mono)
    assert int(C.comp[fact.mono, fact.epi]) == qarr[0]
    # the found image lies in the target's isomorphism class
    classes = [{C.obj_index[o] for o in cl} for cl in iso_classes(C)]
    target_class = next(cl for cl in classes if tgt in cl)
    assert fact.image in target_class


def test_check_exact_chain_base(chain):
    v = check_exact(chain.cat)
    assert v.finitely_complete and v.regular and v.exact


def test_check_exact_vposet_counterexample():
    v = check_exact(fixtures.v_poset())
    assert not v.finitely_complete
    assert tuple(v.witness["finitely_complete"]) == ("a", "b")
    assert not v.regular and not v.exact


def test_check_exact_monotone(completions):
    for name in ("triv", "chain", "fs2"):
        P, E, X, tp, er, q = completions[name]
        v = check_exact(tp.cat, WindowScope(tp.scope.core))
        assert v.exact
        assert v.regular and v.finitely_complete  # monotone verdict


def test_equivalence_identity(triv):
    F = FunctorData(triv.cat, triv.cat, {"T": "T"}, {"idT": "idT"})
    assert validate_functor(F).ok
    eq = check_equivalence(F)
    assert eq.faithful and eq.full and eq.essentially_surjective


def test_equivalence_embedding_misses_object(chain):
    one = FinCat.build(["X"], [("idX", "X", "X")], {"X": "idX"},
                       {("idX", "idX"): "idX"})
    F = FunctorData(one, chain.cat, {"X": "u"}, {"idX": "idu"})
    assert validate_functor(F).ok
    eq = check_equivalence(F)
    assert not eq.essentially_surjective
    assert eq.witness["essentially_surjective"] == "v"


def test_iso_classes_relation_completion(completions):
    P, E, X, tp, er, q = completions["fs2"]
    classes = iso_classes(tp.cat)
    assert len(classes) == 3
    assert sorted(len(c) for c in classes) == [1, 3, 4]


def test_pairing_postcomposition(chain, fs2):
    """Every mediator postcomposes with the projections back to its cone."""
    for P in (chain, fs2):
        C = P.cat
        assert P.products.pairing
        for (f, g), m in P.products.pairing.items():
            a, b = int(C.tgt[f]), int(C.tgt[g])
            _, p1n, p2n = P.products.binary[(C.objects[a], C.objects[b])]
            p1, p2 = C.arr_index[p1n], C.arr_index[p2n]
            assert int(C.comp[p1, m]) == f
            assert int(C.comp[p2, m]) == g


def test_fs2_mediators_are_tuple_maps(fs2):
    """Set-theoretic oracle: the mediator of a cone into a cartesian product
    is the pointwise tuple map."""
    C = fs2.cat
    lk = fixtures.fs2_base()[3]
    vals = {C.arr_index[nm]: v for (a, b, v), nm in lk.items()}
    checked = 0
    for (f, g), m in list(fs2.products.pairing.items())[::7]:
        a, b = int(C.tgt[f]), int(C.tgt[g])
        pn, p1n, p2n = fs2.products.binary[(C.objects[a], C.objects[b])]
        sb = int(C.objects[b])
        if int(C.objects[a]) == 0 or sb == 0:
            continue
        fn, gn, mn = vals[f], vals[g], vals[m]
        # decode against the chosen projections rather than guessing layout
        p1, p2 = C.arr_index[p1n], C.arr_index[p2n]
        pr1v, pr2v = vals[p1], vals[p2]
        for z in range(len(mn)):
            assert pr1v[mn[z]] == fn[z]
            assert pr2v[mn[z]] == gn[z]
        checked += 1
    assert checked > 20


def test_window_closure_violation_is_reported(chain):
    from doctrines.fincat import ProductChoice, Window, WindowScope, validate_products
    pc = ProductChoice("v", dict(chain.products.binary))
    del pc.binary[("v", "v")]
    assert validate_products(chain.cat, pc).ok
    win = Window(chain.cat, pc, WindowScope(("u", "v")))
    missing = win.check_closure()
    assert ("v", "v") in missing
