"""Certificate verification: PSD checks, expansion, the bundled certificate."""

import json
import random
from dataclasses import replace
from fractions import Fraction

import pytest

from flagsos import (
    Certificate,
    SOSBlock,
    bundled_certificate,
    canonical_form,
    check_psd,
    complete_graph,
    cycle,
    disjoint_union,
    enumerate_models,
    eval_blowup,
    expand_lhs,
    flag_fj,
    from_graph6,
    graph_element,
    identify_linear_graphs,
    lift,
    load_certificate,
    path,
    phi_blowup_density,
    save_certificate,
    sigma_type,
    to_graph6,
    unit,
    verify,
)

import oracles

# exact expansion coefficients of the strict models, frozen from a
# brute-force reference computation
BELOW_BOUND = {
    "D@O": Fraction(11808, 5),     # two disjoint edges plus a vertex
    "D@o": Fraction(70903, 30),    # path P3 plus an edge
    "DBg": Fraction(-24073, 20),   # path P5
}


def rational_matrix(rows):
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


class TestCheckPSD:
    def test_simple_cases(self):
        assert check_psd(rational_matrix([[1, 0], [0, 1]]))
        assert check_psd(rational_matrix([[0, 0], [0, 0]]))
        assert check_psd(rational_matrix([[2, 1], [1, 2]]))
        assert not check_psd(rational_matrix([[1, 2], [2, 1]]))
        assert not check_psd(rational_matrix([[-1]]))
        assert not check_psd(rational_matrix([[0, 1], [1, 0]]))
        assert check_psd(())

    def test_zero_pivot_semidefinite(self):
        # rank-1 Gram matrix of (1, 1) plus an all-zero row
        m = rational_matrix([[1, 1, 0], [1, 1, 0], [0, 0, 0]])
        assert check_psd(m)

    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError, match="square"):
            check_psd(rational_matrix([[1, 0]]))
        with pytest.raises(ValueError, match="symmetric"):
            check_psd(rational_matrix([[1, 2], [3, 1]]))

    def test_matches_principal_minor_criterion(self):
        rng = random.Random(61)
        for _ in range(120):
            d = rng.randrange(1, 4)
            m = [[Fraction(0)] * d for _ in range(d)]
            for i in range(d):
                for j in range(i, d):
                    q = Fraction(rng.randrange(-4, 5), rng.randrange(1, 4))
                    m[i][j] = m[j][i] = q
            m = rational_matrix(m)
            assert check_psd(m) == oracles.psd_by_minors(m)

    def test_gram_matrices_pass(self):
        rng = random.Random(67)
        for _ in range(40):
            d, r = rng.randrange(1, 5), rng.randrange(1, 4)
            vecs = [
                [Fraction(rng.randrange(-5, 6), rng.randrange(1, 4)) for _ in range(r)]
                for _ in range(d)
            ]
            gram = rational_matrix(
                [[sum(a * b for a, b in zip(u, v)) for v in vecs] for u in vecs]
            )
            assert check_psd(gram)


class TestSOSBlock:
    def test_validation(self):
        s0 = sigma_type(0)
        vec = (flag_fj(s0, 1), flag_fj(s0, 2))
        good = rational_matrix([[2, 1], [1, 2]])
        block = SOSBlock(s0, vec, good)
        assert block.expansion_size() == 5
        with pytest.raises(ValueError, match="shape"):
            SOSBlock(s0, vec, rational_matrix([[1]]))
        with pytest.raises(ValueError, match="symmetric"):
            SOSBlock(s0, vec, rational_matrix([[1, 2], [0, 1]]))
        with pytest.raises(ValueError, match="type"):
            SOSBlock(sigma_type(1), vec, good)

    def test_quadratic_form_expands_square(self):
        # g^T M g with M = I is g1*g1 + g2*g2
        s0 = sigma_type(0)
        vec = (flag_fj(s0, 1), flag_fj(s0, 2))
        block = SOSBlock(s0, vec, rational_matrix([[1, 0], [0, 1]]))
        direct = vec[0] * vec[0] + vec[1] * vec[1]
        assert block.quadratic_form() == direct

    def test_quadratic_form_cross_terms(self):
        s0 = sigma_type(0)
        vec = (flag_fj(s0, 1), flag_fj(s0, 2))
        block = SOSBlock(s0, vec, rational_matrix([[0, 3], [3, 0]]))
        direct = (vec[0] * vec[1]).scale(6)
        assert block.quadratic_form() == direct


class TestBundledCertificate:
    def test_structure(self):
        cert = bundled_certificate()
        assert cert.level == 5
        assert cert.bound == 2400
        assert cert.target_graph == canonical_form(cycle(5))
        assert cert.target_coefficient == 62500
        assert len(cert.sos_blocks) == 6
        assert len(cert.linear_terms) == 2
        linear = {to_graph6(g): c for g, c in cert.linear_terms}
        assert linear == {"DBg": Fraction(1097, 12), "D@S": Fraction(68, 3)}

    def test_verifies(self):
        report = verify(bundled_certificate())
        assert report.passed
        assert report.psd_ok and all(report.psd_results)
        assert len(report.psd_results) == 6
        assert report.max_coefficient == 2400
        assert report.derived_bound == Fraction(24, 625)
        assert all(s >= 0 for _, s in report.slacks)

    def test_expansion_coefficients(self):
        coeffs = expand_lhs(bundled_certificate())
        named = {to_graph6(g): c for g, c in coeffs.items()}
        assert len(named) == 14
        at_bound = {g6 for g6, c in named.items() if c == 2400}
        below = {g6: c for g6, c in named.items() if c < 2400}
        assert len(at_bound) == 11
        assert below == BELOW_BOUND
        # the bound is tight: the pentagon itself sits at it
        assert named[to_graph6(canonical_form(cycle(5)))] == 2400

    def test_sos_blocks_vanish_on_pentagon(self):
        # equality at the extremum forces every square to evaluate to zero
        cert = bundled_certificate()
        c5 = cycle(5)
        from flagsos import average

        for block in cert.sos_blocks:
            avg = average(block.quadratic_form())
            assert eval_blowup(avg, c5) == 0

    def test_linear_graphs_vanish_on_pentagon(self):
        cert = bundled_certificate()
        for g, _ in cert.linear_terms:
            assert phi_blowup_density(g, cycle(5)) == 0

    def test_workers_deterministic(self):
        r1 = verify(bundled_certificate(), workers=1)
        r4 = verify(bundled_certificate(), workers=4)
        assert r1 == r4


class TestTampering:
    def test_tighter_bound_fails(self):
        cert = replace(bundled_certificate(), bound=Fraction(2399))
        report = verify(cert)
        assert not report.passed
        assert report.psd_ok
        assert any(s < 0 for _, s in report.slacks)

    def test_inflated_linear_coefficient_fails(self):
        cert = bundled_certificate()
        bumped = tuple(
            (g, c + Fraction(1, 3) if to_graph6(g) == "D@S" else c)
            for g, c in cert.linear_terms
        )
        report = verify(replace(cert, linear_terms=bumped))
        assert not report.passed

    def test_indefinite_matrix_fails_psd(self):
        cert = bundled_certificate()
        blocks = list(cert.sos_blocks)
        flipped = replace(
            blocks[-1],
            matrix=tuple(tuple(-x for x in row) for row in blocks[-1].matrix),
        )
        report = verify(replace(cert, sos_blocks=tuple(blocks[:-1]) + (flipped,)))
        assert not report.psd_ok
        assert not report.passed

    def test_expansion_level_guard(self):
        cert = replace(bundled_certificate(), level=4)
        with pytest.raises(ValueError, match="beyond level"):
            expand_lhs(cert)


class TestCertificateValidation:
    def test_rejects_triangles(self):
        with pytest.raises(ValueError, match="triangle"):
            Certificate(
                level=3,
                bound=Fraction(1),
                target_graph=complete_graph(3),
                target_coefficient=Fraction(1),
                linear_terms=(),
                sos_blocks=(),
            )

    def test_rejects_nonpositive_target(self):
        with pytest.raises(ValueError, match="positive"):
            Certificate(
                level=3,
                bound=Fraction(1),
                target_graph=cycle(5),
                target_coefficient=Fraction(0),
                linear_terms=(),
                sos_blocks=(),
            )


class TestSoundness:
    def test_expansion_bounds_every_small_model(self):
        # the certificate identity evaluated at any triangle-free graph
        # stays under the bound, hence pins the pentagon density
        coeffs = expand_lhs(bundled_certificate())
        for n in range(1, 7):
            for g in enumerate_models(n):
                total = sum(
                    c * phi_blowup_density(h, g) for h, c in coeffs.items()
                )
                assert total <= 2400
                assert phi_blowup_density(cycle(5), g) <= Fraction(24, 625)


class TestIdentification:
    def test_report(self):
        report = identify_linear_graphs()
        assert report.accepted == ("DBg", "D@S")
        assert report.confirmed
        assert report.structural_first == ("DBg",)
        assert report.structural_second == ("D@S",)
        assert ("DBg", "D@S") in report.verify_passing
        for first, _ in report.verify_passing:
            assert first == "DBg"


class TestSerialization:
    def test_round_trip(self):
        cert = bundled_certificate()
        data = save_certificate(cert)
        assert load_certificate(data) == cert
        assert load_certificate(data.decode()) == cert

    def test_bundled_asset_matches(self):
        from importlib import resources

        raw = resources.files("flagsos.data").joinpath("pentagon.json").read_bytes()
        assert load_certificate(raw) == bundled_certificate()

    def test_file_is_stable_json(self):
        data = save_certificate(bundled_certificate())
        obj = json.loads(data)
        assert obj["theory"] == "triangle-free"
        assert save_certificate(load_certificate(data)) == data

    def test_diagnostics_are_distinct(self):
        good = save_certificate(bundled_certificate())
        obj = json.loads(good)

        with pytest.raises(ValueError, match="not valid JSON|malformed certificate"):
            load_certificate(good[: len(good) // 2])

        bad = dict(obj)
        bad["theory"] = "planar"
        with pytest.raises(ValueError, match="unsupported theory"):
            load_certificate(json.dumps(bad))

        bad = json.loads(good)
        del bad["bound"]
        with pytest.raises(ValueError, match="missing or bad field"):
            load_certificate(json.dumps(bad))

        bad = json.loads(good)
        bad["linear_terms"][0]["coefficient"] = "1/0"
        with pytest.raises(ValueError, match="malformed rational"):
            load_certificate(json.dumps(bad))

        bad = json.loads(good)
        m = bad["sos_blocks"][0]["matrix"]
        m[0][1] = "999"
        with pytest.raises(ValueError, match="symmetric"):
            load_certificate(json.dumps(bad))

    def test_rejects_triangle_graphs(self):
        good = save_certificate(bundled_certificate())
        bad = json.loads(good)
        bad["target"]["graph6"] = to_graph6(complete_graph(3))
        with pytest.raises(ValueError, match="triangle"):
            load_certificate(json.dumps(bad))
