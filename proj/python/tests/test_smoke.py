import math

import pytest

import mdtube


def test_exponential_law_round_trip():
    law = mdtube.DiffusionLaw.exponential(0.5, 3.0)
    for u in (-0.5, 0.2, 0.9, 1.4):
        assert law.inverse_transform(law.transform(u)) == pytest.approx(u, abs=1e-10)
    assert law(1.0) == pytest.approx(0.5)


def test_vgm_soil_pressure():
    law = mdtube.DiffusionLaw.van_genuchten_mualem()
    assert law(77665.0) > law(-5e5)
    cfg = mdtube.Config.default("root_soil")
    assert "soil_pressure = auto" in cfg.to_ini()
    assert mdtube.soil_pressure(cfg) == pytest.approx(77665.0, abs=1.0)


def test_single_tube_is_logarithmic_outside_the_kernel():
    law = mdtube.DiffusionLaw.constant(1.0)
    sol = mdtube.SingleTubeSolution(law)
    expected = sol.psi(0.1) - sol.q / (2 * math.pi) * math.log(0.5 / 0.1)
    assert sol.psi(0.5) == pytest.approx(expected, abs=1e-13)


def test_multi_tube_residuals_and_json():
    tubes = [
        mdtube.TubeSpec(-0.5, -0.5, 0.2, 0.4, 1.0, 0.3),
        mdtube.TubeSpec(0.5, -0.5, 0.15, 0.3, 1.0, 0.2),
    ]
    sol = mdtube.solve_multi_tube(tubes, mdtube.DiffusionLaw.exponential(0.5, 1.0), tilde=True)
    assert max(abs(r) for r in sol.residuals()) < 1e-8
    assert '"variant"' in sol.to_json()


def test_overlapping_tubes_raise():
    tubes = [mdtube.TubeSpec(0, 0, 0.2, 0.4, 1, 0.3), mdtube.TubeSpec(0.3, 0, 0.2, 0.4, 1, 0.2)]
    with pytest.raises(mdtube.DomainError):
        mdtube.solve_multi_tube(tubes, mdtube.DiffusionLaw.constant(1.0))


def test_config_round_trip_and_errors():
    for kind in ("single_tube", "parallel_tubes", "kernel_radius_study", "delta_study", "root_soil"):
        cfg = mdtube.Config.default(kind)
        assert mdtube.Config.parse(cfg.to_ini()) == cfg
        assert cfg.kind == kind
    with pytest.raises(mdtube.ConfigError, match="case.ini:3"):
        mdtube.Config.parse("[scenario]\nkind = single_tube\nbogus = 1\n", "case.ini")


def test_small_run_and_outputs(tmp_path):
    cfg = mdtube.with_overrides(mdtube.Config.default("single_tube"), grid={"levels": 3}, study={"k_values": [1.0]})
    result = mdtube.run(cfg)
    rows = result.errors
    assert [r["level"] for r in rows] == [0, 1, 2]
    assert all(r["E"][2] > 0 for r in rows)
    written = result.write(tmp_path)
    header = (tmp_path / "errors.csv").read_text().splitlines()[0]
    assert header.startswith("schema,study,")
    assert {p.name for p in written} >= {"errors.csv", "config.ini"}
    assert mdtube.Config.load(str(tmp_path / "config.ini")) == cfg


def test_verify_property_suite():
    (res,) = mdtube.verify([7])
    assert res.id == 7 and res.passed, str(res)
