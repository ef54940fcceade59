import math

import numpy as np
import pytest

from nuanneal.config import ConfigError, load_config, resolve_config
from nuanneal.hamiltonians import Species, Statistics


def minimal(**extra):
    raw = {"system": {"n_modes": 2, "nf": 3}}
    raw.update(extra)
    return raw


class TestResolveConfig:
    def test_minimal_config_uses_reference_defaults(self):
        cfg = resolve_config(minimal())
        spec = cfg.spec
        assert spec.nf == 3 and spec.n_modes == 2
        assert spec.coupling_k == 1.75e-12
        assert spec.pmns.theta12 == 0.591667
        assert spec.statistics is Statistics.DIRAC
        assert all(s is Species.NEUTRINO for s in spec.species)
        # two modes default to the head-on pair angle
        assert spec.angles[0, 1] == pytest.approx(math.pi / 4)
        # one-body coefficients from the mass splittings at 10 MeV
        assert spec.b_vector[0][2] == pytest.approx(-1.855e-12, rel=1e-12)

    def test_four_modes_default_to_anisotropic_angles(self):
        cfg = resolve_config({"system": {"n_modes": 4, "nf": 3}})
        assert cfg.spec.angles[0, 3] == pytest.approx(math.acos(0.9))

    def test_explicit_angle_matrix(self):
        angles = [[0.0, 0.2], [0.2, 0.0]]
        cfg = resolve_config({"system": {"n_modes": 2, "nf": 2, "angles": angles}})
        np.testing.assert_array_equal(cfg.spec.angles, angles)

    def test_initial_state_string_form(self):
        cfg = resolve_config(minimal(initial_state="e, mu"))
        assert cfg.initial is not None
        assert cfg.initial.amplitudes[1] == 1.0

    def test_times_grid(self):
        cfg = resolve_config(minimal(times={"start": 0.0, "stop": 4.0, "count": 5}))
        assert cfg.times == [0.0, 1.0, 2.0, 3.0, 4.0]

    def test_seed_override(self):
        cfg = resolve_config(minimal(seed=3), seed_override=99)
        assert cfg.seed == 99
        assert cfg.aqae.seed == 99

    def test_explicit_b_vector(self):
        b = [0.0, 0.0, 1e-12, 0.0, 0.0, 0.0, 0.0, 2e-12]
        cfg = resolve_config({"system": {"n_modes": 2, "nf": 3, "b_vector": b}})
        np.testing.assert_array_equal(cfg.spec.b_vector[0], b)

    def test_per_mode_energies(self):
        cfg = resolve_config({"system": {"n_modes": 2, "nf": 3, "energy_ev": [1e7, 2e7]}})
        assert cfg.spec.b_vector[1][2] == pytest.approx(cfg.spec.b_vector[0][2] / 2.0)

    def test_aqae_section(self):
        cfg = resolve_config(minimal(aqae={"k_bits": 2, "max_zoom": 7, "dt": 1e11}))
        assert cfg.aqae.k_bits == 2
        assert cfg.aqae.max_zoom == 7
        assert cfg.aqae_dt == 1e11


class TestValidationErrors:
    @pytest.mark.parametrize(
        "raw,fragment",
        [
            ({}, "system"),
            ({"system": {"n_modes": 2, "nf": 4}}, "system.nf"),
            ({"system": {"n_modes": 0, "nf": 2}}, "system.n_modes"),
            ({"system": {"n_modes": 2, "nf": 2, "k_ev": -1.0}}, "system.k_ev"),
            ({"system": {"n_modes": 2, "nf": 2, "xi": 1.5}}, "system.xi"),
            ({"system": {"n_modes": 2, "nf": 2, "statistics": "bosonic"}}, "system.statistics"),
            ({"system": {"n_modes": 2, "nf": 2, "species": ["neutrino"]}}, "system.species"),
            (
                {"system": {"n_modes": 2, "nf": 2, "species": ["neutrino", "tachyon"]}},
                "system.species[1]",
            ),
            ({"system": {"n_modes": 2, "nf": 2, "b_vector_choice": "nope"}}, "b_vector_choice"),
            ({"system": {"n_modes": 2, "nf": 2, "energy_ev": -1.0}}, "energy_ev"),
            ({"system": {"n_modes": 2, "nf": 2}, "times": [-1.0]}, "times"),
            ({"system": {"n_modes": 2, "nf": 2}, "initial_state": ["e"]}, "initial_state"),
            ({"system": {"n_modes": 2, "nf": 2}, "initial_state": ["e", "tau"]}, "initial_state"),
            ({"system": {"n_modes": 2, "nf": 2}, "seed": -1}, "seed"),
            ({"system": {"n_modes": 2, "nf": 2}, "aqae": {"max_zoom": 0}}, "aqae"),
            ({"system": {"n_modes": 2, "nf": 2}, "aqae": {"dt": -5.0}}, "aqae.dt"),
            ({"system": {"n_modes": 4, "nf": 2, "pair_angle": 0.3}}, "pair_angle"),
        ],
    )
    def test_field_context_in_message(self, raw, fragment):
        with pytest.raises(ConfigError, match=fragment.replace("[", "\\[")):
            resolve_config(raw)

    def test_non_mapping_top_level(self):
        with pytest.raises(ConfigError):
            resolve_config([1, 2, 3])


class TestLoadConfig:
    def test_round_trip_through_yaml(self, tmp_path):
        path = tmp_path / "exp.yaml"
        path.write_text(
            "system:\n  n_modes: 2\n  nf: 2\n  statistics: majorana\n"
            "initial_state: [e, e]\ntimes: [1.0e11]\nseed: 5\n"
        )
        cfg = load_config(path)
        assert cfg.spec.statistics is Statistics.MAJORANA
        assert cfg.seed == 5
        assert cfg.times == [1e11]

    def test_invalid_yaml_reports_path(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("system: [unclosed\n")
        with pytest.raises(ConfigError, match="YAML"):
            load_config(path)
