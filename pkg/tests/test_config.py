import json

import pytest

from relkit.config import load_config, parse_config
from relkit.errors import ConfigError
from relkit.inference import BinomialModel, NormalKnownVarModel
from relkit.loss import CurveKnots, QuadraticParams


def minimal(**extra):
    doc = {
        "spec_version": 1,
        "parameter_space": {"lo": -0.5, "hi": 0.5},
        "actions": {"a0_label": "hold", "a1_label": "act"},
        "loss": {"kind": "builtin_coin_demo"},
    }
    doc.update(extra)
    return doc


class TestTopLevel:
    def test_minimal_document(self):
        cfg = parse_config(minimal())
        assert cfg.space.lo == -0.5
        assert cfg.loss.kind == "builtin_coin_demo"
        assert cfg.actions.a1_label == "act"

    def test_unknown_top_key(self):
        with pytest.raises(ConfigError, match="unknown top-level"):
            parse_config(minimal(extra_knob=1))

    def test_missing_required_section(self):
        doc = minimal()
        del doc["loss"]
        with pytest.raises(ConfigError, match="loss"):
            parse_config(doc)

    @pytest.mark.parametrize("version", [None, 0, 2, "1"])
    def test_spec_version_enforced(self, version):
        doc = minimal()
        doc["spec_version"] = version
        with pytest.raises(ConfigError, match="spec_version"):
            parse_config(doc)

    def test_seed_validation(self):
        assert parse_config(minimal(seed=7)).seed == 7
        with pytest.raises(ConfigError, match="seed"):
            parse_config(minimal(seed=-1))


class TestLossSection:
    def test_quadratic_params(self):
        doc = minimal(
            loss={
                "kind": "quadratic",
                "params_a0": {"c": 0.0, "offset": 0.04},
                "params_a1": {"c": 1.0},
            }
        )
        cfg = parse_config(doc)
        assert isinstance(cfg.loss.params_a0, QuadraticParams)
        assert cfg.loss.params_a0.offset == 0.04

    def test_piecewise_params(self):
        doc = minimal(
            loss={
                "kind": "piecewise_linear",
                "params_a0": {"knots": [-0.5, 0.5], "values": [0.0, 1.0]},
                "params_a1": {"knots": [-0.5, 0.5], "values": [1.0, 0.0]},
            }
        )
        cfg = parse_config(doc)
        assert isinstance(cfg.loss.params_a0, CurveKnots)

    def test_table_uses_grid_key(self):
        doc = minimal(
            loss={
                "kind": "table",
                "params_a0": {"grid": [-0.5, 0.5], "values": [0.0, 1.0]},
                "params_a1": {"grid": [-0.5, 0.5], "values": [1.0, 0.0]},
            }
        )
        assert isinstance(parse_config(doc).loss.params_a0, CurveKnots)

    def test_unknown_loss_key(self):
        doc = minimal(loss={"kind": "builtin_coin_demo", "mystery": True})
        with pytest.raises(ConfigError, match="mystery"):
            parse_config(doc)

    def test_missing_curve_params(self):
        doc = minimal(loss={"kind": "quadratic", "params_a0": {"c": 1.0}})
        with pytest.raises(ConfigError, match="params_a1"):
            parse_config(doc)


class TestHypothesesSection:
    def test_intervals_and_singletons(self):
        doc = minimal(hypotheses={"h0": [0], "h1": [[0.2, 0.4, False, False]]})
        cfg = parse_config(doc)
        assert cfg.hypotheses.h0.intervals[0].lo == 0.0
        assert cfg.hypotheses.h0.intervals[0].hi == 0.0
        assert cfg.hypotheses.h1.intervals[0].hi == 0.4

    def test_two_element_interval_defaults_closed(self):
        doc = minimal(hypotheses={"h0": [[-0.1, 0.1]], "h1": [0.3]})
        itv = parse_config(doc).hypotheses.h0.intervals[0]
        assert not itv.lo_open and not itv.hi_open

    def test_overlap_rejected(self):
        doc = minimal(hypotheses={"h0": [[-0.2, 0.2]], "h1": [[0.1, 0.4]]})
        with pytest.raises(ConfigError, match="overlap"):
            parse_config(doc)

    def test_outside_space_rejected(self):
        doc = minimal(hypotheses={"h0": [[-0.2, 0.2]], "h1": [[0.6, 0.8]]})
        with pytest.raises(ConfigError, match="outside"):
            parse_config(doc)


class TestModelSection:
    def test_binomial_with_prior(self):
        doc = minimal(
            model={
                "family": "binomial",
                "data": {"n": 10, "k": 7},
                "prior": {"alpha": 2, "beta": 3},
            }
        )
        model = parse_config(doc).model
        assert isinstance(model, BinomialModel)
        assert (model.prior_alpha, model.prior_beta) == (2.0, 3.0)

    def test_normal_model(self):
        doc = minimal(
            model={
                "family": "normal",
                "sigma": 0.2,
                "data": {"n": 22000, "ybar": 0.0077},
                "prior": {"mean": 0.0, "sd": 0.05},
            }
        )
        model = parse_config(doc).model
        assert isinstance(model, NormalKnownVarModel)
        assert model.sigma == 0.2

    def test_top_level_prior_attaches(self):
        doc = minimal(
            model={"family": "binomial", "data": {"n": 10, "k": 7}},
            prior={"alpha": 4, "beta": 4},
        )
        model = parse_config(doc).model
        assert model.prior_alpha == 4.0

    def test_duplicate_prior_rejected(self):
        doc = minimal(
            model={
                "family": "binomial",
                "data": {"n": 10, "k": 7},
                "prior": {"alpha": 1, "beta": 1},
            },
            prior={"alpha": 4, "beta": 4},
        )
        with pytest.raises(ConfigError, match="prior"):
            parse_config(doc)

    def test_orphan_prior_rejected(self):
        with pytest.raises(ConfigError, match="model"):
            parse_config(minimal(prior={"alpha": 1, "beta": 1}))


class TestDecisionSection:
    def test_scalar_and_interval_ratio(self):
        cfg = parse_config(minimal(decision={"rule": "hypothesis_ratio", "loss_ratio": 2}))
        assert cfg.decision.loss_ratio.is_scalar
        cfg = parse_config(
            minimal(decision={"rule": "hypothesis_ratio", "loss_ratio": [1, 3]})
        )
        assert (cfg.decision.loss_ratio.lo, cfg.decision.loss_ratio.hi) == (1.0, 3.0)

    def test_ratio_required_for_hypothesis_rule(self):
        with pytest.raises(ConfigError, match="loss_ratio"):
            parse_config(minimal(decision={"rule": "hypothesis_ratio"}))

    def test_ratio_rejected_for_expected_loss(self):
        with pytest.raises(ConfigError, match="expected_loss"):
            parse_config(minimal(decision={"rule": "expected_loss", "loss_ratio": 1}))

    def test_unknown_rule(self):
        with pytest.raises(ConfigError, match="rule"):
            parse_config(minimal(decision={"rule": "minimax"}))


class TestComparatorsSection:
    def test_known_procedures(self):
        doc = minimal(
            comparators=[
                {"procedure": "nhst", "alpha": 0.01},
                {"procedure": "rope", "mass": 0.9, "rope": "partition_hull"},
            ]
        )
        cfg = parse_config(doc)
        assert [c.name for c in cfg.comparators] == ["nhst", "rope"]

    def test_unknown_procedure(self):
        with pytest.raises(ConfigError, match="unknown comparator"):
            parse_config(minimal(comparators=[{"procedure": "anova"}]))

    def test_unknown_setting(self):
        with pytest.raises(ConfigError, match="power"):
            parse_config(minimal(comparators=[{"procedure": "nhst", "power": 0.8}]))


class TestScenarioSection:
    def scenario_doc(self, **extra):
        scenario = {
            "name": "demo",
            "family": "binomial",
            "true_effects": [0.0, 0.3],
            "sample_sizes": [50],
            "replicates": 5,
            "prior": {"alpha": 1, "beta": 1},
            "procedures": [{"procedure": "nhst", "alpha": 0.05}],
        }
        scenario.update(extra)
        return minimal(scenario=scenario, seed=11)

    def test_scenario_parses_and_inherits_seed(self):
        cfg = parse_config(self.scenario_doc())
        assert cfg.scenario.seed == 11
        assert cfg.scenario.true_effects == (0.0, 0.3)

    def test_scenario_own_seed_wins(self):
        cfg = parse_config(self.scenario_doc(seed=99))
        assert cfg.scenario.seed == 99

    def test_scenario_negative_seed_rejected(self):
        with pytest.raises(ConfigError, match="seed"):
            parse_config(self.scenario_doc(seed=-5))

    def test_unknown_procedure_rejected(self):
        doc = self.scenario_doc(procedures=[{"procedure": "magic"}])
        with pytest.raises(ConfigError, match="unknown procedure"):
            parse_config(doc)

    def test_effect_outside_space_rejected(self):
        doc = self.scenario_doc(true_effects=[0.9])
        with pytest.raises(ConfigError, match="outside"):
            parse_config(doc)


class TestOutputSection:
    def test_defaults(self):
        cfg = parse_config(minimal())
        assert cfg.output.format == "json" and cfg.output.path is None

    def test_explicit(self):
        cfg = parse_config(minimal(output={"format": "csv", "path": "out.csv"}))
        assert cfg.output.format == "csv"
        assert cfg.output.path == "out.csv"

    def test_bad_format(self):
        with pytest.raises(ConfigError, match="format"):
            parse_config(minimal(output={"format": "xml"}))


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(minimal(seed=3)), encoding="utf-8")
    cfg = load_config(path)
    assert cfg.seed == 3


def test_load_config_bad_json_mentions_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"spec_version": 1,,}', encoding="utf-8")
    with pytest.raises(ConfigError, match="line"):
        load_config(path)


def test_load_config_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        load_config("/nonexistent/nope.json")
