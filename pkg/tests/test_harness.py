"""Harness tests: config schema, sweep expansion, paired runs, CSV round trip."""

import math

import pytest

from graphsym.harness import (
    CSV_HEADER,
    ConfigError,
    ExperimentConfig,
    ExperimentRecord,
    flatten_params,
    read_records_csv,
    records_to_csv_text,
    run_experiment,
    run_unit,
    write_records_csv,
)


def small_er_cfg(**over) -> ExperimentConfig:
    raw = {
        "model": "er",
        "params": {"n": 12, "p": 0.3},
        "methods": ["afp", "qsa"],
        "repetitions": 1,
        "base_seed": 5,
        "afp": {"budget": 400},
        "qsa": {"max_iters": 30},
    }
    raw.update(over)
    return ExperimentConfig.from_dict(raw)


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig.from_dict({"model": "er", "params": {"n": 10, "p": 0.2}})
        assert cfg.methods == ("afp", "qsa")
        assert cfg.repetitions == 1
        assert cfg.base_seed == 0
        assert cfg.init_kind() == "random"
        assert cfg.reference_kind() is None

    def test_from_yaml(self):
        cfg = ExperimentConfig.from_yaml(
            "model: lrm\nparams:\n  n: 20\n  p: 0.3\n  q: 0.4\nmethods: [qsa]\nrepetitions: 2\n"
        )
        assert cfg.model == "lrm"
        assert cfg.methods == ("qsa",)
        assert cfg.reference_kind() == "lr"

    def test_single_method_string(self):
        cfg = ExperimentConfig.from_dict({"model": "er", "params": {"n": 8, "p": 0.5}, "methods": "afp"})
        assert cfg.methods == ("afp",)

    @pytest.mark.parametrize(
        "raw",
        [
            {"model": "triangle-soup"},
            {"model": "er", "params": {"n": 8, "p": 0.2}, "methods": []},
            {"model": "er", "params": {"n": 8, "p": 0.2}, "methods": ["afp", "afp"]},
            {"model": "er", "params": {"n": 8, "p": 0.2}, "methods": ["newton"]},
            {"model": "er", "params": {"n": 8, "p": 0.2}, "repetitions": 0},
            {"model": "er", "params": {"n": 8, "p": 0.2}, "typo_key": 1},
            {"model": "er", "params": {"n": 8, "p": 0.2, "m_attach": 3}},
            {"model": "er", "params": {"n": 8, "p": 0.2}, "init": {"kind": "lr"}},
            {"model": "er", "params": {"n": 8, "p": 0.2}, "reference": "lr"},
            {"model": "er", "params": {"n": 8, "p": 0.2}, "afp": {"temperature": 3}},
            {"model": "er", "params": {"n": 8, "p": []}},
            "model: er",
        ],
    )
    def test_rejects_malformed(self, raw):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(raw)

    def test_rejects_bad_yaml(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_yaml("model: [unclosed")

    def test_missing_model_param_fails_at_run(self):
        cfg = ExperimentConfig.from_dict({"model": "er", "params": {"n": 8}})
        recs = run_unit(cfg, cfg.cells()[0], 0)
        assert all(math.isnan(r.S) for r in recs)


class TestCells:
    def test_scalars_give_one_cell(self):
        cfg = small_er_cfg()
        assert cfg.cells() == [{"n": 12, "p": 0.3}]

    def test_sweep_cross_product_order(self):
        cfg = small_er_cfg(params={"n": [10, 20], "p": [0.2, 0.3]})
        assert cfg.cells() == [
            {"n": 10, "p": 0.2},
            {"n": 10, "p": 0.3},
            {"n": 20, "p": 0.2},
            {"n": 20, "p": 0.3},
        ]

    def test_dims_single_vs_swept(self):
        one = ExperimentConfig.from_dict({"model": "grid", "params": {"dims": [4, 5]}})
        assert one.cells() == [{"dims": [4, 5]}]
        many = ExperimentConfig.from_dict({"model": "grid", "params": {"dims": [[4, 5], [3, 3, 3]]}})
        assert many.cells() == [{"dims": [4, 5]}, {"dims": [3, 3, 3]}]

    def test_probs_matrix_is_not_swept(self):
        cfg = ExperimentConfig.from_dict(
            {"model": "sbm", "params": {"sizes": [5, 5], "probs": [[0.6, 0.1], [0.1, 0.6]]}}
        )
        assert len(cfg.cells()) == 1

    def test_reshuffle_swaps_join_the_sweep(self):
        cfg = ExperimentConfig.from_dict(
            {
                "model": "lrm",
                "params": {"n": 20, "p": 0.3, "q": 0.4},
                "init": {"kind": "reshuffled-lr", "swaps": [0, 5]},
            }
        )
        cells = cfg.cells()
        assert [c["swaps"] for c in cells] == [0, 5]

    def test_negative_swaps_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(
                {
                    "model": "lrm",
                    "params": {"n": 20, "p": 0.3, "q": 0.4},
                    "init": {"kind": "reshuffled-lr", "swaps": -1},
                }
            )


class TestFlattenParams:
    def test_sorted_and_formatted(self):
        assert flatten_params({"p": 0.3, "n": 12}) == "n=12;p=0.3"

    def test_lists_join_with_x(self):
        assert flatten_params({"dims": [5, 4]}) == "dims=5x4"

    def test_float_precision(self):
        assert flatten_params({"p": 0.123456789012345}) == "p=0.123456789"


class TestRunExperiment:
    def test_record_grid_and_order(self):
        cfg = small_er_cfg(params={"n": 12, "p": [0.2, 0.4]}, repetitions=2)
        recs = run_experiment(cfg)
        assert len(recs) == 2 * 2 * 2
        key = [(r.params, r.run_index, r.method) for r in recs]
        # cell-major, then repetition, then method (afp sorts before qsa)
        assert key == [
            ("n=12;p=0.2", 0, "afp"),
            ("n=12;p=0.2", 0, "qsa"),
            ("n=12;p=0.2", 1, "afp"),
            ("n=12;p=0.2", 1, "qsa"),
            ("n=12;p=0.4", 0, "afp"),
            ("n=12;p=0.4", 0, "qsa"),
            ("n=12;p=0.4", 1, "afp"),
            ("n=12;p=0.4", 1, "qsa"),
        ]

    def test_deterministic(self):
        cfg = small_er_cfg(repetitions=2)
        assert run_experiment(cfg) == run_experiment(cfg)

    def test_methods_are_paired_per_unit(self):
        cfg = small_er_cfg(repetitions=3)
        recs = run_experiment(cfg)
        by_unit = {}
        for r in recs:
            by_unit.setdefault(r.run_index, []).append(r)
        for unit in by_unit.values():
            assert {r.method for r in unit} == {"afp", "qsa"}
            assert len({r.seed for r in unit}) == 1  # one master seed per unit

    def test_lr_init_keeps_perfect_symmetry_for_both_methods(self):
        cfg = ExperimentConfig.from_dict(
            {
                "model": "lrm",
                "params": {"n": 16, "p": 0.3, "q": 0.4},
                "init": {"kind": "lr"},
                "afp": {"budget": 300},
                "qsa": {"max_iters": 20},
                "repetitions": 2,
            }
        )
        recs = run_experiment(cfg)
        assert all(r.S == 0.0 for r in recs)
        assert all(r.hd_to_reference == 0 for r in recs)
        assert not any(r.is_identity for r in recs)

    def test_reference_column(self):
        er = run_experiment(small_er_cfg())
        assert all(r.hd_to_reference == -1 for r in er)
        lrm = ExperimentConfig.from_dict(
            {"model": "lrm", "params": {"n": 14, "p": 0.3, "q": 0.4}, "afp": {"budget": 200}, "qsa": {"max_iters": 15}}
        )
        assert all(r.hd_to_reference >= 0 for r in run_experiment(lrm))
        off = ExperimentConfig.from_dict(
            {
                "model": "lrm",
                "params": {"n": 14, "p": 0.3, "q": 0.4},
                "reference": "none",
                "afp": {"budget": 200},
                "qsa": {"max_iters": 15},
            }
        )
        assert all(r.hd_to_reference == -1 for r in run_experiment(off))

    def test_instance_failure_yields_error_rows(self):
        # odd twin count: the distortion builder refuses, so the unit records errors
        cfg = ExperimentConfig.from_dict(
            {"model": "lrm-distorted", "params": {"n": 20, "p": 0.3, "q": 0.4, "r": 2, "t": 3}}
        )
        recs = run_experiment(cfg)
        assert len(recs) == 2
        for r in recs:
            assert math.isnan(r.S) and math.isnan(r.epsilon)
            assert r.fixed_points == -1 and r.hd_to_reference == -1
            assert r.iterations == 0 and not r.is_identity

    def test_workers_do_not_change_output(self):
        cfg = small_er_cfg(params={"n": 12, "p": [0.2, 0.4]})
        assert run_experiment(cfg, workers=1) == run_experiment(cfg, workers=2)

    def test_wall_ms_is_pinned_to_zero(self):
        recs = run_experiment(small_er_cfg())
        assert all(r.wall_ms == 0 for r in recs)


class TestCsv:
    def test_header(self):
        assert records_to_csv_text([]).splitlines()[0] == CSV_HEADER

    def test_round_trip(self, tmp_path):
        recs = run_experiment(small_er_cfg(repetitions=2))
        path = tmp_path / "records.csv"
        write_records_csv(path, recs)
        back = read_records_csv(path)
        # the 10-significant-digit column format is the precision contract, so
        # a reparse agrees to that precision and re-serializes byte-identically
        for a, b in zip(recs, back, strict=True):
            assert (a.model, a.params, a.method, a.seed, a.run_index) == (b.model, b.params, b.method, b.seed, b.run_index)
            assert b.S == pytest.approx(a.S, rel=1e-9)
            assert b.epsilon == pytest.approx(a.epsilon, rel=1e-9)
            assert (a.fixed_points, a.hd_to_reference, a.is_identity, a.iterations, a.wall_ms) == (
                b.fixed_points, b.hd_to_reference, b.is_identity, b.iterations, b.wall_ms)
        assert records_to_csv_text(back) == path.read_text()

    def test_error_rows_round_trip(self, tmp_path):
        row = ExperimentRecord(
            model="er", params="n=8;p=0.2", method="afp", seed=3, run_index=0,
            S=math.nan, epsilon=math.nan, fixed_points=-1, hd_to_reference=-1,
            is_identity=False, iterations=0, wall_ms=0,
        )
        path = tmp_path / "err.csv"
        write_records_csv(path, [row])
        back = read_records_csv(path)[0]
        assert math.isnan(back.S) and math.isnan(back.epsilon)
        assert back.fixed_points == -1 and back.hd_to_reference == -1

    def test_float_formatting(self):
        row = ExperimentRecord(
            model="er", params="n=8;p=0.2", method="qsa", seed=1, run_index=0,
            S=0.12345678912345, epsilon=12.0, fixed_points=2, hd_to_reference=-1,
            is_identity=False, iterations=7, wall_ms=0,
        )
        line = records_to_csv_text([row]).splitlines()[1]
        assert line == "er,n=8;p=0.2,qsa,1,0,0.1234567891,12,2,-1,false,7,0"

    def test_rejects_wrong_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("model,params\ner,n=8\n")
        with pytest.raises(ValueError):
            read_records_csv(path)

    def test_rejects_short_rows(self, tmp_path):
        path = tmp_path / "short.csv"
        path.write_text(CSV_HEADER + "\ner,n=8;p=0.2,afp,1\n")
        with pytest.raises(ValueError):
            read_records_csv(path)
