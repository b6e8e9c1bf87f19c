"""Experiment plans and the end-to-end driver."""

import json

import numpy as np
import pytest

from dysasr.corpus import DysarthriaProfile, generate_corpus
from dysasr.decode import render_tsv
from dysasr.errors import ValidationError
from dysasr.experiment import (
    ExperimentPlan,
    SystemSpec,
    append_tv_block,
    make_corpora,
    prepare_features,
    run_experiment,
)
from dysasr.pipelines import AdaptConfig

PLAN_DICT = {
    "seed": 0,
    "vocab": ["data", "tag", "fit"],
    "n_normal": 16,
    "n_dysarthric": 12,
    "split": [0.6, 0.2, 0.2],
    "profile": {"slowdown": 1.2, "undershoot": 0.3},
    "lr0": 0.05,
    "max_epochs": 2,
    "adapt_config": {"min_epochs": 1, "max_epochs": 1},
    "systems": [
        {"name": "dnn-dys", "mode": "am", "arch": "dnn",
         "train_corpus": "dysarthric"},
    ],
}


class TestPlanParsing:
    def test_from_dict(self):
        plan = ExperimentPlan.from_dict(PLAN_DICT)
        assert plan.profile.slowdown == 1.2
        assert plan.systems[0].arch == "dnn"
        assert plan.adapt_config.max_epochs == 1

    def test_from_json(self, tmp_path):
        path = tmp_path / "plan.json"
        path.write_text(json.dumps(PLAN_DICT))
        plan = ExperimentPlan.from_json(str(path))
        assert plan.n_normal == 16

    def test_plan_requires_systems(self):
        with pytest.raises(ValidationError):
            ExperimentPlan.from_dict({**PLAN_DICT, "systems": []})

    def test_system_validation(self):
        with pytest.raises(ValidationError):
            SystemSpec(name="x", mode="am", arch="rnn")
        with pytest.raises(ValidationError):
            SystemSpec(name="x", mode="am", train_corpus="dysarthric",
                       adapt=True)
        with pytest.raises(ValidationError):
            SystemSpec(name="x", mode="mystery")


class TestFeaturePrep:
    def test_pipeline_dims_and_normalizer_reuse(self):
        utts = generate_corpus(4, ["data"], seed=0)
        train, norm = prepare_features(utts[:3], "gfb")
        cv, _ = prepare_features(utts[3:], "gfb", norm)
        assert train.features[0].dims == 17 * 120  # 40 x (s+d+dd) x 17
        assert train.kind == cv.kind == "spliced-gfb+d"
        stacked, _ = train.stacked()
        assert abs(stacked.mean()) < 0.1  # roughly centered by the normalizer

    def test_tv_block_appended(self):
        utts = generate_corpus(3, ["data"], seed=0)
        ds, _ = prepare_features(utts, "gfb")
        with_tv, _ = append_tv_block(ds, [u.tv_truth.values for u in utts])
        assert with_tv.features[0].dims == 17 * 120 + 17 * 6


class TestCorpora:
    def test_split_sizes_and_prefixes(self):
        plan = ExperimentPlan.from_dict(PLAN_DICT)
        corpora = make_corpora(plan)
        n = plan.n_normal
        assert len(corpora["normal"].train) == round(0.6 * n)
        assert corpora["normal"].train[0].id.startswith("nrm-")
        assert corpora["dysarthric"].test[0].id.startswith("dys-")

    def test_profile_only_on_dysarthric(self):
        plan = ExperimentPlan.from_dict(PLAN_DICT)
        corpora = make_corpora(plan)
        # dysarthric utterances are slowed, so mean length should be larger
        n_len = np.mean([u.n_frames / max(len(u.transcription), 1)
                         for u in corpora["normal"].train])
        d_len = np.mean([u.n_frames / max(len(u.transcription), 1)
                         for u in corpora["dysarthric"].train])
        assert d_len > n_len


class TestRunExperiment:
    def test_rows_and_determinism(self):
        plan = ExperimentPlan.from_dict(PLAN_DICT)
        rows1, recs1 = run_experiment(plan)
        rows2, recs2 = run_experiment(plan)
        assert render_tsv(rows1) == render_tsv(rows2)
        assert json.dumps(recs1) == json.dumps(recs2)
        assert len(rows1) == 1
        assert rows1[0].architecture == "dnn"
        assert rows1[0].wer is not None
