"""Declarative experiment driver: corpora -> features -> models -> WER table.

An ExperimentPlan (JSON) declares the synthetic corpora, the feature kind,
and a list of systems to train and score. Each system is either a plain
acoustic model (optionally adapted from normal to dysarthric speech) or a
bottleneck strategy (A/B/C with optional extractor/model adaptation).
Every (system, seed) pair produces one row of the WER report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .arch import ARCH_KINDS, FrameClassifier
from .corpus import (
    DysarthriaProfile,
    Utterance,
    generate_corpus,
    split_corpus,
)
from .corpus.lexicon import NUM_LABELS
from .decode import (
    ResultRow,
    TrigramLM,
    estimate_priors,
    viterbi_decode,
    wer_corpus,
)
from .errors import ValidationError
from .frontend import (
    FeatureMatrix,
    FeatureNormalizer,
    FrontendConfig,
    add_deltas,
    gammatone_fbank,
    mfb_features,
    splice,
)
from .pipelines import (
    AdaptConfig,
    FrameDataset,
    adapt_classifier,
    bn_dataset,
    run_strategy,
)

DEFAULT_VOCAB = ("data", "keep", "basket", "adapt", "output", "edit", "tag", "fit")


# ---- plan -------------------------------------------------------------------


@dataclass(frozen=True)
class SystemSpec:
    """One table row family: a system evaluated at one or more seeds."""

    name: str
    mode: str = "am"            # "am" or "bn"
    arch: str = "dnn"           # acoustic-model architecture
    train_corpus: str = "dysarthric"   # am mode: corpus the model is trained on
    adapt: bool = False         # am mode: adapt normal-trained model
    strategy: str = "A"         # bn mode
    bn_arch: str = "dnn"
    adapt_bn: bool = False
    adapt_am: bool = False
    seeds: tuple[int, ...] = (0,)

    def __post_init__(self):
        if self.mode not in ("am", "bn"):
            raise ValidationError(f"system {self.name}: unknown mode {self.mode!r}")
        for a in (self.arch, self.bn_arch):
            if a not in ARCH_KINDS:
                raise ValidationError(f"system {self.name}: unknown arch {a!r}")
        if self.mode == "am" and self.train_corpus not in ("normal", "dysarthric"):
            raise ValidationError(f"system {self.name}: bad train_corpus")
        if self.mode == "am" and self.adapt and self.train_corpus != "normal":
            raise ValidationError(
                f"system {self.name}: adaptation starts from a normal-trained model"
            )


@dataclass(frozen=True)
class ExperimentPlan:
    seed: int = 0
    vocab: tuple[str, ...] = DEFAULT_VOCAB
    feature: str = "gfb"        # "gfb" or "mfb"
    context: int = 8            # splice half-width (17-frame window)
    n_normal: int = 60
    n_dysarthric: int = 40
    profile: DysarthriaProfile = field(
        default_factory=lambda: DysarthriaProfile(slowdown=1.3, undershoot=0.4,
                                                  tremor_amp=0.05)
    )
    split: tuple[float, float, float] = (0.88, 0.02, 0.10)
    lm_train_set: str = "train"  # or "test-transcripts"
    size: str = "small"
    lr0: float = 0.008
    batch: int = 256
    max_epochs: int = 30
    min_epochs: int = 0
    target_train_accuracy: float | None = None
    adapt_config: AdaptConfig = field(default_factory=AdaptConfig)
    systems: tuple[SystemSpec, ...] = ()

    def __post_init__(self):
        if self.feature not in ("gfb", "mfb"):
            raise ValidationError(f"unknown feature kind {self.feature!r}")
        if self.lm_train_set not in ("train", "test-transcripts"):
            raise ValidationError(f"unknown lm_train_set {self.lm_train_set!r}")
        if not self.systems:
            raise ValidationError("plan declares no systems")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentPlan":
        d = dict(d)
        if "profile" in d:
            d["profile"] = DysarthriaProfile(**d["profile"])
        if "adapt_config" in d:
            d["adapt_config"] = AdaptConfig(**d["adapt_config"])
        d["systems"] = tuple(
            SystemSpec(**{**s, "seeds": tuple(s.get("seeds", (0,)))})
            for s in d.get("systems", ())
        )
        for key in ("vocab", "split"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)

    @classmethod
    def from_json(cls, path: str) -> "ExperimentPlan":
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


# ---- feature plumbing -------------------------------------------------------


def raw_features(utt: Utterance, kind: str,
                 config: FrontendConfig = FrontendConfig()) -> FeatureMatrix:
    if kind == "gfb":
        return gammatone_fbank(utt.samples, config, utt_id=utt.id)
    if kind == "mfb":
        return mfb_features(utt.samples, config, utt_id=utt.id)
    raise ValidationError(f"unknown feature kind {kind!r}")


def prepare_features(
    utts: list[Utterance],
    kind: str,
    normalizer: FeatureNormalizer | None = None,
    context: int = 8,
    config: FrontendConfig = FrontendConfig(),
) -> tuple[FrameDataset, FeatureNormalizer]:
    """Fbank -> deltas -> corpus z-norm -> splice, one FeatureMatrix per utt.

    Pass the training-set normalizer when preparing cv/test data.
    """
    raw = [add_deltas(raw_features(u, kind, config)) for u in utts]
    if normalizer is None:
        normalizer = FeatureNormalizer().fit(raw)
    normed = normalizer.transform_all(raw)
    spliced = [splice(fm, context, context) for fm in normed]
    labels = [u.frame_labels for u in utts]
    return FrameDataset(spliced, labels), normalizer


def append_tv_block(
    dataset: FrameDataset,
    trajectories: list[np.ndarray],
    tv_normalizer: FeatureNormalizer | None = None,
    context: int = 8,
) -> tuple[FrameDataset, FeatureNormalizer]:
    """Concatenate a spliced, z-normalized TV context after the acoustic block."""
    tv_fms = [
        FeatureMatrix(np.asarray(tv, dtype=np.float64), kind="tv",
                      utt_id=fm.utt_id)
        for fm, tv in zip(dataset.features, trajectories)
    ]
    if tv_normalizer is None:
        tv_normalizer = FeatureNormalizer().fit(tv_fms)
    tv_spliced = [splice(fm, context, context)
                  for fm in tv_normalizer.transform_all(tv_fms)]
    combined = [
        FeatureMatrix(np.hstack([a.data, t.data]), kind=a.kind + "+tv",
                      utt_id=a.utt_id)
        for a, t in zip(dataset.features, tv_spliced)
    ]
    return FrameDataset(combined, list(dataset.labels)), tv_normalizer


# ---- corpora ----------------------------------------------------------------


@dataclass
class CorpusSplits:
    train: list[Utterance]
    cv: list[Utterance]
    test: list[Utterance]


def _rename(utts: list[Utterance], prefix: str) -> list[Utterance]:
    return [replace(u, id=f"{prefix}-{u.id}") for u in utts]


def make_corpora(plan: ExperimentPlan) -> dict[str, CorpusSplits]:
    """Generate and split the normal and dysarthric corpora."""
    vocab = list(plan.vocab)
    normal = _rename(
        generate_corpus(plan.n_normal, vocab, profile=None, seed=plan.seed),
        "nrm",
    )
    dys = _rename(
        generate_corpus(plan.n_dysarthric, vocab, profile=plan.profile,
                        seed=plan.seed + 1),
        "dys",
    )
    out = {}
    for name, utts in (("normal", normal), ("dysarthric", dys)):
        tr, cv, te = split_corpus(utts, fractions=plan.split, seed=plan.seed)
        out[name] = CorpusSplits(train=tr, cv=cv, test=te)
    return out


# ---- experiment execution ---------------------------------------------------


@dataclass
class PreparedCorpus:
    train: FrameDataset
    cv: FrameDataset
    test: FrameDataset
    normalizer: FeatureNormalizer


def _prepare_all(plan: ExperimentPlan,
                 corpora: dict[str, CorpusSplits]) -> dict[str, PreparedCorpus]:
    out = {}
    for name, cs in corpora.items():
        train, norm = prepare_features(cs.train, plan.feature, context=plan.context)
        cv, _ = prepare_features(cs.cv, plan.feature, norm, context=plan.context)
        test, _ = prepare_features(cs.test, plan.feature, norm, context=plan.context)
        out[name] = PreparedCorpus(train, cv, test, norm)
    return out


def _with_tv(plan: ExperimentPlan, cs: CorpusSplits,
             pc: PreparedCorpus) -> PreparedCorpus:
    train, tvn = append_tv_block(
        pc.train, [u.tv_truth.values for u in cs.train], context=plan.context)
    cv, _ = append_tv_block(
        pc.cv, [u.tv_truth.values for u in cs.cv], tvn, context=plan.context)
    test, _ = append_tv_block(
        pc.test, [u.tv_truth.values for u in cs.test], tvn, context=plan.context)
    return PreparedCorpus(train, cv, test, pc.normalizer)


def _decode_wer(
    am: FrameClassifier,
    test: FrameDataset,
    test_utts: list[Utterance],
    lm: TrigramLM,
    priors: np.ndarray,
    lexicon: list[str],
) -> float:
    pairs = []
    for fm, utt in zip(test.features, test_utts):
        post = am.predict_proba(fm.data)
        result = viterbi_decode(post, priors, lexicon, lm)
        pairs.append((utt.transcription, result.words))
    return wer_corpus(pairs).wer


def run_experiment(plan: ExperimentPlan) -> tuple[list[ResultRow], list[dict]]:
    """Execute a plan; returns (report rows, per-row provenance records)."""
    corpora = make_corpora(plan)
    prepared = _prepare_all(plan, corpora)

    lexicon = sorted(set(plan.vocab))
    if plan.lm_train_set == "train":
        lm_sents = [u.transcription for u in
                    corpora["normal"].train + corpora["dysarthric"].train]
    else:
        lm_sents = [u.transcription for u in corpora["dysarthric"].test]
    lm = TrigramLM().fit(lm_sents)

    n_classes = NUM_LABELS
    priors = estimate_priors(
        list(prepared["dysarthric"].train.labels)
        + list(prepared["normal"].train.labels),
        n_classes,
    )

    train_kwargs = dict(
        size=plan.size, lr0=plan.lr0, batch=plan.batch,
        max_epochs=plan.max_epochs, min_epochs=plan.min_epochs,
        target_train_accuracy=plan.target_train_accuracy,
    )

    rows: list[ResultRow] = []
    records: list[dict] = []
    for system in plan.systems:
        for seed in system.seeds:
            if system.mode == "am":
                row, record = _run_am_system(
                    plan, system, seed, corpora, prepared, lm, priors, lexicon,
                    n_classes, train_kwargs,
                )
            else:
                row, record = _run_bn_system(
                    plan, system, seed, corpora, prepared, lm, priors, lexicon,
                    n_classes, train_kwargs,
                )
            rows.append(row)
            records.append(record)
    return rows, records


def _run_am_system(plan, system, seed, corpora, prepared, lm, priors, lexicon,
                   n_classes, train_kwargs):
    pc = prepared[system.train_corpus]
    dys_cs = corpora["dysarthric"]
    dys_pc = prepared["dysarthric"]
    cs = corpora[system.train_corpus]

    tv_dims = 0
    if system.arch == "fcnn":
        pc = _with_tv(plan, cs, pc)
        dys_pc = _with_tv(plan, dys_cs, prepared["dysarthric"])
        tv_dims = 6

    clf = FrameClassifier(
        arch=system.arch, n_classes=n_classes, seed=seed,
        context=2 * plan.context + 1, tv_dims=tv_dims, **train_kwargs,
    )
    x, y = pc.train.stacked()
    x_cv, y_cv = pc.cv.stacked()
    clf.fit(x, y, x_cv, y_cv)
    stages = [{"stage": "train_am", "arch": system.arch,
               "corpus": system.train_corpus, "seed": seed}]

    if system.adapt:
        clf = adapt_classifier(clf, dys_pc.train, dys_pc.cv,
                               plan.adapt_config, seed=seed)
        stages.append({"stage": "adapt_am", "corpus": "dysarthric", "seed": seed})

    w = _decode_wer(clf, dys_pc.test, dys_cs.test, lm, priors, lexicon)
    row = ResultRow(
        architecture=system.arch, feature=plan.feature, strategy="-",
        adapt_bn="-", adapt_am="yes" if system.adapt else "no",
        seed=seed, wer=w,
    )
    record = {"system": system.name, "seed": seed, "wer": w, "stages": stages}
    return row, record


def _run_bn_system(plan, system, seed, corpora, prepared, lm, priors, lexicon,
                   n_classes, train_kwargs):
    normal = (prepared["normal"].train, prepared["normal"].cv)
    dys = (prepared["dysarthric"].train, prepared["dysarthric"].cv)
    result = run_strategy(
        system.strategy, system.bn_arch, system.arch,
        normal=normal, dysarthric=dys,
        adapt_bn=system.adapt_bn, adapt_am=system.adapt_am,
        bn_size=plan.size, am_size=plan.size, n_classes=n_classes, seed=seed,
        adapt_config=plan.adapt_config, context=2 * plan.context + 1,
        lr0=plan.lr0, batch=plan.batch,
        max_epochs=plan.max_epochs, min_epochs=plan.min_epochs,
        target_train_accuracy=plan.target_train_accuracy,
    )
    test_bn = bn_dataset(result.bn_extractor, prepared["dysarthric"].test)
    w = _decode_wer(result.acoustic_model, test_bn, corpora["dysarthric"].test,
                    lm, priors, lexicon)
    row = ResultRow(
        architecture=system.arch, feature="bn", strategy=system.strategy,
        adapt_bn="yes" if system.adapt_bn else "no",
        adapt_am="yes" if system.adapt_am else "no",
        seed=seed, wer=w,
    )
    record = {"system": system.name, "seed": seed, "wer": w,
              "provenance": result.provenance}
    return row, record
