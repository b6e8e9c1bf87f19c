"""Acceptance gate: one printed PASS/FAIL line per numbered criterion.

Run `pytest tests/test_acceptance.py -v -s` to see the lines as they are
produced. Criteria and tolerances:

   1  gradient suite          max relative error < 1e-4, total < 60 s
   2  overfit sanity          >= 99% frame accuracy on a 200-utterance toy
                              set, <= 30 epochs and < 600 s per architecture
   3  shape ledger            2040-dim spliced input; freq conv 11x200;
                              time conv 2x75; 60-dim bottleneck; exact
                              parameter count for the small DNN
   4  inversion               held-out mean per-TV Pearson r >= 0.80 on an
                              88/2/10 split; multi-condition training costs
                              <= 0.05 clean-set r
   5  adaptation direction    adapted mean WER <= unadapted mean WER over
                              3 seeds for every architecture
   6  strategy harness        every bottleneck strategy row completes and
                              fills its WER cell; ordering reported only
   7  decoder oracle          100 random instances: Viterbi == exhaustive
                              enumeration (words exact, score within 1e-9)
   8  WER oracle              1000 random pairs == DP edit distance; three
                              worked examples exact
   9  SNR mixing              error <= 0.01 dB over 1000 draws in [10, 80];
                              out-of-range SNRs rejected
  10  CLI determinism         byte-identical artifacts on re-run

The heavy criteria (2, 4, 5, 6) each train real models and together take
tens of minutes on one core; that budget is part of the criteria.
"""

import filecmp
import json
import time

import numpy as np
import pytest

from dysasr.arch import FrameClassifier, build_acoustic_model
from dysasr.cli import main as cli_main
from dysasr.corpus import (
    DysarthriaProfile,
    generate_corpus,
    generate_utterance,
    mix_noise,
    split_corpus,
)
from dysasr.corpus.noise import NOISE_KINDS
from dysasr.decode import TrigramLM, viterbi_decode, wer
from dysasr.errors import ValidationError
from dysasr.experiment import (
    DEFAULT_VOCAB,
    ExperimentPlan,
    SystemSpec,
    append_tv_block,
    prepare_features,
    run_experiment,
)
from dysasr.frontend import FeatureMatrix, splice
from dysasr.inversion import SpeechInverter
from dysasr.nn import Conv1D, Dense, Geometry, Network, Parallel
from dysasr.nn.gradcheck import grad_check
from oracles import brute_force_decode, edit_distance, random_instance

ARCHS = ("dnn", "cnn", "tfcnn", "fcnn")

# conftest echoes these in the terminal summary (stdout is captured by default)
VERDICTS: list[str] = []


def report(num, name, ok, detail):
    line = f"[criterion {num:2d}] {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    VERDICTS.append(line)
    print(flush=True)
    print(line, flush=True)
    assert ok, line


# -- criterion 1: gradient suite ---------------------------------------------


def test_c01_gradient_suite():
    t0 = time.time()
    rng = np.random.default_rng(0)
    tol = 1e-4
    worst = 0.0

    def check(net, in_dim, targets, cap=None):
        nonlocal worst
        x = rng.standard_normal((3, in_dim))
        rep = grad_check(net, x, targets, tol=tol, max_params_per_array=cap,
                        seed=1)
        worst = max(worst, rep.max_rel_error)
        assert rep.passed, f"max rel err {rep.max_rel_error:.2e}"

    y3 = np.array([0, 2, 1])
    # each layer type in isolation (plus both conv axes and overlap fusion)
    check(Network([Dense(7, 5, "sigmoid", rng), Dense(5, 3, "softmax", rng)],
                  loss="ce"), 7, y3)
    check(Network([Dense(6, 4, "linear", rng)], loss="mse"),
          6, rng.standard_normal((3, 4)))
    g = Geometry(5, 2, 9)
    check(Network([Conv1D("freq", 4, 3, 2, g, rng), Dense(12, 3, "softmax",
                  rng)], loss="ce"), g.size, y3)
    check(Network([Conv1D("time", 4, 3, 2, g, rng), Dense(4, 3, "softmax",
                  rng)], loss="ce"), g.size, y3)
    fusion = Parallel(
        [(slice(0, g.size), Conv1D("freq", 4, 3, 2, g, rng)),
         (slice(0, g.size), Conv1D("time", 4, 3, 2, g, rng))], g.size)
    check(Network([fusion, Dense(16, 3, "softmax", rng)], loss="ce"),
          g.size, y3)

    # small random instance of each full architecture
    ag = Geometry(17, 1, 13)
    tvg = Geometry(17, 1, 4)
    for arch in ARCHS:
        net = build_acoustic_model(
            arch, "small", 5, acoustic_geometry=ag,
            tv_geometry=tvg if arch == "fcnn" else None, seed=3)
        in_dim = ag.size + (tvg.size if arch == "fcnn" else 0)
        check(net, in_dim, y3, cap=20)

    elapsed = time.time() - t0
    report(1, "gradient suite", worst < tol and elapsed < 60.0,
           f"max rel err {worst:.2e}, {elapsed:.1f} s")


# -- criterion 2: overfit sanity ---------------------------------------------


@pytest.fixture(scope="module")
def toy_200():
    from dysasr.experiment import DEFAULT_VOCAB

    utts = generate_corpus(200, list(DEFAULT_VOCAB), seed=0)
    ds, _ = prepare_features(utts, "mfb")
    ds_tv, _ = append_tv_block(ds, [u.tv_truth.values for u in utts])
    return ds.stacked(), ds_tv.stacked()


RECIPES = {  # constant-lr memorization settings per architecture
    "dnn": (0.6, 128),
    "cnn": (0.9, 96),
    "tfcnn": (0.9, 96),
    "fcnn": (0.6, 96),
}


def test_c02_overfit_sanity(toy_200):
    (x, y), (x_tv, _) = toy_200
    details = []
    ok = True
    for arch in ARCHS:
        xx = x_tv if arch == "fcnn" else x
        lr0, batch = RECIPES[arch]
        t0 = time.time()
        clf = FrameClassifier(
            arch=arch, tv_dims=6 if arch == "fcnn" else 0,
            lr0=lr0, batch=batch, max_epochs=30, min_epochs=30,
            target_train_accuracy=0.99, seed=0)
        clf.fit(xx, y, xx[:256], y[:256])
        dt = time.time() - t0
        acc = clf.score(xx, y)
        ok &= acc >= 0.99 and clf.train_log_.epochs <= 30 and dt < 600.0
        details.append(f"{arch} {acc:.3f}/{clf.train_log_.epochs}ep/{dt:.0f}s")
    report(2, "overfit sanity", ok, ", ".join(details))


# -- criterion 3: shape ledger -----------------------------------------------


def test_c03_shape_ledger():
    fm = FeatureMatrix(np.zeros((30, 120)), kind="mfb+d")
    spliced_dim = splice(fm, 8, 8).dims
    g = Geometry(17, 3, 40)
    fconv = Conv1D("freq", 200, 8, 3, g)
    tconv = Conv1D("time", 75, 8, 5, g)
    net = build_acoustic_model("dnn", "small", 39, bottleneck=60)
    bn = net.forward_until(3, np.zeros((2, 2040), dtype=np.float32))
    n_params = sum(p.size for p in build_acoustic_model("dnn", "small", 39).params())
    ok = (
        spliced_dim == 2040
        and (fconv.n_pooled, fconv.n_filters) == (11, 200)
        and (tconv.n_pooled, tconv.n_filters) == (2, 75)
        and bn.shape[1] == 60
        and n_params == 5_278_759
    )
    report(3, "shape ledger", ok,
           f"input {spliced_dim}, freq {fconv.n_pooled}x{fconv.n_filters}, "
           f"time {tconv.n_pooled}x{tconv.n_filters}, bn {bn.shape[1]}, "
           f"dnn-small params {n_params}")


# -- criterion 4: inversion --------------------------------------------------


def test_c04_inversion():
    vocab = ["data", "tag", "fit", "keep"]
    utts = generate_corpus(100, vocab, seed=7)
    train, cv, test = split_corpus(utts, fractions=(0.88, 0.02, 0.10), seed=0)

    kwargs = dict(feature_kind="gfb", hidden_width=512, n_hidden=2,
                  conv_filters=100, conv_span=8, conv_pool=3, splice_half=35,
                  lr0=0.01, batch=256, max_epochs=20, min_epochs=20, seed=0)
    clean_r = SpeechInverter(**kwargs).fit(train, cv).evaluate(test).mean_r

    noisy = [
        mix_noise(u, NOISE_KINDS[i % len(NOISE_KINDS)], 15.0 + (i % 4) * 10.0,
                  seed=i)
        for i, u in enumerate(train)
    ]
    mc_r = (SpeechInverter(**kwargs).fit(train + noisy, cv)
            .evaluate(test).mean_r)

    ok = clean_r >= 0.80 and clean_r - mc_r <= 0.05
    report(4, "inversion", ok,
           f"clean mean r {clean_r:.3f}, multi-condition {mc_r:.3f}")


# -- criteria 5 and 6: adaptation direction, strategy harness ----------------


def _base_plan(**overrides):
    defaults = dict(
        seed=0,
        vocab=DEFAULT_VOCAB,
        feature="mfb",
        n_normal=40,
        n_dysarthric=30,
        profile=DysarthriaProfile(slowdown=1.5, undershoot=0.7,
                                  tremor_amp=0.3),
        split=(0.6, 0.1, 0.3),
        lr0=0.5,
        batch=128,
        max_epochs=5,
        min_epochs=5,
    )
    defaults.update(overrides)
    return ExperimentPlan(**defaults)


def test_c05_adaptation_direction():
    from dysasr.pipelines import AdaptConfig

    seeds = (0, 1, 2)
    systems = []
    for arch in ARCHS:
        systems.append(SystemSpec(name=f"{arch}-base", arch=arch,
                                  train_corpus="normal", seeds=seeds))
        systems.append(SystemSpec(name=f"{arch}-adapted", arch=arch,
                                  train_corpus="normal", adapt=True,
                                  seeds=seeds))
    plan = _base_plan(
        systems=tuple(systems),
        adapt_config=AdaptConfig(lr0=0.05, min_epochs=3, max_epochs=5),
    )
    _, records = run_experiment(plan)
    by_system = {}
    for rec in records:
        by_system.setdefault(rec["system"], []).append(rec["wer"])

    ok = True
    details = []
    for arch in ARCHS:
        base = float(np.mean(by_system[f"{arch}-base"]))
        adapted = float(np.mean(by_system[f"{arch}-adapted"]))
        ok &= adapted <= base
        details.append(f"{arch} {base:.1f}->{adapted:.1f}%")
    report(5, "adaptation direction", ok, ", ".join(details))


def test_c06_strategy_harness():
    rows_spec = [
        ("A-dys", "A", False, False),
        ("B", "B", False, False),
        ("B-adapt-bn", "B", True, False),
        ("C", "C", False, False),
        ("C-adapt-bn", "C", True, False),
        ("C-adapt-am", "C", False, True),
        ("C-dual", "C", True, True),
    ]
    systems = tuple(
        SystemSpec(name=name, mode="bn", strategy=strategy,
                   adapt_bn=abn, adapt_am=aam)
        for name, strategy, abn, aam in rows_spec
    )
    from dysasr.pipelines import AdaptConfig

    plan = _base_plan(
        systems=systems,
        adapt_config=AdaptConfig(lr0=0.05, min_epochs=3, max_epochs=5),
    )
    rows, records = run_experiment(plan)
    ok = len(rows) == len(rows_spec) and all(
        row.wer is not None and np.isfinite(row.wer) for row in rows)
    ordering = ", ".join(
        f"{rec['system']} {rec['wer']:.1f}%" for rec in records)
    report(6, "strategy harness", ok, f"complete table; ordering: {ordering}")


# -- criterion 7: decoder oracle ---------------------------------------------


def test_c07_decoder_oracle():
    lexicon = ["at", "ta", "s"]
    lm = TrigramLM().fit([["at", "ta"], ["s", "at"], ["ta"], ["s", "s"]])
    rng = np.random.default_rng(2024)
    mismatches = 0
    for _ in range(100):
        n_frames = int(rng.integers(3, 21))
        post, priors = random_instance(rng, n_frames)
        got = viterbi_decode(post, priors, lexicon, lm)
        want_words, want_score = brute_force_decode(post, priors, lexicon, lm)
        if got.words != want_words or abs(got.log_score - want_score) > 1e-9:
            mismatches += 1
    report(7, "decoder oracle", mismatches == 0,
           f"{100 - mismatches}/100 instances matched exhaustive search")


# -- criterion 8: WER oracle -------------------------------------------------


def test_c08_wer_oracle():
    rng = np.random.default_rng(8)
    vocab = ["a", "b", "c", "d", "e"]
    mismatches = 0
    for _ in range(1000):
        ref = [vocab[i] for i in rng.integers(0, 5, rng.integers(1, 11))]
        hyp = [vocab[i] for i in rng.integers(0, 5, rng.integers(0, 11))]
        if wer(ref, hyp).n_errors != edit_distance(ref, hyp):
            mismatches += 1

    r1 = wer(["a", "b", "c"], ["a", "x", "c"])
    r2 = wer(["a", "b", "c"], [])
    r3 = wer(["a"], ["a", "b", "c"])
    worked = (
        (r1.substitutions, round(r1.wer, 2)) == (1, 33.33)
        and (r2.deletions, r2.wer) == (3, 100.0)
        and (r3.insertions, r3.wer) == (2, 200.0)
    )
    report(8, "WER oracle", mismatches == 0 and worked,
           f"{1000 - mismatches}/1000 pairs matched; worked examples "
           f"{'hold' if worked else 'broken'}")


# -- criterion 9: SNR mixing -------------------------------------------------


def test_c09_snr_mixing():
    base = [generate_utterance(f"u{i}", ["data", "tag"], None, seed=i)
            for i in range(5)]
    rng = np.random.default_rng(9)
    worst = 0.0
    for i in range(1000):
        u = base[i % len(base)]
        kind = NOISE_KINDS[i % len(NOISE_KINDS)]
        snr = float(rng.uniform(10.0, 80.0))
        noisy = mix_noise(u, kind, snr, seed=i)
        noise = noisy.samples - u.samples
        measured = 10.0 * np.log10(np.mean(u.samples**2) / np.mean(noise**2))
        worst = max(worst, abs(measured - snr))

    with pytest.raises(ValidationError):
        mix_noise(base[0], "white", 5.0)
    with pytest.raises(ValidationError):
        mix_noise(base[0], "white", 90.0)
    report(9, "SNR mixing", worst <= 0.01,
           f"max error {worst:.2e} dB over 1000 draws; range [10, 80] enforced")


# -- criterion 10: CLI determinism -------------------------------------------


def test_c10_cli_determinism(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)

    def cli(*argv):
        code = cli_main(list(argv))
        capsys.readouterr()
        assert code == 0

    plan = {
        "seed": 0, "vocab": ["data", "tag"], "n_normal": 10,
        "n_dysarthric": 8, "split": [0.6, 0.2, 0.2],
        "profile": {"slowdown": 1.2, "undershoot": 0.3},
        "lr0": 0.05, "max_epochs": 1,
        "systems": [{"name": "dnn", "mode": "am", "arch": "dnn",
                     "train_corpus": "dysarthric"}],
    }
    (tmp_path / "plan.json").write_text(json.dumps(plan))

    for tag in ("a", "b"):
        cli("synth-corpus", "--out", f"{tag}/corpus", "--n-utts", "6",
            "--vocab", "data,tag", "--seed", "5")
        cli("featurize", "--manifest", f"{tag}/corpus/manifest.tsv",
            "--kind", "mfb", "--deltas", "--splice", "8",
            "--save-normalizer", f"{tag}/norm", "--out", f"{tag}/feats.farc")
        cli("train-am", "--manifest", f"{tag}/corpus/manifest.tsv",
            "--features", f"{tag}/feats.farc", "--arch", "dnn",
            "--out", f"{tag}/am", "--lr0", "0.05", "--max-epochs", "1")
        cli("decode", "--model", f"{tag}/am", "--features",
            f"{tag}/feats.farc", "--train-manifest",
            f"{tag}/corpus/manifest.tsv", "--test-manifest",
            f"{tag}/corpus/manifest.tsv", "--out", f"{tag}/hyp.tsv")
        cli("experiment", "run", "plan.json", "--out-dir", f"{tag}/exp")

    artifacts = ["corpus/manifest.tsv", "corpus/wav/u0000.wav",
                 "corpus/ali/u0000.ali", "corpus/tv/u0000.tv", "feats.farc",
                 "norm", "am", "am.meta.json", "hyp.tsv",
                 "exp/report.tsv", "exp/records.json", "exp/report.md"]
    differing = [rel for rel in artifacts
                 if not filecmp.cmp(f"a/{rel}", f"b/{rel}", shallow=False)]
    report(10, "CLI determinism", not differing,
           f"{len(artifacts)} artifacts byte-identical"
           + (f"; differing: {differing}" if differing else ""))
