"""Command-line interface.

Every subcommand exits 0 on success. On failure a single JSON object
``{"error": <type>, "message": <text>}`` is printed to stderr and the exit
code is nonzero. All artifacts are deterministic: re-running a command
with identical inputs and seeds produces byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import framing
from .arch import ARCH_KINDS, SIZE_CLASSES, FrameClassifier
from .corpus import (
    DysarthriaProfile,
    NOISE_KINDS,
    generate_corpus,
    load_manifest,
    load_utterances,
    mix_noise,
    write_alignment,
    write_tv_file,
    write_wav,
)
from .corpus.lexicon import NUM_LABELS
from .decode import TrigramLM, estimate_priors, viterbi_decode, wer_corpus
from .errors import DysasrError, ManifestError, ValidationError
from .experiment import ExperimentPlan, raw_features, run_experiment
from .frontend import (
    FeatureMatrix,
    FeatureNormalizer,
    FrontendConfig,
    add_deltas,
    nmc_features,
    read_archive,
    splice,
    write_archive,
)
from .inversion import SpeechInverter
from .pipelines import AdaptConfig, adapt_network
from .store import load_model, save_classifier, save_inverter


# ---- helpers ----------------------------------------------------------------


def _utt_features(utt, kind: str, config: FrontendConfig) -> FeatureMatrix:
    if kind == "nmc":
        return nmc_features(utt.samples, config, utt_id=utt.id)
    return raw_features(utt, kind, config)


def _load_features(path: str) -> dict[str, FeatureMatrix]:
    return {fm.utt_id: fm for fm in read_archive(path)}


def _stack_for_training(manifest_path: str, features_path: str):
    """Stack archive features + manifest alignments into (X, y)."""
    manifest = load_manifest(manifest_path)
    feats = _load_features(features_path)
    xs, ys = [], []
    for utt in load_utterances(manifest):
        if utt.id not in feats:
            raise ManifestError(f"no features for utterance {utt.id!r}")
        if utt.frame_labels is None:
            raise ManifestError(f"utterance {utt.id!r} has no alignment")
        fm = feats[utt.id]
        if fm.n_frames != len(utt.frame_labels):
            raise ValidationError(
                f"{utt.id}: {fm.n_frames} feature frames vs "
                f"{len(utt.frame_labels)} labels"
            )
        xs.append(fm.data)
        ys.append(utt.frame_labels)
    return (
        np.concatenate(xs).astype(np.float32),
        np.concatenate(ys),
    )


def _profile_from_args(args) -> DysarthriaProfile | None:
    if args.slowdown == 1.0 and args.undershoot == 0.0 and args.tremor_amp == 0.0:
        return None
    return DysarthriaProfile(
        slowdown=args.slowdown,
        undershoot=args.undershoot,
        tremor_amp=args.tremor_amp,
        tremor_hz=args.tremor_hz,
        seed=args.profile_seed,
    )


def _classifier_overrides(args) -> dict:
    out = {}
    for name in ("lr0", "batch", "max_epochs", "min_epochs",
                 "target_train_accuracy"):
        val = getattr(args, name, None)
        if val is not None:
            out[name] = val
    return out


# ---- subcommands ------------------------------------------------------------


def cmd_synth_corpus(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    for sub in ("wav", "ali", "tv"):
        os.makedirs(os.path.join(args.out, sub), exist_ok=True)
    vocab = args.vocab.split(",")
    utts = generate_corpus(args.n_utts, vocab, _profile_from_args(args),
                           seed=args.seed)
    if args.noise_kind:
        utts = [mix_noise(u, args.noise_kind, args.snr_db, seed=args.noise_seed)
                for u in utts]
    lines = []
    for u in utts:
        wav = os.path.join("wav", f"{u.id}.wav")
        ali = os.path.join("ali", f"{u.id}.ali")
        tv = os.path.join("tv", f"{u.id}.tv")
        write_wav(os.path.join(args.out, wav), u.samples, framing.SAMPLE_RATE)
        write_alignment(os.path.join(args.out, ali), u.frame_labels)
        write_tv_file(os.path.join(args.out, tv), u.tv_truth)
        lines.append("\t".join([u.id, wav, " ".join(u.transcription), ali, tv]))
    with open(os.path.join(args.out, "manifest.tsv"), "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    print(json.dumps({"utterances": len(utts),
                      "manifest": os.path.join(args.out, "manifest.tsv")}))
    return 0


def cmd_featurize(args) -> int:
    manifest = load_manifest(args.manifest)
    config = FrontendConfig()
    feats = [_utt_features(u, args.kind, config)
             for u in load_utterances(manifest)]
    if args.deltas:
        feats = [add_deltas(fm) for fm in feats]
    if args.normalizer:
        norm = FeatureNormalizer.load(args.normalizer)
        feats = norm.transform_all(feats)
    elif args.save_normalizer:
        norm = FeatureNormalizer().fit(feats)
        norm.save(args.save_normalizer)
        feats = norm.transform_all(feats)
    if args.splice > 0:
        feats = [splice(fm, args.splice, args.splice) for fm in feats]
    write_archive(args.out, feats)
    print(json.dumps({"utterances": len(feats), "dims": feats[0].dims,
                      "kind": feats[0].kind, "out": args.out}))
    return 0


def cmd_train_inversion(args) -> int:
    train = load_utterances(load_manifest(args.manifest))
    cv = (load_utterances(load_manifest(args.cv_manifest))
          if args.cv_manifest else None)
    inv = SpeechInverter(
        feature_kind=args.feature_kind,
        hidden_width=args.hidden_width,
        n_hidden=args.n_hidden,
        splice_half=args.splice_half,
        lr0=args.lr0 if args.lr0 is not None else 0.008,
        max_epochs=args.max_epochs if args.max_epochs is not None else 15,
        seed=args.seed,
    )
    inv.fit(train, cv)
    save_inverter(args.out, inv)
    report = inv.evaluate(cv if cv else train)
    print(json.dumps({"out": args.out, "mean_r": round(report.mean_r, 4)}))
    return 0


def cmd_estimate_tvs(args) -> int:
    inv, _ = load_model(args.model)
    if not isinstance(inv, SpeechInverter):
        raise ValidationError(f"{args.model} is not an inversion model")
    if args.no_smooth:
        inv.smooth_estimates = False
    os.makedirs(args.out_dir, exist_ok=True)
    utts = load_utterances(load_manifest(args.manifest))
    for u in utts:
        tv = inv.predict(u)
        write_tv_file(os.path.join(args.out_dir, f"{u.id}.tv"), tv)
    print(json.dumps({"utterances": len(utts), "out_dir": args.out_dir}))
    return 0


def _train_classifier(args, bottleneck: int | None) -> int:
    x, y = _stack_for_training(args.manifest, args.features)
    if args.cv_manifest:
        x_cv, y_cv = _stack_for_training(args.cv_manifest, args.cv_features)
    else:
        x_cv = y_cv = None
    clf = FrameClassifier(
        arch=args.arch, size=args.size, n_classes=NUM_LABELS,
        freq_bins=args.freq_bins, context=args.context, channels=args.channels,
        tv_dims=args.tv_dims, bottleneck=bottleneck, seed=args.seed,
        **_classifier_overrides(args),
    )
    clf.fit(x, y, x_cv, y_cv)
    save_classifier(args.out, clf)
    print(json.dumps({
        "out": args.out,
        "train_accuracy": round(clf.score(x, y), 4),
        "epochs": len(clf.train_log_.train_losses),
    }))
    return 0


def cmd_train_am(args) -> int:
    return _train_classifier(args, bottleneck=None)


def cmd_train_bn(args) -> int:
    from .arch import BOTTLENECK_DIM

    return _train_classifier(args, bottleneck=BOTTLENECK_DIM)


def cmd_extract_bn(args) -> int:
    clf, _ = load_model(args.model)
    if not isinstance(clf, FrameClassifier):
        raise ValidationError(f"{args.model} is not a classifier")
    feats = read_archive(args.features)
    out = []
    for fm in feats:
        bn = FeatureMatrix(
            clf.extract_bottleneck(fm.data).astype(np.float64),
            kind="bn", utt_id=fm.utt_id,
        )
        if args.splice > 0:
            bn = splice(bn, args.splice, args.splice)
        out.append(bn)
    write_archive(args.out, out)
    print(json.dumps({"utterances": len(out), "dims": out[0].dims,
                      "out": args.out}))
    return 0


def cmd_adapt(args) -> int:
    clf, norm = load_model(args.model)
    if not isinstance(clf, FrameClassifier):
        raise ValidationError(f"{args.model} is not a classifier")
    x, y = _stack_for_training(args.manifest, args.features)
    if args.cv_manifest:
        x_cv, y_cv = _stack_for_training(args.cv_manifest, args.cv_features)
    else:
        x_cv, y_cv = x, y
    n_layers = "all" if args.n_retrained_layers == "all" else int(args.n_retrained_layers)
    config = AdaptConfig(
        lr0=args.lr0, min_epochs=args.min_epochs, max_epochs=args.max_epochs,
        n_retrained_layers=n_layers,
    )
    adapted = FrameClassifier(**clf.get_params())
    adapted.network_, log = adapt_network(
        clf.network_, x, y, x_cv, y_cv, config, seed=args.seed)
    save_classifier(args.out, adapted, norm)
    print(json.dumps({"out": args.out,
                      "epochs": len(log.train_losses),
                      "cv_accuracy": round(adapted.score(x_cv, y_cv), 4)}))
    return 0


def cmd_decode(args) -> int:
    clf, _ = load_model(args.model)
    if not isinstance(clf, FrameClassifier):
        raise ValidationError(f"{args.model} is not a classifier")
    train_man = load_manifest(args.train_manifest)
    test_man = load_manifest(args.test_manifest)
    train_utts = load_utterances(train_man)
    test_utts = load_utterances(test_man)

    lexicon = sorted({w for u in train_utts + test_utts for w in u.transcription})
    if args.lm_train_set == "train":
        sents = [u.transcription for u in train_utts]
    else:
        sents = [u.transcription for u in test_utts]
    lm = TrigramLM().fit(sents)
    priors = estimate_priors(
        [u.frame_labels for u in train_utts if u.frame_labels is not None],
        NUM_LABELS,
    )

    feats = _load_features(args.features)
    beam = float("inf") if args.beam is None else args.beam
    lines = []
    for u in test_utts:
        if u.id not in feats:
            raise ManifestError(f"no features for utterance {u.id!r}")
        post = clf.predict_proba(feats[u.id].data)
        result = viterbi_decode(post, priors, lexicon, lm, beam=beam)
        lines.append(f"{u.id}\t{' '.join(result.words)}")
    with open(args.out, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    print(json.dumps({"utterances": len(lines), "out": args.out}))
    return 0


def cmd_score(args) -> int:
    test_utts = load_utterances(load_manifest(args.ref))
    refs = {u.id: u.transcription for u in test_utts}
    hyps = {}
    with open(args.hyp, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ManifestError(f"{args.hyp}:{lineno}: expected id<TAB>words")
            hyps[parts[0]] = parts[1].split()
    missing = sorted(set(refs) - set(hyps))
    if missing:
        raise ManifestError(f"hypotheses missing for: {', '.join(missing)}")
    report = wer_corpus([(refs[i], hyps.get(i, [])) for i in sorted(refs)])
    payload = {
        "substitutions": report.substitutions,
        "deletions": report.deletions,
        "insertions": report.insertions,
        "n_ref": report.n_ref,
        "wer": round(report.wer, 2),
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write("S\tD\tI\tN\twer\n")
            f.write(f"{report.substitutions}\t{report.deletions}\t"
                    f"{report.insertions}\t{report.n_ref}\t{report.wer:.2f}\n")
    print(json.dumps(payload))
    return 0


def cmd_experiment_run(args) -> int:
    from .decode import write_report

    plan = ExperimentPlan.from_json(args.plan)
    rows, records = run_experiment(plan)
    os.makedirs(args.out_dir, exist_ok=True)
    tsv = os.path.join(args.out_dir, "report.tsv")
    md = os.path.join(args.out_dir, "report.md")
    write_report(rows, tsv, md)
    with open(os.path.join(args.out_dir, "records.json"), "w",
              encoding="utf-8") as f:
        json.dump(records, f, sort_keys=True, indent=1)
        f.write("\n")
    print(json.dumps({"rows": len(rows), "report": tsv}))
    return 0


# ---- argument parsing -------------------------------------------------------


def _add_train_flags(p):
    p.add_argument("--lr0", type=float, default=None)
    p.add_argument("--batch", type=int, default=None)
    p.add_argument("--max-epochs", type=int, default=None)
    p.add_argument("--min-epochs", type=int, default=None)
    p.add_argument("--target-train-accuracy", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)


def _add_geometry_flags(p):
    p.add_argument("--freq-bins", type=int, default=40,
                   help="feature bins per channel (60 for bottleneck features)")
    p.add_argument("--context", type=int, default=17,
                   help="spliced context length in frames")
    p.add_argument("--channels", type=int, default=3,
                   help="feature streams per frame (3 = statics+deltas+deltadeltas)")
    p.add_argument("--tv-dims", type=int, default=0,
                   help="TV dims appended per frame (fcnn only)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dysasr",
        description="Synthetic dysarthric speech recognition pipeline.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-corpus", help="generate a synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--n-utts", type=int, required=True)
    p.add_argument("--vocab", required=True, help="comma-separated word list")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--slowdown", type=float, default=1.0)
    p.add_argument("--undershoot", type=float, default=0.0)
    p.add_argument("--tremor-amp", type=float, default=0.0)
    p.add_argument("--tremor-hz", type=float, default=5.0)
    p.add_argument("--profile-seed", type=int, default=0)
    p.add_argument("--noise-kind", choices=NOISE_KINDS, default=None)
    p.add_argument("--snr-db", type=float, default=20.0)
    p.add_argument("--noise-seed", type=int, default=0)
    p.set_defaults(func=cmd_synth_corpus)

    p = sub.add_parser("featurize", help="compute a feature archive")
    p.add_argument("--manifest", required=True)
    p.add_argument("--kind", choices=("mfb", "gfb", "nmc"), default="mfb")
    p.add_argument("--out", required=True)
    p.add_argument("--deltas", action="store_true")
    p.add_argument("--splice", type=int, default=0, help="context half-width")
    p.add_argument("--normalizer", default=None,
                   help="load normalizer stats from this file")
    p.add_argument("--save-normalizer", default=None,
                   help="fit a normalizer on this corpus and save stats")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train-inversion",
                       help="train acoustic-to-articulatory inversion")
    p.add_argument("--manifest", required=True)
    p.add_argument("--cv-manifest", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--feature-kind", choices=("nmc", "gfb"), default="nmc")
    p.add_argument("--hidden-width", type=int, default=2048)
    p.add_argument("--n-hidden", type=int, default=3)
    p.add_argument("--splice-half", type=int, default=35)
    p.add_argument("--lr0", type=float, default=None)
    p.add_argument("--max-epochs", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_inversion)

    p = sub.add_parser("estimate-tvs", help="write estimated TV trajectories")
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--no-smooth", action="store_true")
    p.set_defaults(func=cmd_estimate_tvs)

    for name, func, extra_help in (
        ("train-am", cmd_train_am, "train an acoustic model"),
        ("train-bn", cmd_train_bn, "train a bottleneck extractor"),
    ):
        p = sub.add_parser(name, help=extra_help)
        p.add_argument("--manifest", required=True)
        p.add_argument("--features", required=True)
        p.add_argument("--cv-manifest", default=None)
        p.add_argument("--cv-features", default=None)
        p.add_argument("--arch", choices=ARCH_KINDS, default="dnn")
        p.add_argument("--size", choices=sorted(SIZE_CLASSES), default="small")
        p.add_argument("--out", required=True)
        _add_geometry_flags(p)
        _add_train_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("extract-bn", help="extract bottleneck features")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--splice", type=int, default=0, help="context half-width")
    p.set_defaults(func=cmd_extract_bn)

    p = sub.add_parser("adapt", help="adapt a trained model to new data")
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--cv-manifest", default=None)
    p.add_argument("--cv-features", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--lr0", type=float, default=0.001)
    p.add_argument("--min-epochs", type=int, default=3)
    p.add_argument("--max-epochs", type=int, default=10)
    p.add_argument("--n-retrained-layers", default="all")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("decode", help="decode a test set to word hypotheses")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True,
                   help="feature archive for the test manifest")
    p.add_argument("--train-manifest", required=True,
                   help="supplies LM text, lexicon and state priors")
    p.add_argument("--test-manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lm-train-set", choices=("train", "test-transcripts"),
                   default="train")
    p.add_argument("--beam", type=float, default=None)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("score", help="score hypotheses against references")
    p.add_argument("--ref", required=True, help="reference manifest")
    p.add_argument("--hyp", required=True, help="hypothesis TSV from decode")
    p.add_argument("--out", default=None, help="optional report TSV")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("experiment", help="experiment plans")
    esub = p.add_subparsers(dest="experiment_command", required=True)
    pr = esub.add_parser("run", help="execute a plan JSON and write reports")
    pr.add_argument("plan")
    pr.add_argument("--out-dir", required=True)
    pr.set_defaults(func=cmd_experiment_run)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DysasrError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}),
              file=sys.stderr)
        return 1
    except OSError as e:
        print(json.dumps({"error": "OSError", "message": str(e)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
