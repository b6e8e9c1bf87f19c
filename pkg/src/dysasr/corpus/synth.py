"""Synthetic speech generation.

An utterance is built in three stages:

1. a frame-level phone-state timeline (labels are exact by construction),
2. TV trajectories as critically damped second-order responses to the
   per-phone articulatory targets, optionally perturbed by a
   DysarthriaProfile (slowdown / undershoot / tremor),
3. audio from a pulse-or-noise excitation driving three cascaded
   second-order resonators whose center frequencies and bandwidths are a
   fixed linear map of the TVs.

Everything is deterministic given the seed.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

from ..errors import ValidationError
from ..framing import HOP_SAMPLES, SAMPLE_RATE, samples_for_frames
from .lexicon import STATES_PER_PHONE, Phone, phones_for_word, state_label
from .types import DysarthriaProfile, TVTrajectory, Utterance

FRAME_PERIOD_S = HOP_SAMPLES / SAMPLE_RATE

# critically damped tracking stiffness (rad/s); settles in ~70 ms
TV_OMEGA = 60.0

F0_HZ = 120.0
NOISE_FLOOR = 1e-4

# Linear articulatory-to-acoustic map: three resonators (Hz).
FORMANT_BASE = np.array([550.0, 1500.0, 2600.0])
FORMANT_GAIN = np.array(
    [
        # LA     LP    TBCL   TBCD   TTCL   TTCD
        [0.0, 0.0, 0.0, 250.0, 0.0, 0.0],
        [0.0, 0.0, 700.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 400.0, 0.0],
    ]
)
BANDWIDTH_BASE = np.array([90.0, 120.0, 180.0])
BANDWIDTH_GAIN = np.array(
    [
        [50.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 60.0],
        [0.0, 70.0, 0.0, 0.0, 0.0, 0.0],
    ]
)
MIN_BANDWIDTH = 40.0


def _phone_timeline(
    words: list[str], rng: np.random.Generator, slowdown: float
) -> tuple[list[Phone], np.ndarray, np.ndarray]:
    """Phone sequence, per-phone frame durations and per-frame labels.

    Duration jitter is drawn before the slowdown is applied, so the same rng
    stream gives identical base timing for perturbed and clean renderings.
    The slowdown stretches cumulative boundaries, keeping the total duration
    within one frame of slowdown x base.
    """
    phones: list[Phone] = []
    for word in words:
        phones.extend(phones_for_word(word))
    base = np.array(
        [p.duration_frames + rng.integers(-2, 3) if p.duration_frames >= 10
         else p.duration_frames + rng.integers(-1, 2)
         for p in phones],
        dtype=np.float64,
    )
    bounds = np.round(np.cumsum(base) * slowdown).astype(int)
    durations = np.diff(np.concatenate([[0], bounds]))
    if np.any(durations < STATES_PER_PHONE):
        raise ValidationError("phone shorter than its state count")

    labels = []
    for phone, d in zip(phones, durations):
        n1 = d // 3
        n3 = d // 3
        n2 = d - n1 - n3
        for state, n in ((0, n1), (1, n2), (2, n3)):
            labels.extend([state_label(phone, state)] * n)
    return phones, durations, np.array(labels, dtype=np.int64)


def _tv_response(targets: np.ndarray) -> np.ndarray:
    """Critically damped second-order tracking of per-frame targets."""
    dt = FRAME_PERIOD_S
    w = TV_OMEGA
    x = targets[0].copy()
    v = np.zeros_like(x)
    out = np.empty_like(targets)
    for i in range(len(targets)):
        a = w * w * (targets[i] - x) - 2.0 * w * v
        v = v + dt * a
        x = x + dt * v
        out[i] = x
    return out


def _resonator_params(tv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    freqs = FORMANT_BASE + tv @ FORMANT_GAIN.T
    bws = np.maximum(BANDWIDTH_BASE + tv @ BANDWIDTH_GAIN.T, MIN_BANDWIDTH)
    return freqs, bws


def _excitation(
    phones_per_frame: list[Phone], n_samples: int, rng: np.random.Generator
) -> np.ndarray:
    exc = rng.standard_normal(n_samples) * NOISE_FLOOR
    phase = 0.0
    for i, phone in enumerate(phones_per_frame):
        lo = i * HOP_SAMPLES
        hi = min(lo + HOP_SAMPLES, n_samples) if i < len(phones_per_frame) - 1 else n_samples
        if phone.excitation == "voiced":
            for n in range(lo, hi):
                phase += F0_HZ / SAMPLE_RATE
                if phase >= 1.0:
                    phase -= 1.0
                    exc[n] += phone.amplitude
        else:
            exc[lo:hi] += rng.standard_normal(hi - lo) * phone.amplitude * 0.1
    return exc


def _render_audio(
    tv: np.ndarray, phones_per_frame: list[Phone], rng: np.random.Generator
) -> np.ndarray:
    n_frames = len(phones_per_frame)
    n_samples = samples_for_frames(n_frames)
    exc = _excitation(phones_per_frame, n_samples, rng)
    freqs, bws = _resonator_params(tv)

    out = exc
    for stage in range(3):
        r = np.exp(-np.pi * bws[:, stage] / SAMPLE_RATE)
        theta = 2.0 * np.pi * freqs[:, stage] / SAMPLE_RATE
        b_coef = 2.0 * r * np.cos(theta)
        c_coef = -(r * r)
        a_gain = 1.0 - b_coef - c_coef
        y = np.empty_like(out)
        zi = np.zeros(2)
        for i in range(n_frames):
            lo = i * HOP_SAMPLES
            hi = lo + HOP_SAMPLES if i < n_frames - 1 else n_samples
            y[lo:hi], zi = lfilter(
                [a_gain[i]], [1.0, -b_coef[i], -c_coef[i]], out[lo:hi], zi=zi
            )
        out = y
    return out


def generate_utterance(
    utt_id: str,
    words: list[str],
    profile: DysarthriaProfile | None,
    seed: int,
) -> Utterance:
    """Synthesize one utterance with exact labels and TV ground truth."""
    timing_rng = np.random.default_rng([seed, 0])
    audio_rng = np.random.default_rng([seed, 1])

    slowdown = profile.slowdown if profile else 1.0
    phones, durations, labels = _phone_timeline(words, timing_rng, slowdown)

    targets = np.repeat(
        np.array([p.targets for p in phones], dtype=np.float64), durations, axis=0
    )
    if profile is not None and profile.undershoot > 0.0:
        targets = targets * (1.0 - profile.undershoot)
    tv = _tv_response(targets)
    if profile is not None and profile.tremor_amp > 0.0:
        tremor_rng = np.random.default_rng([profile.seed, seed])
        phases = tremor_rng.uniform(0.0, 2.0 * np.pi, size=tv.shape[1])
        t = np.arange(len(tv))[:, None] * FRAME_PERIOD_S
        tv = tv + profile.tremor_amp * np.sin(
            2.0 * np.pi * profile.tremor_hz * t + phases[None, :]
        )

    phones_per_frame = [p for p, d in zip(phones, durations) for _ in range(d)]
    samples = _render_audio(tv, phones_per_frame, audio_rng)

    return Utterance(
        id=utt_id,
        samples=samples,
        transcription=list(words),
        frame_labels=labels,
        tv_truth=TVTrajectory(tv),
    )


def generate_corpus(
    n_utts: int,
    vocab: list[str],
    profile: DysarthriaProfile | None = None,
    seed: int = 0,
) -> list[Utterance]:
    """Generate `n_utts` utterances of 1-3 words drawn from `vocab`."""
    if n_utts < 1:
        raise ValidationError("n_utts must be >= 1")
    if not vocab:
        raise ValidationError("vocab must be non-empty")
    for word in vocab:
        phones_for_word(word)  # fail fast on unknown phones

    pick_rng = np.random.default_rng([seed, 2])
    utts = []
    for i in range(n_utts):
        n_words = int(pick_rng.integers(1, 4))
        words = [vocab[int(pick_rng.integers(len(vocab)))] for _ in range(n_words)]
        utts.append(generate_utterance(f"u{i:04d}", words, profile, seed * 100003 + i))
    return utts
