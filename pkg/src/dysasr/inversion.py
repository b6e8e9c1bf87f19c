"""Acoustic-to-articulatory inversion.

A convolutional regression network maps spliced subband-modulation (or
gammatone) features to the six TV trajectories. Estimates are Kalman
smoothed (random-walk model, RTS backward pass) at estimation time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .corpus.types import TVTrajectory, Utterance
from .errors import NotTrainedError, ValidationError
from .frontend import (
    FeatureMatrix,
    FeatureNormalizer,
    FrontendConfig,
    gammatone_fbank,
    nmc_features,
    splice,
)
from .nn import Conv1D, Dense, Geometry, Network, TrainConfig, sgd_train

INVERSION_SPLICE = 35  # 35 + 1 + 35 = 71 frames

# Random-walk smoother variances per normalized TV unit. The ratio is set
# so that re-smoothing an already-smoothed toy trajectory moves it by well
# under 1% RMS while white noise is still strictly attenuated.
KALMAN_PROCESS_VAR = 0.5
KALMAN_OBSERVATION_VAR = 1e-2


def pearson(x, y) -> float:
    """Pearson product-moment correlation; errors on constant input."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValidationError("pearson needs two equal-length 1-D sequences, n >= 2")
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise ValidationError("correlation undefined for a constant sequence")
    xc = x - x.mean()
    yc = y - y.mean()
    return float(np.dot(xc, yc) / np.sqrt(np.dot(xc, xc) * np.dot(yc, yc)))


def kalman_smooth(
    tv: TVTrajectory,
    process_var: float = KALMAN_PROCESS_VAR,
    observation_var: float = KALMAN_OBSERVATION_VAR,
) -> TVTrajectory:
    """Forward Kalman filter + RTS backward pass under a random-walk model.

    Accepts a TVTrajectory or a plain (frames, dims) array and returns the
    same type.
    """
    as_trajectory = isinstance(tv, TVTrajectory)
    y = tv.values if as_trajectory else np.asarray(tv, dtype=np.float64)
    if y.ndim != 2:
        raise ValidationError("expected a (frames, dims) array")
    if len(y) < 2:
        raise ValidationError("need at least 2 frames to smooth")
    n, d = y.shape
    q, r = process_var, observation_var

    x_filt = np.empty((n, d))
    p_filt = np.empty(n)
    p_pred = np.empty(n)
    x_pred = np.empty((n, d))

    x_filt[0] = y[0]
    p_filt[0] = r
    x_pred[0] = y[0]
    p_pred[0] = r
    for t in range(1, n):
        x_pred[t] = x_filt[t - 1]
        p_pred[t] = p_filt[t - 1] + q
        k = p_pred[t] / (p_pred[t] + r)
        x_filt[t] = x_pred[t] + k * (y[t] - x_pred[t])
        p_filt[t] = (1.0 - k) * p_pred[t]

    x_smooth = x_filt.copy()
    for t in range(n - 2, -1, -1):
        c = p_filt[t] / p_pred[t + 1]
        x_smooth[t] = x_filt[t] + c * (x_smooth[t + 1] - x_pred[t + 1])
    return TVTrajectory(x_smooth) if as_trajectory else x_smooth


@dataclass
class InversionReport:
    per_tv_r: dict[str, float]

    @property
    def mean_r(self) -> float:
        return float(np.mean(list(self.per_tv_r.values())))


class SpeechInverter(BaseEstimator):
    """CNN regressor from spliced modulation features to TV trajectories.

    Front-end is the subband AM tracker by default; `feature_kind='gfb'`
    switches to log-gammatone energies.
    """

    def __init__(
        self,
        feature_kind: str = "nmc",
        hidden_width: int = 2048,
        n_hidden: int = 3,
        conv_filters: int = 200,
        conv_span: int = 8,
        conv_pool: int = 3,
        splice_half: int = INVERSION_SPLICE,
        lr0: float = 0.008,
        batch: int = 256,
        max_epochs: int = 15,
        min_epochs: int = 0,
        seed: int = 0,
        smooth_estimates: bool = True,
    ):
        self.feature_kind = feature_kind
        self.hidden_width = hidden_width
        self.n_hidden = n_hidden
        self.conv_filters = conv_filters
        self.conv_span = conv_span
        self.conv_pool = conv_pool
        self.splice_half = splice_half
        self.lr0 = lr0
        self.batch = batch
        self.max_epochs = max_epochs
        self.min_epochs = min_epochs
        self.seed = seed
        self.smooth_estimates = smooth_estimates
        self.network_ = None
        self.normalizer_ = None
        self.frontend_config_ = FrontendConfig()

    # ---- feature plumbing ---------------------------------------------------

    def _raw_features(self, utt: Utterance) -> FeatureMatrix:
        if self.feature_kind == "nmc":
            return nmc_features(utt.samples, self.frontend_config_, utt_id=utt.id)
        if self.feature_kind == "gfb":
            return gammatone_fbank(utt.samples, self.frontend_config_, utt_id=utt.id)
        raise ValidationError(f"unsupported inversion feature kind {self.feature_kind!r}")

    def _input_matrix(self, utt: Utterance) -> np.ndarray:
        fm = self.normalizer_.transform(self._raw_features(utt))
        return splice(fm, self.splice_half, self.splice_half).data.astype(np.float32)

    # ---- training -----------------------------------------------------------

    def fit(self, utterances: list[Utterance], cv_utterances: list[Utterance] | None = None):
        """Train on utterances carrying tv_truth (multi-condition corpora
        simply include the noise-mixed copies in the list)."""
        for u in utterances:
            if u.tv_truth is None:
                raise ValidationError(f"utterance {u.id} has no tv_truth")
        if cv_utterances is None:
            n_cv = max(1, len(utterances) // 10)
            cv_utterances = utterances[-n_cv:]
            utterances = utterances[:-n_cv]

        raw = [self._raw_features(u) for u in utterances]
        self.normalizer_ = FeatureNormalizer().fit(raw)

        def assemble(utts):
            xs, ys = [], []
            for u in utts:
                x = self._input_matrix(u)
                y = u.tv_truth.values
                if len(y) != len(x):
                    raise ValidationError(
                        f"utterance {u.id}: {len(y)} TV frames vs {len(x)} feature frames"
                    )
                xs.append(x)
                ys.append(y)
            return np.concatenate(xs), np.concatenate(ys).astype(np.float32)

        x_tr, y_tr = assemble(utterances)
        x_cv, y_cv = assemble(cv_utterances)

        n_dims = x_tr.shape[1] // (2 * self.splice_half + 1)
        geom = Geometry(2 * self.splice_half + 1, 1, n_dims)
        rng = np.random.default_rng(self.seed)
        conv = Conv1D("freq", self.conv_filters, self.conv_span, self.conv_pool,
                      geom, rng)
        layers = [conv]
        prev = conv.out_dim
        for _ in range(self.n_hidden):
            layers.append(Dense(prev, self.hidden_width, "sigmoid", rng))
            prev = self.hidden_width
        layers.append(Dense(prev, 6, "linear", rng))
        self.network_ = Network(layers, loss="mse")

        cfg = TrainConfig(lr0=self.lr0, batch=self.batch,
                          max_epochs=self.max_epochs,
                          min_epochs=self.min_epochs, seed=self.seed)
        self.train_log_ = sgd_train(self.network_, x_tr, y_tr, x_cv, y_cv, cfg)
        return self

    # ---- estimation ---------------------------------------------------------

    def predict(self, utt: Utterance) -> TVTrajectory:
        """Estimate the 6 TV trajectories, one frame per 10 ms."""
        if self.network_ is None:
            raise NotTrainedError("SpeechInverter used before fit")
        x = self._input_matrix(utt)
        out = np.concatenate(
            [self.network_.forward(x[lo : lo + 2048]) for lo in range(0, len(x), 2048)]
        )
        tv = TVTrajectory(out.astype(np.float64))
        if self.smooth_estimates and len(out) >= 2:
            tv = kalman_smooth(tv)
        return tv

    estimate_tvs = predict

    def evaluate(self, utterances: list[Utterance]) -> InversionReport:
        """Per-TV Pearson r pooled over the given utterances."""
        from .corpus.lexicon import TV_NAMES

        est, truth = [], []
        for u in utterances:
            if u.tv_truth is None:
                raise ValidationError(f"utterance {u.id} has no tv_truth")
            est.append(self.predict(u).values)
            truth.append(u.tv_truth.values)
        est = np.concatenate(est)
        truth = np.concatenate(truth)
        per_tv = {
            name: pearson(est[:, i], truth[:, i]) for i, name in enumerate(TV_NAMES)
        }
        return InversionReport(per_tv_r=per_tv)


def train_inversion(
    utterances: list[Utterance],
    cv_utterances: list[Utterance] | None = None,
    heldout: list[Utterance] | None = None,
    **kwargs,
) -> tuple[SpeechInverter, InversionReport | None]:
    """Convenience wrapper: fit a SpeechInverter and report held-out r."""
    inv = SpeechInverter(**kwargs).fit(utterances, cv_utterances)
    report = inv.evaluate(heldout) if heldout else None
    return inv, report
