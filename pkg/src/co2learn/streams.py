"""Multi-distributional stream construction.

A stream is G intervals of exactly B samples each. In synthetic mode the two
class-conditional distributions of interval 1 are unit-covariance Gaussians
around class means drawn from the seeded generator, and each later interval
perturbs both means independently with Gaussian noise of std ``drift_std``,
so consecutive intervals have distinct distributions almost surely. In
libsvm mode an existing dataset is shuffled, split into G blocks, and each
block receives fresh class-conditional Gaussian noise (std ``noise_std``)
whose per-class mean is itself redrawn per interval.

Feature norms are conditioned AFTER noising: any sample with ||x|| > D is
rescaled onto the sphere of radius D (per-sample, not global, because
Gaussian tails defeat any pre-scaling). D defaults to 1.

Substream layout for seed s (see rng module for the generator contract):

    substream(s, 0)          class-mean chain (synthetic) / dataset shuffle
                             (libsvm), in documented draw order
    substream(s, g)          samples of interval g = 1..G
    substream(s, 2**32 + g)  fresh proxy samples from interval g's
                             distribution (diagnostics only)

Draw order inside interval g (synthetic): first the label permutation
(Fisher-Yates over ceil(B/2) labels +1 followed by floor(B/2) labels -1),
then one block of B*dim standard normals, row t belonging to sample t.
Libsvm mode: per interval, dim normals for the +1 noise mean, dim for the
-1 noise mean, then one block of B*dim sample-noise normals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, StreamFormatError
from .geometry import Sample
from .rng import CounterRng, substream

PROXY_SUBSTREAM_OFFSET = 2**32


@dataclass(frozen=True)
class StreamSpec:
    """Full description of a stream; two specs with equal fields generate
    byte-identical data."""

    G: int
    B: int
    dim: int
    seed: int
    mode: str = "synthetic"  # or "libsvm_noised"
    drift_std: float = 0.3
    noise_std: float = 0.1
    D: float = 1.0

    def __post_init__(self):
        if self.G < 1 or self.B < 1 or self.dim < 1:
            raise ValueError("G, B and dim must all be >= 1")
        if self.mode not in ("synthetic", "libsvm_noised"):
            raise ValueError(f"unknown stream mode {self.mode!r}")
        if self.drift_std < 0 or self.noise_std < 0:
            raise ValueError("noise standard deviations must be nonnegative")
        if not (self.D > 0):
            raise ValueError("D must be positive")


@dataclass(frozen=True)
class IntervalBuffer:
    """The B samples of one interval, stored densely.

    ``class_means`` holds the generating means (+1 row first) for synthetic
    intervals and is None for data-derived ones.
    """

    X: np.ndarray
    y: np.ndarray
    interval_index: int
    class_means: np.ndarray | None = field(default=None)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ValueError("interval buffer needs X of shape (B, dim) and y of shape (B,)")
        if not np.all(np.isin(y, (-1, 1))):
            raise ValueError("labels must be -1 or +1")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def samples(self) -> list[Sample]:
        return [Sample(x=self.X[i], y=int(self.y[i])) for i in range(self.n)]


def condition_norms(X: np.ndarray, D: float) -> np.ndarray:
    """Rescale every row with ||x|| > D onto the sphere of radius D."""
    if not (D > 0):
        raise ValueError("D must be positive")
    X = np.asarray(X, dtype=np.float64)
    norms = np.linalg.norm(X, axis=-1, keepdims=True)
    scale = np.where(norms > D, D / np.where(norms == 0, 1.0, norms), 1.0)
    return X * scale


def _balanced_labels(B: int, rng: CounterRng) -> np.ndarray:
    labels = np.concatenate([np.ones((B + 1) // 2, dtype=np.int64),
                             -np.ones(B // 2, dtype=np.int64)])
    return rng.shuffle(labels)


def sample_from_means(class_means: np.ndarray, n: int, D: float, rng: CounterRng):
    """Draw n unit-covariance samples around the per-class means, balanced
    labels, conditioned into the D-ball. Shared by interval generation and
    the fresh-proxy draw so both see the same distribution."""
    dim = class_means.shape[1]
    y = _balanced_labels(n, rng)
    noise = rng.normals(n * dim).reshape(n, dim)
    X = np.where((y == 1)[:, None], class_means[0], class_means[1]) + noise
    return condition_norms(X, D), y


def gen_synthetic(spec: StreamSpec) -> list[IntervalBuffer]:
    """Drifting-Gaussian stream of G intervals; deterministic in the seed."""
    if spec.mode != "synthetic":
        raise ValueError(f"gen_synthetic needs mode='synthetic', got {spec.mode!r}")
    mean_rng = substream(spec.seed, 0)
    mu_pos = mean_rng.normals(spec.dim)
    mu_neg = mean_rng.normals(spec.dim)
    if np.array_equal(mu_pos, mu_neg):  # probability-zero; regenerating would
        raise RuntimeError("degenerate draw: identical class means")
    intervals = []
    for g in range(1, spec.G + 1):
        if g > 1:
            mu_pos = mu_pos + spec.drift_std * mean_rng.normals(spec.dim)
            mu_neg = mu_neg + spec.drift_std * mean_rng.normals(spec.dim)
        means = np.vstack([mu_pos, mu_neg])
        X, y = sample_from_means(means, spec.B, spec.D, substream(spec.seed, g))
        intervals.append(IntervalBuffer(X=X, y=y, interval_index=g, class_means=means))
    return intervals


def fresh_proxy_samples(spec: StreamSpec, interval: IntervalBuffer, n: int):
    """n new samples from interval g's generating distribution, from the
    dedicated proxy substream. Synthetic intervals only."""
    if interval.class_means is None:
        raise DataError("fresh proxy draws need an interval with stored generating means")
    rng = substream(spec.seed, PROXY_SUBSTREAM_OFFSET + interval.interval_index)
    return sample_from_means(interval.class_means, n, spec.D, rng)


_FEATURE_RE = re.compile(r"^(\d+):([^\s:]+)$")


def parse_libsvm(text: str, dim: int | None = None) -> list[Sample]:
    """Parse LIBSVM sparse text into dense samples (no norm conditioning).

    Grammar: one sample per line, ``<label> <index>:<value> ...`` with
    1-based strictly increasing indices. Labels 1/+1 map to +1; 0 and -1 map
    to -1. Blank lines are skipped. Any other shape is an error naming the
    line. When ``dim`` is given, an index beyond it is an error; otherwise
    the dimension is the largest index seen (at least 1).
    """
    parsed: list[tuple[int, list[tuple[int, float]]]] = []
    max_index = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        tokens = line.split()
        label_tok = tokens[0]
        try:
            label_val = float(label_tok)
        except ValueError:
            raise StreamFormatError(f"non-numeric label {label_tok!r}", lineno) from None
        if label_val in (1.0,):
            y = 1
        elif label_val in (0.0, -1.0):
            y = -1
        else:
            raise StreamFormatError(f"label {label_tok!r} is not one of +1/1/0/-1", lineno)
        feats: list[tuple[int, float]] = []
        prev_index = 0
        for tok in tokens[1:]:
            m = _FEATURE_RE.match(tok)
            if m is None:
                raise StreamFormatError(f"malformed feature token {tok!r}", lineno)
            idx = int(m.group(1))
            try:
                val = float(m.group(2))
            except ValueError:
                raise StreamFormatError(f"non-numeric value in {tok!r}", lineno) from None
            if not np.isfinite(val):
                raise StreamFormatError(f"non-finite value in {tok!r}", lineno)
            if idx < 1:
                raise StreamFormatError(f"feature index must be >= 1, got {idx}", lineno)
            if idx == prev_index:
                raise StreamFormatError(f"duplicate feature index {idx}", lineno)
            if idx < prev_index:
                raise StreamFormatError(
                    f"feature indices must be strictly increasing, got {idx} after {prev_index}",
                    lineno,
                )
            if dim is not None and idx > dim:
                raise StreamFormatError(f"feature index {idx} exceeds dim={dim}", lineno)
            feats.append((idx, val))
            prev_index = idx
        parsed.append((y, feats))
        if feats:
            max_index = max(max_index, feats[-1][0])
    out_dim = dim if dim is not None else max(max_index, 1)
    samples = []
    for y, feats in parsed:
        x = np.zeros(out_dim)
        for idx, val in feats:
            x[idx - 1] = val
        samples.append(Sample(x=x, y=y))
    return samples


def make_multidist(samples: list[Sample], spec: StreamSpec) -> list[IntervalBuffer]:
    """Shuffle, split into G blocks of B, and noise each block class-wise."""
    if spec.mode != "libsvm_noised":
        raise ValueError(f"make_multidist needs mode='libsvm_noised', got {spec.mode!r}")
    need = spec.G * spec.B
    if len(samples) < need:
        raise DataError(
            f"need at least G*B = {need} samples for G={spec.G}, B={spec.B}; got {len(samples)}"
        )
    if any(s.x.shape != (spec.dim,) for s in samples):
        raise DataError(f"all samples must have dim={spec.dim}")
    order = substream(spec.seed, 0).shuffle(np.arange(len(samples)))[:need]
    X_all = np.asarray([samples[i].x for i in order])
    y_all = np.asarray([samples[i].y for i in order], dtype=np.int64)
    intervals = []
    for g in range(1, spec.G + 1):
        lo = (g - 1) * spec.B
        X = X_all[lo: lo + spec.B].copy()
        y = y_all[lo: lo + spec.B]
        rng = substream(spec.seed, g)
        mean_pos = spec.noise_std * rng.normals(spec.dim)
        mean_neg = spec.noise_std * rng.normals(spec.dim)
        noise = spec.noise_std * rng.normals(spec.B * spec.dim).reshape(spec.B, spec.dim)
        X = X + noise + np.where((y == 1)[:, None], mean_pos, mean_neg)
        intervals.append(IntervalBuffer(X=condition_norms(X, spec.D), y=y, interval_index=g))
    return intervals


def generate(spec: StreamSpec, samples: list[Sample] | None = None) -> list[IntervalBuffer]:
    """Dispatch on the spec's mode; libsvm mode needs the parsed samples."""
    if spec.mode == "synthetic":
        return gen_synthetic(spec)
    if samples is None:
        raise DataError("libsvm_noised mode needs parsed input samples")
    return make_multidist(samples, spec)


def dump_stream(intervals: list[IntervalBuffer], path: str) -> None:
    """Write ``g,t,y,x1,...,xdim`` records, floats at 17 significant digits."""
    with open(path, "w", newline="") as fh:
        for buf in intervals:
            for t in range(buf.n):
                coords = ",".join(f"{v:.17g}" for v in buf.X[t])
                fh.write(f"{buf.interval_index},{t + 1},{int(buf.y[t])},{coords}\n")


def load_stream(path: str) -> list[IntervalBuffer]:
    """Read a dump_stream file back; exact float round-trip."""
    per_g: dict[int, list[tuple[int, np.ndarray]]] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) < 4:
                raise StreamFormatError("stream record needs g,t,y and coordinates", lineno)
            try:
                g, t, y = int(parts[0]), int(parts[1]), int(parts[2])
                x = np.array([float(v) for v in parts[3:]])
            except ValueError:
                raise StreamFormatError("non-numeric stream record", lineno) from None
            per_g.setdefault(g, []).append((y, x))
    intervals = []
    for g in sorted(per_g):
        ys, xs = zip(*per_g[g])
        intervals.append(
            IntervalBuffer(X=np.vstack(xs), y=np.array(ys, dtype=np.int64), interval_index=g)
        )
    return intervals
