"""Automatic threshold detection over the confidence map, and classification.

The threshold is found by sweeping the 1st through 100th percentiles of
the confidence map and asking, at each one, how erratic the depth map is
underneath: the standard deviation of depth-map entropies over the pixels
whose conditioning value falls strictly below the percentile.  A cubic is
least-squares fitted to that spread-versus-percentile curve and its
inflection point, when it lands inside the 20th-80th percentile guard
band, becomes the threshold; otherwise the median is used.  Pixels whose
confidence falls strictly below the threshold are classified incorrect.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polyutils

from .rasters import RealMap, ReliabilityMask

__all__ = [
    "ThresholdDiagnostics",
    "percentiles_over",
    "sigma_below",
    "cubic_fit",
    "inflection_point",
    "detect_threshold",
    "classify",
    "diagnostics_to_csv",
]

GUARD_LOW = 20
GUARD_HIGH = 80


@dataclass(frozen=True)
class ThresholdDiagnostics:
    """Every intermediate of a threshold detection run, for audit and plots.

    `percentiles` and `sigmas` each hold 100 entries for ranks 1..100;
    undefined spread values (conditioning set smaller than 2) are NaN.
    `cubic` holds (a, b, c, d) of a*x^3 + b*x^2 + c*x + d, or None when
    no fit was possible.  `inflection` is None when the fitted leading
    coefficient is degenerate.  When `fallback_used` is set the threshold
    equals the 50th percentile.
    """

    percentiles: np.ndarray
    sigmas: np.ndarray
    cubic: np.ndarray | None
    inflection: float | None
    fallback_used: bool
    threshold: float
    conditioning: str = "difference"


def percentiles_over(realmap):
    """The 1st..100th percentiles of all pixel values, linearly interpolated.

    Rank i maps to position i/100 * (N-1) in the sorted values, with
    linear interpolation between neighbors.
    """
    return np.percentile(realmap.values, np.arange(1, 101))


def sigma_below(conditioning, depth_entropy, p):
    """Population standard deviation of depth entropies where conditioning < p.

    Returns NaN when fewer than 2 pixels qualify.
    """
    cond = conditioning.values
    dep = depth_entropy.values
    if cond.shape != dep.shape:
        raise ValueError(f"map dimensions differ: {cond.shape} vs {dep.shape}")
    selected = dep[cond < p]
    if selected.size < 2:
        return math.nan
    return float(np.std(selected))


def _prefix_sigmas(cond_flat, dep_flat, percentiles):
    # One sort plus centered prefix sums replaces 100 masked passes.
    # Accumulation runs in extended precision so the result tracks the
    # two-pass sigma_below definition to well below fit sensitivity.
    order = np.argsort(cond_flat, kind="stable")
    cond_sorted = cond_flat[order]
    dep_sorted = dep_flat[order].astype(np.longdouble)
    center = dep_sorted.mean()
    centered = dep_sorted - center
    sum1 = np.cumsum(centered)
    sum2 = np.cumsum(centered * centered)
    counts = np.searchsorted(cond_sorted, percentiles, side="left")
    sigmas = np.full(len(percentiles), np.nan)
    defined = counts >= 2
    k = counts[defined]
    mean = sum1[k - 1] / k
    variance = np.maximum(sum2[k - 1] / k - mean * mean, 0.0)
    sigmas[defined] = np.sqrt(variance).astype(np.float64)
    return sigmas


def cubic_fit(xs, ys):
    """Least-squares cubic through (x, y) points, highest coefficient first.

    Points with non-finite y are dropped before fitting.  The abscissae
    are centered and scaled onto [-1, 1] for conditioning and the
    coefficients mapped back to the original domain.  Raises ValueError
    with fewer than 4 usable points or when all abscissae coincide.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape:
        raise ValueError(f"point count mismatch: {xs.shape} vs {ys.shape}")
    keep = np.isfinite(ys) & np.isfinite(xs)
    xs, ys = xs[keep], ys[keep]
    if xs.size < 4:
        raise ValueError(f"need at least 4 defined points, got {xs.size}")
    if np.ptp(xs) == 0:
        raise ValueError("all abscissae identical; cubic fit is rank-deficient")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", polyutils.RankWarning)
        fitted = Polynomial.fit(xs, ys, 3)
    coef = fitted.convert().coef
    out = np.zeros(4)
    out[: len(coef)] = coef
    return out[::-1].copy()


def inflection_point(coeffs, eps=1e-12):
    """The single inflection of a cubic, -b / (3a), or None when degenerate.

    A leading coefficient of magnitude at most `eps` means the fit is not
    genuinely cubic and no inflection exists.
    """
    a, b = float(coeffs[0]), float(coeffs[1])
    if abs(a) <= eps:
        return None
    return -b / (3.0 * a)


def detect_threshold(confidence, depth_entropy, conditioning=None, conditioning_label=None):
    """Derive the classification threshold from a confidence map.

    `conditioning` selects which map gates the spread statistic; the
    default is the confidence map itself.  Passing the image entropy map
    instead reproduces the alternative reading where raw image texture
    does the gating; the label is recorded in the diagnostics so reports
    always say which was used.

    The fallback to the 50th percentile covers every failure of the fit:
    fewer than 4 defined spread points, a rank-deficient system, a
    degenerate leading coefficient, and an inflection outside the
    [20th, 80th] percentile guard band.
    """
    if confidence.values.shape != depth_entropy.values.shape:
        raise ValueError(
            f"map dimensions differ: {confidence.values.shape} "
            f"vs {depth_entropy.values.shape}"
        )
    if conditioning is None:
        cond = confidence
        label = conditioning_label or "difference"
    else:
        if conditioning.values.shape != confidence.values.shape:
            raise ValueError("conditioning map dimensions differ from confidence map")
        cond = conditioning
        label = conditioning_label or "supplied"

    percentiles = percentiles_over(confidence)
    sigmas = _prefix_sigmas(
        cond.values.ravel(), depth_entropy.values.ravel(), percentiles
    )

    cubic = None
    inflection = None
    try:
        cubic = cubic_fit(percentiles, sigmas)
        inflection = inflection_point(cubic)
    except ValueError:
        pass

    median = float(percentiles[49])
    threshold = median
    fallback = True
    if inflection is not None and percentiles[GUARD_LOW - 1] <= inflection <= percentiles[GUARD_HIGH - 1]:
        threshold = float(inflection)
        fallback = False
    return ThresholdDiagnostics(
        percentiles=percentiles,
        sigmas=sigmas,
        cubic=cubic,
        inflection=inflection,
        fallback_used=fallback,
        threshold=threshold,
        conditioning=label,
    )


def classify(confidence, threshold):
    """Flag pixels with confidence strictly below the threshold as incorrect."""
    return ReliabilityMask(~(confidence.values < threshold))


def diagnostics_to_csv(diag):
    """Render diagnostics as CSV text: a summary comment, then i,percentile,sigma rows."""
    if diag.cubic is None:
        coeffs = ",,,"
    else:
        coeffs = ",".join(f"{c!r}" for c in diag.cubic)
    inflection = "" if diag.inflection is None else repr(diag.inflection)
    lines = [
        f"# cubic_a,cubic_b,cubic_c,cubic_d,inflection,fallback_used,threshold,conditioning",
        f"# {coeffs},{inflection},{diag.fallback_used},{diag.threshold!r},{diag.conditioning}",
        "i,percentile,sigma",
    ]
    for i in range(100):
        sigma = diag.sigmas[i]
        sigma_text = "" if not np.isfinite(sigma) else repr(float(sigma))
        lines.append(f"{i + 1},{float(diag.percentiles[i])!r},{sigma_text}")
    return "\n".join(lines) + "\n"
